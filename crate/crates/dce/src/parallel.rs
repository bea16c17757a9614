//! Thread-parallel sweeps and spectrum sampling.
//!
//! Results are collected in cell order and the first failing cell (in that
//! order) is reported, so output never depends on the thread count.

use dce_core::spectrum::{self, SpectralPoint};
use dce_core::sweep::SweepPlan;
use dce_core::{DriveProfile, MirrorParams, Result, SpectrumGrid, SweepGrid};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// Evaluate every cell of `plan` on the current rayon pool.
pub fn run_sweep(plan: SweepPlan) -> Result<SweepGrid> {
    let rows: Vec<usize> = (0..plan.chi0_axis.len()).collect();
    let denominators = first_error(rows.par_iter().map(|&i| plan.row_denominator(i)).collect())?;
    let values = first_error(
        (0..plan.cell_count())
            .into_par_iter()
            .map(|k| plan.evaluate_cell(k, &denominators))
            .collect(),
    )?;
    plan.assemble(values)
}

/// Parallel counterpart of `spectrum::sample_spectrum_at`.
pub fn sample_spectrum(
    p: &MirrorParams,
    d: &DriveProfile,
    points: &[SpectralPoint],
    quad_tol: f64,
) -> Result<SpectrumGrid> {
    let samples = first_error(
        points
            .par_iter()
            .map(|pt| spectrum::evaluate_point(p, d, pt, quad_tol))
            .collect(),
    )?;
    SpectrumGrid::from_samples(*p, *d, samples)
}

/// Run `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dce_core::sweep::AxisRange;
    use dce_core::SweepKind;

    fn plan(kind: SweepKind) -> SweepPlan {
        SweepPlan::new(
            kind,
            1.0,
            1.0,
            AxisRange::new(0.0, 8.0, 9).unwrap(),
            AxisRange::new(-1.0, 1.0, 7).unwrap(),
            1e-10,
        )
        .unwrap()
    }

    #[test]
    fn sweep_matches_sequential_bitwise() {
        for kind in [SweepKind::NormalizedRate, SweepKind::RatioToPerfect] {
            let seq = plan(kind).run().unwrap();
            for threads in [1, 3, 8] {
                let par = with_threads(Some(threads), || run_sweep(plan(kind))).unwrap().unwrap();
                assert_eq!(par, seq);
            }
        }
    }

    #[test]
    fn spectrum_matches_sequential_bitwise() {
        let p = MirrorParams::new(1.0, 0.5, 0.3, 0.01).unwrap();
        for d in [DriveProfile::exact(1.0, 20.0).unwrap(), DriveProfile::monochromatic(1.0, 1.0).unwrap()] {
            let pts = spectrum::spectral_points(&d, 41).unwrap();
            let seq = spectrum::sample_spectrum_at(&p, &d, &pts, 1e-10).unwrap();
            let par = with_threads(Some(4), || sample_spectrum(&p, &d, &pts, 1e-10)).unwrap().unwrap();
            assert_eq!(par, seq);
        }
    }
}
