//! Subcommands of the `dce` binary.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dce_core::scattering::{self, Mat2};
use dce_core::spectrum::{self, SpectralPoint};
use dce_core::sweep::{self, SweepPlan};
use dce_core::totals::totals;
use dce_core::{ComplexAmplitude, DriveProfile, LevelCurve, MirrorParams, PeakReport, SweepGrid, SweepKind, Totals};
use serde::Serialize;

use crate::config::{Format, Options, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{self, num, Table};
use crate::{parallel, plot, verify};

#[derive(Debug, Parser)]
#[command(name = "dce", version, about = "Particle creation by a time-modulated delta/delta-prime mirror")]
pub struct Cli {
    /// TOML file with option defaults; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Transmission and reflection coefficients at --omega
    Coeffs,
    /// Sampled spectra N±(ω)/τ
    Spectrum,
    /// Total numbers and energies
    Total,
    /// (χ₀, λ₀) grid of the normalized rate, or of the ratio with --kind ratio
    Sweep,
    /// Shorthand for `sweep --kind ratio`
    Ratio,
    /// Refined maximum of the normalized rate along χ₀ at fixed λ₀
    Peak,
    /// Run the invariant battery
    Verify,
}

/// Parse-independent entry point: merge the config file, validate, dispatch.
pub fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => Options::load(path)?,
        None => Options::default(),
    };
    let mut settings = Settings::resolve(cli.options.over(file))?;
    match cli.command {
        Command::Coeffs => coeffs(&settings),
        Command::Spectrum => spectrum_cmd(&settings),
        Command::Total => total(&settings),
        Command::Sweep => sweep_cmd(&settings),
        Command::Ratio => {
            settings.kind = SweepKind::RatioToPerfect;
            sweep_cmd(&settings)
        }
        Command::Peak => peak(&settings),
        Command::Verify => verify_cmd(&settings),
    }
}

#[derive(Serialize)]
struct Amplitude {
    re: f64,
    im: f64,
    abs: f64,
}

impl From<ComplexAmplitude> for Amplitude {
    fn from(c: ComplexAmplitude) -> Self {
        Amplitude {
            re: c.re,
            im: c.im,
            abs: c.norm(),
        }
    }
}

#[derive(Serialize)]
struct CoeffRow {
    omega: f64,
    s_plus: Amplitude,
    s_minus: Amplitude,
    r_plus: Amplitude,
    r_minus: Amplitude,
    energy_plus: f64,
    energy_minus: f64,
    unitarity_error: f64,
    unitary: bool,
}

const UNITARITY_TOL: f64 = 1e-12;

fn coeff_row(p: &MirrorParams, omega: f64) -> CliResult<CoeffRow> {
    let s = scattering::scattering_matrix(p, omega)?;
    let energy = |row: usize| s[(row, 0)].norm_sqr() + s[(row, 1)].norm_sqr();
    let (energy_plus, energy_minus) = (energy(0), energy(1));
    let unitarity_error = (s * s.adjoint())
        .max_abs_diff(&Mat2::identity())
        .max((energy_plus - 1.0).abs())
        .max((energy_minus - 1.0).abs());
    Ok(CoeffRow {
        omega,
        s_plus: s[(0, 0)].into(),
        s_minus: s[(1, 1)].into(),
        r_plus: s[(0, 1)].into(),
        r_minus: s[(1, 0)].into(),
        energy_plus,
        energy_minus,
        unitarity_error,
        unitary: unitarity_error < UNITARITY_TOL,
    })
}

fn coeffs(s: &Settings) -> CliResult<()> {
    let omegas = s
        .omega
        .as_ref()
        .ok_or_else(|| CliError::Invalid("coeffs needs --omega".into()))?;
    let rows = omegas.iter().map(|&w| coeff_row(&s.mirror, w)).collect::<CliResult<Vec<_>>>()?;
    for r in rows.iter().filter(|r| !r.unitary) {
        log::warn!("unitarity violated at omega = {}: error {:e}", r.omega, r.unitarity_error);
    }
    let text = match s.format_or(Format::Csv) {
        Format::Json => output::to_json(&rows),
        Format::Csv => {
            let mut header = vec!["omega".to_owned()];
            for name in ["s_plus", "s_minus", "r_plus", "r_minus"] {
                for part in ["re", "im", "abs"] {
                    header.push(format!("{name}_{part}"));
                }
            }
            header.extend(["energy_plus", "energy_minus", "unitarity_error", "unitary"].map(String::from));
            let mut t = Table::new(header);
            for r in &rows {
                let mut row = vec![num(r.omega)];
                for a in [&r.s_plus, &r.s_minus, &r.r_plus, &r.r_minus] {
                    row.extend([num(a.re), num(a.im), num(a.abs)]);
                }
                row.extend([num(r.energy_plus), num(r.energy_minus), num(r.unitarity_error), r.unitary.to_string()]);
                t.push(row);
            }
            t.to_csv()
        }
    };
    output::emit(s.out.as_deref(), &text)
}

fn spectral_points(s: &Settings) -> CliResult<Vec<SpectralPoint>> {
    match s.omega_max {
        None => Ok(spectrum::spectral_points(&s.drive, s.points)?),
        Some(max) => {
            let steps = (s.points + 1) as f64;
            Ok((1..=s.points).map(|k| SpectralPoint::new(&s.drive, max * k as f64 / steps)).collect())
        }
    }
}

fn spectrum_cmd(s: &Settings) -> CliResult<()> {
    let points = spectral_points(s)?;
    let grid = parallel::with_threads(s.threads, || parallel::sample_spectrum(&s.mirror, &s.drive, &points, s.rel_tol))??;
    let text = match s.format_or(Format::Csv) {
        Format::Json => output::to_json(&grid),
        Format::Csv => {
            let mut t = Table::new(["omega", "n_plus", "n_minus", "n_total"]);
            for x in &grid.samples {
                t.push_numbers(&[x.omega, x.n_plus, x.n_minus, x.n_total]);
            }
            t.to_csv()
        }
    };
    output::emit(s.out.as_deref(), &text)?;
    if let (true, Some(out)) = (s.emit_plot_script, &s.out) {
        output::write_atomic(&out.with_extension("gp"), &plot::spectrum_script(out))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TotalsDoc {
    mirror: MirrorParams,
    drive: DriveProfile,
    rel_tol: f64,
    totals: Totals,
    /// times 2π/ε²; absent at ε = 0
    normalized: Option<Totals>,
    /// ℰ/𝒩, which equals ω₀/2 for monochromatic drives
    e_over_n: Option<f64>,
}

fn total(s: &Settings) -> CliResult<()> {
    let t = totals(&s.mirror, &s.drive, s.rel_tol)?;
    let doc = TotalsDoc {
        mirror: s.mirror,
        drive: s.drive,
        rel_tol: s.rel_tol,
        totals: t,
        normalized: t.normalized(s.mirror.epsilon()).ok(),
        e_over_n: (t.n_total != 0.0).then(|| t.e_total / t.n_total),
    };
    let text = match s.format_or(Format::Json) {
        Format::Json => output::to_json(&doc),
        Format::Csv => {
            let mut t = Table::new(["quantity", "value"]);
            let mut put = |k: &str, v: f64| t.push(vec![k.to_owned(), num(v)]);
            for (k, v) in [
                ("n_plus", doc.totals.n_plus),
                ("n_minus", doc.totals.n_minus),
                ("n_total", doc.totals.n_total),
                ("e_plus", doc.totals.e_plus),
                ("e_minus", doc.totals.e_minus),
                ("e_total", doc.totals.e_total),
            ] {
                put(k, v);
            }
            if let Some(n) = doc.normalized {
                put("normalized_n_total", n.n_total);
                put("normalized_e_total", n.e_total);
            }
            if let Some(r) = doc.e_over_n {
                put("e_over_n", r);
            }
            t.to_csv()
        }
    };
    output::emit(s.out.as_deref(), &text)
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    #[serde(flatten)]
    grid: &'a SweepGrid,
    levels: &'a [LevelCurve],
}

fn sweep_cmd(s: &Settings) -> CliResult<()> {
    let format = s.format_or(Format::Csv);
    if format == Format::Csv && !s.levels.is_empty() && s.out.is_none() {
        return Err(CliError::Invalid("--levels with csv output needs --out for the level file".into()));
    }
    let plan = SweepPlan::new(
        s.kind,
        s.mirror.mu0(),
        s.drive.omega0(),
        s.grid_chi0,
        s.grid_lambda0,
        s.rel_tol,
    )?;
    let grid = parallel::with_threads(s.threads, || parallel::run_sweep(plan))??;
    let mut curves = Vec::new();
    for &level in &s.levels {
        curves.extend(sweep::extract_level_curve(&grid, level)?);
    }
    let out = s.out.as_deref();
    match format {
        Format::Json => output::emit(out, &output::to_json(&SweepDoc { grid: &grid, levels: &curves }))?,
        Format::Csv => {
            let mut t = Table::new(["chi0", "lambda0", "value"]);
            let ny = grid.lambda0_axis.len();
            for (k, v) in grid.values.iter().enumerate() {
                t.push_numbers(&[grid.chi0_axis[k / ny], grid.lambda0_axis[k % ny], *v]);
            }
            output::emit(out, &t.to_csv())?;
            if let Some(path) = out.filter(|_| !curves.is_empty()) {
                output::write_atomic(&levels_path(path), &levels_csv(&curves))?;
            }
        }
    }
    if let (true, Some(path)) = (s.emit_plot_script, out) {
        let levels = (!curves.is_empty() && format == Format::Csv).then(|| levels_path(path));
        let title = match s.kind {
            SweepKind::NormalizedRate => "normalized rate (2 pi / eps^2 tau) N",
            SweepKind::RatioToPerfect => "N / N(lambda0 = 1)",
        };
        output::write_atomic(&path.with_extension("gp"), &plot::sweep_script(path, levels.as_deref(), title))?;
    }
    Ok(())
}

fn levels_path(data: &Path) -> PathBuf {
    output::sibling(data, "_levels.csv")
}

fn levels_csv(curves: &[LevelCurve]) -> String {
    let mut t = Table::new(["level", "component", "chi0", "lambda0"]);
    for (c, curve) in curves.iter().enumerate() {
        for &(x, y) in &curve.points {
            t.push(vec![num(curve.level), c.to_string(), num(x), num(y)]);
        }
    }
    t.to_csv()
}

#[derive(Serialize)]
struct PeakDoc {
    mu0: f64,
    omega0: f64,
    bracket: (f64, f64),
    peak: PeakReport,
}

fn peak(s: &Settings) -> CliResult<()> {
    let report = sweep::find_peak(s.mirror.mu0(), s.drive.omega0(), s.mirror.lambda0(), s.bracket, s.rel_tol)?;
    let doc = PeakDoc {
        mu0: s.mirror.mu0(),
        omega0: s.drive.omega0(),
        bracket: s.bracket,
        peak: report,
    };
    let text = match s.format_or(Format::Json) {
        Format::Json => output::to_json(&doc),
        Format::Csv => {
            let mut t = Table::new(["chi0_star", "lambda0_star", "value", "refinement_tol"]);
            t.push_numbers(&[report.chi0_star, report.lambda0_star, report.value, report.refinement_tol]);
            t.to_csv()
        }
    };
    output::emit(s.out.as_deref(), &text)
}

fn verify_cmd(s: &Settings) -> CliResult<()> {
    let outcomes = verify::battery(s);
    output::emit(s.out.as_deref(), &verify::report(&outcomes))?;
    if let Some(e) = outcomes.iter().find_map(|(_, r)| r.as_ref().err()) {
        return Err(CliError::Core(e.clone()));
    }
    let failed = outcomes.iter().filter(|(_, r)| matches!(r, Ok(c) if !c.passed)).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_row_hand_values() {
        let p = MirrorParams::static_mirror(1.0, 0.0, 0.0).unwrap();
        let r = coeff_row(&p, 1.0).unwrap();
        assert!((r.s_plus.abs.powi(2) - 0.5).abs() < 1e-15);
        assert!((r.r_minus.abs.powi(2) - 0.5).abs() < 1e-15);
        assert!(r.unitary);
    }

    #[test]
    fn levels_table() {
        let c = LevelCurve {
            level: 1.0,
            points: vec![(0.0, 1.0), (1.0, 1.0)],
        };
        let csv = levels_csv(&[c]);
        assert!(csv.starts_with("level,component,chi0,lambda0\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
