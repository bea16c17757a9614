//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The panel with the largest error estimate is bisected until the summed
//! error estimate drops below `rel_tol · |value|` or the evaluation budget is
//! spent. Per-panel errors use the QUADPACK rescaling, which puts a floor of
//! `50·ε_mach·∫|f|` under every estimate, so tolerances below roughly `1e-14`
//! cannot be met and report `converged = false`.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Default evaluation budget for a single integral.
pub const DEFAULT_MAX_EVAL: usize = 200_000;

#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for KRONROD_NODES[1], [3], [5], [7].
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// The value if converged, otherwise a [`Error::Convergence`] carrying the
    /// best estimate.
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Convergence {
                estimate: self.value,
                abs_error: self.abs_error_estimate,
                evaluations: self.evaluations,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // max-heap on error; ties broken by position so the order is total
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = libm::fabs(err);
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut gauss = f_center * GAUSS_WEIGHTS[3];
    let mut kronrod = f_center * KRONROD_WEIGHTS[7];
    let mut res_abs = libm::fabs(kronrod);
    let mut values = [(0.0, 0.0); 7];

    for (j, slot) in values.iter_mut().enumerate() {
        let x = half * KRONROD_NODES[j];
        let (lo, hi) = (f(center - x), f(center + x));
        *slot = (lo, hi);
        kronrod += KRONROD_WEIGHTS[j] * (lo + hi);
        res_abs += KRONROD_WEIGHTS[j] * (libm::fabs(lo) + libm::fabs(hi));
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * (lo + hi);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = KRONROD_WEIGHTS[7] * libm::fabs(f_center - mean);
    for (j, &(lo, hi)) in values.iter().enumerate() {
        res_asc += KRONROD_WEIGHTS[j] * (libm::fabs(lo - mean) + libm::fabs(hi - mean));
    }

    let scale = libm::fabs(half);
    let error = rescale_error((kronrod - gauss) * half, res_abs * scale, res_asc * scale);
    Panel {
        a,
        b,
        value: kronrod * half,
        error,
    }
}

/// `∫_a^b f`, adaptive to relative tolerance `rel_tol`.
///
/// `rel_tol = 0` is accepted and converges only for integrals whose error
/// estimate is exactly zero.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_eval: usize,
) -> Result<QuadratureResult> {
    integrate_with_breakpoints(f, &[a, b], rel_tol, max_eval)
}

/// Like [`integrate`] but starts from the panels delimited by `points`
/// (strictly increasing, at least two). Breakpoints let the caller place
/// panel edges at known narrow features the initial rule could step over.
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    rel_tol: f64,
    max_eval: usize,
) -> Result<QuadratureResult> {
    if points.len() < 2 {
        return Err(Error::invalid("points", points.len() as f64, "need at least two"));
    }
    if points.iter().any(|x| !x.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "points",
            points[0],
            "integration limits must be finite and strictly increasing",
        ));
    }
    if !rel_tol.is_finite() || rel_tol < 0.0 {
        return Err(Error::invalid("rel_tol", rel_tol, "must be finite and >= 0"));
    }

    let mut heap: BinaryHeap<Panel> = BinaryHeap::with_capacity(64);
    let mut evaluations = 0;
    for w in points.windows(2) {
        heap.push(kronrod15(&mut f, w[0], w[1]));
        evaluations += EVALS_PER_PANEL;
    }

    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut converged = error <= rel_tol * libm::fabs(value);

    while !converged && evaluations + 2 * EVALS_PER_PANEL <= max_eval {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // panel cannot be split any further in floating point
            heap.push(worst);
            break;
        }
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        evaluations += 2 * EVALS_PER_PANEL;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        converged = error <= rel_tol * libm::fabs(value);
    }

    // re-sum in panel order so the result does not carry update drift
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let (value, error) = panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
        converged: error <= rel_tol * libm::fabs(value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn linear_is_exact() {
        let r = integrate(|x| x, 0.0, 1.0, 1e-12, DEFAULT_MAX_EVAL).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!(r.abs_error_estimate < 1e-14);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn sine_over_half_period() {
        let r = integrate(libm::sin, 0.0, PI, 1e-13, DEFAULT_MAX_EVAL).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion() {
        let r = integrate(|x| libm::sin(200.0 * x), 0.0, 10.0, 1e-10, 1).unwrap();
        assert!(!r.converged);
        assert!(matches!(r.into_result(), Err(Error::Convergence { .. })));
    }

    #[test]
    fn zero_tolerance_never_converges_on_nontrivial_integrand() {
        let r = integrate(libm::exp, 0.0, 1.0, 0.0, 3000).unwrap();
        assert!(!r.converged);
        assert!((r.value - (core::f64::consts::E - 1.0)).abs() < 1e-14);
        let z = integrate(|_| 0.0, 0.0, 1.0, 0.0, 3000).unwrap();
        assert!(z.converged);
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn narrow_peak_needs_breakpoint() {
        // Lorentzian of width 1e-6 centred away from the coarse nodes
        let w = 1e-6;
        let c = 0.123_456;
        let f = |x: f64| w / ((x - c) * (x - c) + w * w);
        let exact = libm::atan((1.0 - c) / w) + libm::atan(c / w);
        let r = integrate_with_breakpoints(f, &[0.0, c, 1.0], 1e-12, DEFAULT_MAX_EVAL).unwrap();
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-8, 100).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8, 100).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, -1.0, 100).is_err());
        assert!(integrate_with_breakpoints(|x| x, &[0.0], 1e-8, 100).is_err());
    }

    #[test]
    fn converged_implies_error_bound() {
        for &tol in &[1e-4, 1e-8, 1e-12] {
            let r = integrate(|x| 1.0 / (1.0 + 25.0 * x * x), -1.0, 1.0, tol, DEFAULT_MAX_EVAL)
                .unwrap();
            assert!(r.converged);
            assert!(r.abs_error_estimate <= tol * r.value.abs().max(1.0));
            let exact = 2.0 * libm::atan(5.0) / 5.0;
            assert!((r.value - exact).abs() <= r.abs_error_estimate.max(1e-15));
        }
    }
}
