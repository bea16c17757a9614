use super::{normalized_rate_at, FixedParams, SweepGrid, SweepKind};
use crate::error::{Error, Result};

/// Abscissa tolerance of the golden-section refinement.
pub const PEAK_ABSCISSA_TOL: f64 = 1e-4;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeakReport {
    pub chi0_star: f64,
    pub lambda0_star: f64,
    pub value: f64,
    pub refinement_tol: f64,
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Returns `(x*, f(x*))`. Fails with [`Error::Bracket`] when the maximum
/// sits on the bracket boundary, i.e. `f` is monotone there.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("bracket", lo, "need finite lo < hi"));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", tol, "must be > 0"));
    }
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    let near_edge = x - lo <= tol || hi - x <= tol;
    if near_edge || fx < f_lo || fx < f_hi {
        return Err(Error::Bracket { lo, hi });
    }
    Ok((x, fx))
}

/// Maximum of `(2π/ε²τ)𝒩` along `χ₀` at fixed `λ₀`.
pub fn find_peak(
    mu0: f64,
    omega0: f64,
    lambda0_fixed: f64,
    chi0_bracket: (f64, f64),
    rel_tol: f64,
) -> Result<PeakReport> {
    let fixed = FixedParams::new(mu0, omega0)?;
    let (lo, hi) = chi0_bracket;
    if lo < 0.0 {
        return Err(Error::invalid("chi0 bracket", lo, "must be >= 0"));
    }
    let (x, value) = golden_section_max(
        |chi0| normalized_rate_at(fixed, chi0, lambda0_fixed, rel_tol),
        lo,
        hi,
        PEAK_ABSCISSA_TOL,
    )?;
    Ok(PeakReport {
        chi0_star: x,
        lambda0_star: lambda0_fixed,
        value,
        refinement_tol: PEAK_ABSCISSA_TOL,
    })
}

/// Seed from the grid argmax, then refine along `χ₀` between the neighbouring
/// grid nodes at the argmax `λ₀`.
pub fn refine_grid_peak(grid: &SweepGrid) -> Result<PeakReport> {
    if grid.kind != SweepKind::NormalizedRate {
        return Err(Error::Domain("peak refinement applies to normalized-rate grids"));
    }
    let (i, j, _) = grid.argmax();
    let n = grid.chi0_axis.len();
    let lo = grid.chi0_axis[i.saturating_sub(1)];
    let hi = grid.chi0_axis[(i + 1).min(n - 1)];
    find_peak(
        grid.fixed.mu0,
        grid.fixed.omega0,
        grid.lambda0_axis[j],
        (lo, hi),
        grid.rel_tol,
    )
}
