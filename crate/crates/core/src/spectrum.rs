//! Spectra of created particles on each side of the mirror.
//!
//! All spectra are reported per unit envelope time, i.e. as `N±(ω)/τ`.
//!
//! * monochromatic drives use the closed form
//!   `ε²(1±λ₀)²(1+λ₀²)/(4π) · Υ(ω)Υ(ω₀−ω)` on `0 < ω < ω₀` and zero above;
//! * finite pulses integrate `Υ(ω)Υ(ω′)|f̃(ω+ω′)|²` over `ω′ ≥ 0`
//!   ([`spectrum_general`]), or the equivalent integrand written with
//!   `Re[1 + r±(−ω′)]` ([`spectrum_via_reflection_form`]). The two routes
//!   share nothing but the quadrature engine and serve as oracles for each
//!   other.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::drive::{self, DriveProfile};
use crate::error::{Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_EVAL};
use crate::scattering::{self, MirrorParams, Side};

/// Default relative tolerance for spectral and total integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// `|f̃|²` floor (relative to its peak) that truncates the `ω′` integral.
pub const TRUNCATION_FLOOR: f64 = 1e-12;

/// `|f̃|²` floor that sets the upper end of sampled finite-pulse spectra.
pub const SAMPLING_FLOOR: f64 = 1e-6;

/// `Υ(ω) = μ₀ω / [(μ₀ − χ₀ω²)² + ω²(1+λ₀²)²]`.
pub fn upsilon(p: &MirrorParams, omega: f64) -> Result<f64> {
    if !omega.is_finite() {
        return Err(Error::invalid("omega", omega, "must be finite"));
    }
    let a = p.reactance(omega);
    let b = omega * p.lambda_factor();
    let den = a * a + b * b;
    if den == 0.0 {
        return Err(Error::Domain("upsilon is 0/0 at omega = 0 with mu0 = 0"));
    }
    Ok(p.mu0() * omega / den)
}

/// `(1±λ₀)²(1+λ₀²)`
fn side_weight(p: &MirrorParams, side: Side) -> f64 {
    let w = 1.0 + side.sign() * p.lambda0();
    w * w * p.lambda_factor()
}

/// `((1−λ₀)/(1+λ₀))²`, the frequency-independent ratio `N₋/N₊` (and `𝒩₋/𝒩₊`).
pub fn side_ratio(p: &MirrorParams) -> Result<f64> {
    let l = p.lambda0();
    if l == -1.0 {
        return Err(Error::Domain("side ratio diverges at lambda0 = -1 (N+ vanishes)"));
    }
    let q = (1.0 - l) / (1.0 + l);
    Ok(q * q)
}

fn check_frequency(omega: f64) -> Result<()> {
    if omega.is_finite() && omega >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("omega", omega, "must be finite and >= 0"))
    }
}

fn check_tol(quad_tol: f64) -> Result<()> {
    if quad_tol.is_finite() && quad_tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("quad_tol", quad_tol, "must be finite and >= 0"))
    }
}

fn require_monochromatic(d: &DriveProfile) -> Result<()> {
    drive::monochromatic_weight(d).map(|_| ())
}

fn require_finite_pulse(d: &DriveProfile) -> Result<()> {
    if d.is_monochromatic() {
        Err(Error::Domain("finite-pulse spectrum requested for a monochromatic drive"))
    } else {
        Ok(())
    }
}

/// Closed form with the complementary frequency supplied explicitly, so that
/// mirrored grid points evaluate the same product in swapped order.
fn monochromatic_pair(
    p: &MirrorParams,
    d: &DriveProfile,
    side: Side,
    omega: f64,
    complement: f64,
) -> Result<f64> {
    if omega >= d.omega0() || p.epsilon() == 0.0 || p.mu0() == 0.0 {
        return Ok(0.0);
    }
    // (ε²/π)·(1/2π)·weight, which is ε²/(4π) for the π/2 weight
    let weight = drive::monochromatic_weight(d)?;
    let eps2 = p.epsilon() * p.epsilon();
    let prefactor = eps2 * side_weight(p, side) * weight / (2.0 * PI * PI);
    Ok(prefactor * (upsilon(p, omega)? * upsilon(p, complement)?))
}

/// `N±(ω)/τ` in the monochromatic limit; zero for `ω ≥ ω₀`.
pub fn spectrum_monochromatic(p: &MirrorParams, d: &DriveProfile, side: Side, omega: f64) -> Result<f64> {
    require_monochromatic(d)?;
    check_frequency(omega)?;
    monochromatic_pair(p, d, side, omega, d.omega0() - omega)
}

/// Breakpoints for the `ω′` integral: the `|f̃(ω+ω′)|²` peak at `ω′ = ω₀ − ω`
/// has width `1/τ` and must not fall between the initial Kronrod nodes.
fn inner_breakpoints(d: &DriveProfile, omega: f64) -> Vec<f64> {
    let upper = 2.0 * d.decay_frequency(TRUNCATION_FLOOR);
    peak_breakpoints(d.omega0() - omega, d.tau(), upper)
}

fn peak_breakpoints(peak: f64, tau: f64, upper: f64) -> Vec<f64> {
    let mut points = Vec::with_capacity(9);
    points.push(0.0);
    for k in [-30.0, -3.0, -0.5, 0.0, 0.5, 3.0, 30.0] {
        let x = peak + k / tau;
        if x > 0.0 && x < upper {
            points.push(x);
        }
    }
    points.push(upper);
    points.dedup();
    points
}

fn inner_integral<F: FnMut(f64) -> f64>(
    integrand: F,
    d: &DriveProfile,
    omega: f64,
    quad_tol: f64,
) -> Result<f64> {
    let points = inner_breakpoints(d, omega);
    quadrature::integrate_with_breakpoints(integrand, &points, quad_tol, DEFAULT_MAX_EVAL)?.into_result()
}

/// `N±(ω)/τ` for a finite pulse, from the `Υ(ω)Υ(ω′)` form of the integrand.
pub fn spectrum_general(
    p: &MirrorParams,
    d: &DriveProfile,
    side: Side,
    omega: f64,
    quad_tol: f64,
) -> Result<f64> {
    require_finite_pulse(d)?;
    check_frequency(omega)?;
    check_tol(quad_tol)?;
    if p.epsilon() == 0.0 || p.mu0() == 0.0 || omega == 0.0 {
        return Ok(0.0);
    }
    let integral = inner_integral(
        |wp| {
            let s = lorentzian_sq(d, omega + wp);
            upsilon(p, wp).unwrap_or(0.0) * s
        },
        d,
        omega,
        quad_tol,
    )?;
    let eps2 = p.epsilon() * p.epsilon();
    let prefactor = eps2 * side_weight(p, side) / PI * upsilon(p, omega)? / (2.0 * PI);
    Ok(prefactor * integral / d.tau())
}

/// `N±(ω)/τ` for a finite pulse, from the `Re[1 + r±(−ω′)]` form.
pub fn spectrum_via_reflection_form(
    p: &MirrorParams,
    d: &DriveProfile,
    side: Side,
    omega: f64,
    quad_tol: f64,
) -> Result<f64> {
    require_finite_pulse(d)?;
    check_frequency(omega)?;
    check_tol(quad_tol)?;
    if p.epsilon() == 0.0 || p.mu0() == 0.0 || omega == 0.0 {
        return Ok(0.0);
    }
    let integral = inner_integral(
        |wp| {
            if wp == 0.0 {
                return 0.0;
            }
            let g = match scattering::one_plus_reflection(p, side, -wp) {
                Ok(g) => g,
                Err(_) => return 0.0,
            };
            (omega / wp) * g.re * lorentzian_sq(d, omega + wp)
        },
        d,
        omega,
        quad_tol,
    )?;
    let a = p.reactance(omega);
    let b = omega * p.lambda_factor();
    let eps_mu = p.epsilon() * p.mu0();
    let prefactor = eps_mu * eps_mu / PI / (2.0 * PI) / (a * a + b * b);
    Ok(prefactor * integral / d.tau())
}

fn lorentzian_sq(d: &DriveProfile, omega: f64) -> f64 {
    // callers have already checked that the drive is a finite pulse
    drive::f_tilde_sq(d, omega).unwrap_or(0.0)
}

/// `N±(ω)/τ` for either kind of drive.
pub fn spectrum(p: &MirrorParams, d: &DriveProfile, side: Side, omega: f64, quad_tol: f64) -> Result<f64> {
    if d.is_monochromatic() {
        spectrum_monochromatic(p, d, side, omega)
    } else {
        spectrum_general(p, d, side, omega, quad_tol)
    }
}

/// One row of a sampled spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumSample {
    pub omega: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub n_total: f64,
}

/// Frequency at which a sampled spectrum is evaluated.
///
/// For monochromatic drives `complement` is the partner frequency `ω₀ − ω`;
/// mirrored grid points store each other's frequency there so the closed form
/// is evaluated on bitwise-swapped arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub omega: f64,
    complement: f64,
}

impl SpectralPoint {
    pub fn new(d: &DriveProfile, omega: f64) -> Self {
        SpectralPoint {
            omega,
            complement: d.omega0() - omega,
        }
    }
}

/// Upper end of the sampled band: `ω₀` for monochromatic drives, otherwise
/// where `|f̃|²` has decayed to [`SAMPLING_FLOOR`] of its peak.
pub fn sampling_cutoff(d: &DriveProfile) -> f64 {
    if d.is_monochromatic() {
        d.omega0()
    } else {
        d.decay_frequency(SAMPLING_FLOOR)
    }
}

/// `n_points` uniform frequencies on the open band `(0, ω_cut)`.
///
/// Monochromatic grids are built mirror-symmetric about `ω₀/2`.
pub fn spectral_points(d: &DriveProfile, n_points: usize) -> Result<Vec<SpectralPoint>> {
    if n_points < 2 {
        return Err(Error::invalid("n_points", n_points as f64, "must be >= 2"));
    }
    let cut = sampling_cutoff(d);
    let steps = (n_points + 1) as f64;
    let uniform = |k: usize| cut * (k as f64) / steps;
    if !d.is_monochromatic() {
        return Ok((1..=n_points).map(|k| SpectralPoint::new(d, uniform(k))).collect());
    }
    let mut points = Vec::with_capacity(n_points);
    let lower = n_points / 2;
    for k in 1..=lower {
        points.push(SpectralPoint::new(d, uniform(k)));
    }
    if n_points % 2 == 1 {
        points.push(SpectralPoint::new(d, 0.5 * cut));
    }
    for k in (0..lower).rev() {
        let partner = points[k];
        points.push(SpectralPoint {
            omega: partner.complement,
            complement: partner.omega,
        });
    }
    Ok(points)
}

/// Evaluate both sides at one point.
pub fn evaluate_point(
    p: &MirrorParams,
    d: &DriveProfile,
    point: &SpectralPoint,
    quad_tol: f64,
) -> Result<SpectrumSample> {
    let side = |side| {
        if d.is_monochromatic() {
            check_frequency(point.omega)?;
            monochromatic_pair(p, d, side, point.omega, point.complement)
        } else {
            spectrum_general(p, d, side, point.omega, quad_tol)
        }
    };
    let n_plus = side(Side::Plus)?;
    let n_minus = side(Side::Minus)?;
    Ok(SpectrumSample {
        omega: point.omega,
        n_plus,
        n_minus,
        n_total: n_plus + n_minus,
    })
}

/// Sampled `{ω, N₊/τ, N₋/τ, N/τ}` table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumGrid {
    pub params: MirrorParams,
    pub drive: DriveProfile,
    pub samples: Vec<SpectrumSample>,
}

impl SpectrumGrid {
    /// Checks the table invariants: increasing `ω`, finite non-negative
    /// values, `n_total = n_plus + n_minus`, zero above `ω₀` when monochromatic.
    pub fn from_samples(
        params: MirrorParams,
        drive: DriveProfile,
        samples: Vec<SpectrumSample>,
    ) -> Result<Self> {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
        if samples.windows(2).any(|w| !(w[0].omega < w[1].omega)) {
            return Err(Error::Domain("spectrum samples must have strictly increasing omega"));
        }
        for s in &samples {
            let values = [s.n_plus, s.n_minus, s.n_total];
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Domain("spectrum values must be finite and non-negative"));
            }
            if s.n_total != s.n_plus + s.n_minus {
                return Err(Error::Domain("n_total must equal n_plus + n_minus"));
            }
            if drive.is_monochromatic() && s.omega >= drive.omega0() && s.n_total != 0.0 {
                return Err(Error::Domain("monochromatic spectrum must vanish above omega0"));
            }
        }
        Ok(SpectrumGrid {
            params,
            drive,
            samples,
        })
    }
}

/// Sample the spectrum on [`spectral_points`].
pub fn sample_spectrum(
    p: &MirrorParams,
    d: &DriveProfile,
    n_points: usize,
    quad_tol: f64,
) -> Result<SpectrumGrid> {
    let points = spectral_points(d, n_points)?;
    sample_spectrum_at(p, d, &points, quad_tol)
}

/// Sample the spectrum at caller-chosen points.
pub fn sample_spectrum_at(
    p: &MirrorParams,
    d: &DriveProfile,
    points: &[SpectralPoint],
    quad_tol: f64,
) -> Result<SpectrumGrid> {
    let samples = points
        .iter()
        .map(|pt| evaluate_point(p, d, pt, quad_tol))
        .collect::<Result<Vec<_>>>()?;
    SpectrumGrid::from_samples(*p, *d, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mirror(mu0: f64, chi0: f64, lambda0: f64, eps: f64) -> MirrorParams {
        MirrorParams::new(mu0, chi0, lambda0, eps).unwrap()
    }

    #[test]
    fn upsilon_hand_values() {
        let p = mirror(1.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(upsilon(&p, 1.0).unwrap(), 0.5, epsilon = 1e-16);
        assert_relative_eq!(upsilon(&p, 0.5).unwrap(), 0.4, epsilon = 1e-16);
        assert_eq!(upsilon(&p, 0.0).unwrap(), 0.0);
        let q = mirror(0.0, 1.0, 0.5, 0.0);
        assert!(matches!(upsilon(&q, 0.0), Err(Error::Domain(_))));
        assert_eq!(upsilon(&q, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn side_ratio_values() {
        assert_eq!(side_ratio(&mirror(1.0, 0.0, 0.0, 0.0)).unwrap(), 1.0);
        assert_eq!(side_ratio(&mirror(1.0, 0.0, 1.0, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(side_ratio(&mirror(1.0, 0.0, 1.0 / 3.0, 0.0)).unwrap(), 0.25, epsilon = 1e-15);
        assert!(matches!(side_ratio(&mirror(1.0, 0.0, -1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn monochromatic_hand_value() {
        let eps = 0.01;
        let p = mirror(1.0, 0.0, 0.0, eps);
        let d = DriveProfile::monochromatic(1.0, 100.0).unwrap();
        let n = spectrum_monochromatic(&p, &d, Side::Plus, 0.5).unwrap();
        assert_relative_eq!(n, 0.04 * eps * eps / PI, max_relative = 1e-14);
        assert_eq!(spectrum_monochromatic(&p, &d, Side::Plus, 1.0).unwrap(), 0.0);
        assert_eq!(spectrum_monochromatic(&p, &d, Side::Plus, 1.7).unwrap(), 0.0);
        assert!(spectrum_monochromatic(&p, &d, Side::Plus, -0.1).is_err());

        let one_sided = mirror(1.0, 0.7, 1.0, eps);
        for &w in &[0.1, 0.5, 0.93] {
            assert_eq!(spectrum_monochromatic(&one_sided, &d, Side::Minus, w).unwrap(), 0.0);
        }
    }

    #[test]
    fn drive_kind_is_checked() {
        let p = mirror(1.0, 0.0, 0.0, 0.01);
        let mono = DriveProfile::monochromatic(1.0, 100.0).unwrap();
        let exact = DriveProfile::exact(1.0, 100.0).unwrap();
        assert!(matches!(spectrum_monochromatic(&p, &exact, Side::Plus, 0.5), Err(Error::Domain(_))));
        assert!(matches!(spectrum_general(&p, &mono, Side::Plus, 0.5, 1e-8), Err(Error::Domain(_))));
        assert!(matches!(
            spectrum_via_reflection_form(&p, &mono, Side::Plus, 0.5, 1e-8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exact_pulse_vanishing_cases() {
        let d = DriveProfile::exact(1.0, 50.0).unwrap();
        let still = mirror(1.0, 0.3, 0.2, 0.0);
        assert_eq!(spectrum_general(&still, &d, Side::Plus, 0.5, 1e-10).unwrap(), 0.0);
        assert_eq!(spectrum_via_reflection_form(&still, &d, Side::Plus, 0.5, 1e-10).unwrap(), 0.0);

        let right_dirichlet = mirror(1.0, 0.3, -1.0, 0.01);
        assert_eq!(spectrum_general(&right_dirichlet, &d, Side::Plus, 0.5, 1e-10).unwrap(), 0.0);
        let left_dirichlet = mirror(1.0, 0.3, 1.0, 0.01);
        let n = spectrum_via_reflection_form(&left_dirichlet, &d, Side::Minus, 0.5, 1e-10).unwrap();
        assert!(n.abs() < 1e-20);
    }

    #[test]
    fn exact_pulse_forms_agree() {
        let d = DriveProfile::exact(1.0, 50.0).unwrap();
        let p = mirror(1.3, 2.1, 0.4, 0.02);
        for side in Side::BOTH {
            for &w in &[0.05, 0.5, 0.98, 1.02, 1.6] {
                let a = spectrum_general(&p, &d, side, w, 1e-11).unwrap();
                let b = spectrum_via_reflection_form(&p, &d, side, w, 1e-11).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn mirrored_grid_is_symmetric() {
        let p = mirror(1.0, 3.5, 0.3, 0.01);
        let d = DriveProfile::monochromatic(1.0, 1.0).unwrap();
        for n in [2, 7, 100, 101] {
            let g = sample_spectrum(&p, &d, n, DEFAULT_QUAD_TOL).unwrap();
            assert_eq!(g.samples.len(), n);
            for (lo, hi) in g.samples.iter().zip(g.samples.iter().rev()) {
                assert_eq!(lo.n_plus, hi.n_plus);
                assert_eq!(lo.n_minus, hi.n_minus);
                assert_relative_eq!(lo.omega + hi.omega, 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn grid_rejects_too_few_points() {
        let p = mirror(1.0, 0.0, 0.0, 0.01);
        let d = DriveProfile::monochromatic(1.0, 1.0).unwrap();
        assert!(sample_spectrum(&p, &d, 1, 1e-10).is_err());
    }

    #[test]
    fn grid_invariants_enforced() {
        let p = mirror(1.0, 0.0, 0.0, 0.01);
        let d = DriveProfile::monochromatic(1.0, 1.0).unwrap();
        let bad = alloc::vec![
            SpectrumSample { omega: 0.2, n_plus: 1.0, n_minus: 1.0, n_total: 2.0 },
            SpectrumSample { omega: 0.1, n_plus: 1.0, n_minus: 1.0, n_total: 2.0 },
        ];
        assert!(SpectrumGrid::from_samples(p, d, bad).is_err());
        let beyond = alloc::vec![SpectrumSample { omega: 1.5, n_plus: 1.0, n_minus: 0.0, n_total: 1.0 }];
        assert!(SpectrumGrid::from_samples(p, d, beyond).is_err());
    }
}
