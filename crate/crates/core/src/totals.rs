//! Total number and energy of created particles.
//!
//! `𝒩± = ∫ N±(ω) dω` and `ℰ± = ∫ ω N±(ω) dω`, both per unit `τ` like the
//! spectra they integrate. Monochromatic spectra live on `[0, ω₀]`; finite
//! pulses are integrated up to twice the frequency at which `|f̃|²` falls
//! below [`TRUNCATION_FLOOR`] of its peak.

use core::cell::Cell;
use core::f64::consts::PI;

use crate::drive::DriveProfile;
use crate::error::{Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_EVAL};
use crate::scattering::{MirrorParams, Side};
use crate::spectrum::{self, TRUNCATION_FLOOR};

/// Per-side split of an integrated quantity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SideSplit {
    pub plus: f64,
    pub minus: f64,
    pub total: f64,
}

impl SideSplit {
    fn new(plus: f64, minus: f64) -> Self {
        SideSplit {
            plus,
            minus,
            total: plus + minus,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        SideSplit::new(self.plus * factor, self.minus * factor)
    }
}

/// Integrated numbers and energies.
///
/// `normalized` marks values multiplied by `2π/ε²` (so numbers read as the
/// normalized rate `(2π/ε²τ)𝒩`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Totals {
    pub n_plus: f64,
    pub n_minus: f64,
    pub n_total: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub e_total: f64,
    pub normalized: bool,
}

impl Totals {
    pub fn from_splits(number: SideSplit, energy: SideSplit) -> Self {
        Totals {
            n_plus: number.plus,
            n_minus: number.minus,
            n_total: number.total,
            e_plus: energy.plus,
            e_minus: energy.minus,
            e_total: energy.total,
            normalized: false,
        }
    }

    pub fn number(&self) -> SideSplit {
        SideSplit::new(self.n_plus, self.n_minus)
    }

    pub fn energy(&self) -> SideSplit {
        SideSplit::new(self.e_plus, self.e_minus)
    }

    /// Multiply through by `2π/ε²`. Undefined for `ε = 0`.
    pub fn normalized(&self, epsilon: f64) -> Result<Totals> {
        if self.normalized {
            return Ok(*self);
        }
        if epsilon == 0.0 {
            return Err(Error::Domain("normalization by 2*pi/epsilon^2 is undefined at epsilon = 0"));
        }
        let factor = 2.0 * PI / (epsilon * epsilon);
        let mut out = Totals::from_splits(self.number().scaled(factor), self.energy().scaled(factor));
        out.normalized = true;
        Ok(out)
    }
}

#[derive(Clone, Copy)]
enum Moment {
    Number,
    Energy,
}

fn outer_limits(d: &DriveProfile) -> alloc::vec::Vec<f64> {
    if d.is_monochromatic() {
        return alloc::vec![0.0, d.omega0()];
    }
    let upper = 2.0 * d.decay_frequency(TRUNCATION_FLOOR);
    let mut points = alloc::vec![0.0];
    for k in [-3.0, 0.0, 3.0] {
        let x = d.omega0() + k / d.tau();
        if x > 0.0 && x < upper {
            points.push(x);
        }
    }
    points.push(upper);
    points
}

fn integrate_side(
    p: &MirrorParams,
    d: &DriveProfile,
    side: Side,
    moment: Moment,
    rel_tol: f64,
) -> Result<f64> {
    // inner integrals feed the outer one; keep their noise below its tolerance
    let inner_tol = if d.is_monochromatic() { rel_tol } else { (0.1 * rel_tol).max(1e-13) };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |w: f64| {
        let n = match spectrum::spectrum(p, d, side, w, inner_tol) {
            Ok(n) => n,
            Err(e) => {
                let first = failure.take().unwrap_or(e);
                failure.set(Some(first));
                0.0
            }
        };
        match moment {
            Moment::Number => n,
            Moment::Energy => n * w,
        }
    };
    let result = quadrature::integrate_with_breakpoints(integrand, &outer_limits(d), rel_tol, DEFAULT_MAX_EVAL)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    result.into_result()
}

fn check(p: &MirrorParams, rel_tol: f64) -> Result<bool> {
    if !rel_tol.is_finite() || rel_tol < 0.0 {
        return Err(Error::invalid("rel_tol", rel_tol, "must be finite and >= 0"));
    }
    // Υ carries an overall μ₀ and the spectra an overall ε²
    Ok(p.mu0() == 0.0 || p.epsilon() == 0.0)
}

fn split(p: &MirrorParams, d: &DriveProfile, moment: Moment, rel_tol: f64) -> Result<SideSplit> {
    if check(p, rel_tol)? {
        return Ok(SideSplit::default());
    }
    let plus = integrate_side(p, d, Side::Plus, moment, rel_tol)?;
    let minus = integrate_side(p, d, Side::Minus, moment, rel_tol)?;
    Ok(SideSplit::new(plus, minus))
}

/// `𝒩₊, 𝒩₋, 𝒩` per unit `τ`.
pub fn total_number(p: &MirrorParams, d: &DriveProfile, rel_tol: f64) -> Result<SideSplit> {
    split(p, d, Moment::Number, rel_tol)
}

/// `ℰ₊, ℰ₋, ℰ` per unit `τ`.
pub fn total_energy(p: &MirrorParams, d: &DriveProfile, rel_tol: f64) -> Result<SideSplit> {
    split(p, d, Moment::Energy, rel_tol)
}

/// Numbers and energies together.
pub fn totals(p: &MirrorParams, d: &DriveProfile, rel_tol: f64) -> Result<Totals> {
    Ok(Totals::from_splits(
        total_number(p, d, rel_tol)?,
        total_energy(p, d, rel_tol)?,
    ))
}

/// Normalized total rate `(2π/ε²τ)𝒩`. Requires `ε > 0`.
pub fn normalized_rate(p: &MirrorParams, d: &DriveProfile, rel_tol: f64) -> Result<f64> {
    let number = total_number(p, d, rel_tol)?;
    let eps = p.epsilon();
    if eps == 0.0 {
        return Err(Error::Domain("normalized rate is undefined at epsilon = 0"));
    }
    Ok(number.total * 2.0 * PI / (eps * eps))
}
