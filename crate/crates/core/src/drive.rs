//! Temporal modulation `f(t) = cos(ω₀t)·e^{−|t|/τ}` and its transform.
//!
//! The transform convention is `f̃(ω) = ∫ f(t) e^{+iωt} dt`, which gives the
//! real, even Lorentzian pair
//!
//! ```text
//! f̃(ω) = τ/(1 + (ω−ω₀)²τ²) + τ/(1 + (ω+ω₀)²τ²)
//! ```
//!
//! In the monochromatic limit `ω₀τ → ∞`, `|f̃(ω)|²/τ → (π/2)[δ(ω+ω₀) + δ(ω−ω₀)]`.
//! That limit is carried symbolically (a flag plus [`monochromatic_weight`]);
//! the distribution is never sampled.

use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering::ComplexAmplitude;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriveProfile {
    omega0: f64,
    tau: f64,
    monochromatic: bool,
}

impl DriveProfile {
    pub fn new(omega0: f64, tau: f64, monochromatic: bool) -> Result<Self> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(Error::invalid("omega0", omega0, "must be finite and > 0"));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::invalid("tau", tau, "must be finite and > 0"));
        }
        if !monochromatic && omega0 * tau < 1.0 {
            log::warn!(
                "omega0*tau = {} < 1: the pulse is far from monochromatic",
                omega0 * tau
            );
        }
        Ok(DriveProfile {
            omega0,
            tau,
            monochromatic,
        })
    }

    /// Finite pulse with the exact Lorentzian-pair transform.
    pub fn exact(omega0: f64, tau: f64) -> Result<Self> {
        Self::new(omega0, tau, false)
    }

    /// `ω₀τ → ∞` idealization. `tau` only sets the per-unit-time normalization.
    pub fn monochromatic(omega0: f64, tau: f64) -> Result<Self> {
        Self::new(omega0, tau, true)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_monochromatic(&self) -> bool {
        self.monochromatic
    }

    /// Number of oscillations per envelope time, `ω₀τ`.
    pub fn quality(&self) -> f64 {
        self.omega0 * self.tau
    }

    /// Frequency `s > ω₀` at which `|f̃(s)|²` has dropped to `rel_floor`
    /// times its value at `ω₀`. Monochromatic drives return `ω₀`.
    pub fn decay_frequency(&self, rel_floor: f64) -> f64 {
        if self.monochromatic {
            return self.omega0;
        }
        let peak = lorentzian_pair(self, self.omega0);
        let target = libm::sqrt(rel_floor) * peak;
        // single-Lorentzian estimate is a lower bound; the mirror term only adds
        let mut lo = self.omega0 + libm::sqrt(1.0 / libm::sqrt(rel_floor) - 1.0) / self.tau;
        let mut hi = 2.0 * lo;
        while lorentzian_pair(self, hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if lorentzian_pair(self, mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// `f(t) = cos(ω₀t)·e^{−|t|/τ}`; zero at `t = ±∞`.
pub fn f_time(d: &DriveProfile, t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    libm::cos(d.omega0 * t) * libm::exp(-libm::fabs(t) / d.tau)
}

fn lorentzian_pair(d: &DriveProfile, omega: f64) -> f64 {
    let lo = (omega - d.omega0) * d.tau;
    let hi = (omega + d.omega0) * d.tau;
    d.tau / (1.0 + lo * lo) + d.tau / (1.0 + hi * hi)
}

/// Exact transform of the finite pulse. Real, even and strictly positive.
pub fn f_tilde_exact(d: &DriveProfile, omega: f64) -> Result<ComplexAmplitude> {
    if d.monochromatic {
        return Err(Error::Domain(
            "the monochromatic drive has a distributional transform; use the closed-form spectra",
        ));
    }
    Ok(Complex64::new(lorentzian_pair(d, omega), 0.0))
}

/// `|f̃(ω)|²` for finite pulses.
pub fn f_tilde_sq(d: &DriveProfile, omega: f64) -> Result<f64> {
    let f = f_tilde_exact(d, omega)?.re;
    Ok(f * f)
}

/// Weight `π/2` of each delta in `|f̃(ω)|²/τ` for monochromatic drives.
pub fn monochromatic_weight(d: &DriveProfile) -> Result<f64> {
    if d.monochromatic {
        Ok(FRAC_PI_2)
    } else {
        Err(Error::Domain("monochromatic weight requested for a finite pulse"))
    }
}
