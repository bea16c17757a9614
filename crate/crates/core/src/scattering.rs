//! Frequency-domain scattering by the static δ–δ′ mirror.
//!
//! With `D(ω) = iμ₀ − iχ₀ω² + ω(1+λ₀²)` the static coefficients are
//!
//! ```text
//! s±(ω) = ω(1−λ₀²) / D(ω)
//! r±(ω) = −(iμ₀ − iχ₀ω² ∓ 2ωλ₀) / D(ω)
//! ```
//!
//! and the first-order correction from the modulation `μ(t) = μ₀[1 + εf(t)]`
//! is `𝒮(ω,ω′) = −iεμ₀ f̃(ω−ω′) [J₂ + S(ω′)] / D(ω)`.
//!
//! Everything is evaluated directly in complex arithmetic. `Re D(ω) = ω(1+λ₀²)`
//! so the denominator can only vanish at `ω = 0` with `μ₀ = 0`; that point is
//! handled by its continuous limit, except for the fully degenerate
//! `μ₀ = χ₀ = 0, λ₀² = 1` case which is rejected.

use core::ops::{Index, Mul};

use num_complex::Complex64;

use crate::drive::{self, DriveProfile};
use crate::error::{Error, Result};

/// Complex scattering amplitude (`re`, `im`).
pub type ComplexAmplitude = Complex64;

/// Upper bound on the modulation amplitude accepted by [`MirrorParams`].
pub const MAX_EPSILON: f64 = 0.1;

/// Static couplings of the mirror plus the modulation amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MirrorParams {
    mu0: f64,
    chi0: f64,
    lambda0: f64,
    epsilon: f64,
}

impl MirrorParams {
    /// `mu0` and `chi0` must be finite and non-negative, `lambda0` finite and
    /// `epsilon` in `[0, 0.1]`.
    pub fn new(mu0: f64, chi0: f64, lambda0: f64, epsilon: f64) -> Result<Self> {
        if !mu0.is_finite() || mu0 < 0.0 {
            return Err(Error::invalid("mu0", mu0, "must be finite and >= 0"));
        }
        if !chi0.is_finite() || chi0 < 0.0 {
            return Err(Error::invalid("chi0", chi0, "must be finite and >= 0"));
        }
        if !lambda0.is_finite() {
            return Err(Error::invalid("lambda0", lambda0, "must be finite"));
        }
        if !(0.0..=MAX_EPSILON).contains(&epsilon) {
            return Err(Error::invalid("epsilon", epsilon, "must lie in [0, 0.1]"));
        }
        Ok(MirrorParams {
            mu0,
            chi0,
            lambda0,
            epsilon,
        })
    }

    /// Unmodulated mirror (`ε = 0`).
    pub fn static_mirror(mu0: f64, chi0: f64, lambda0: f64) -> Result<Self> {
        Self::new(mu0, chi0, lambda0, 0.0)
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn chi0(&self) -> f64 {
        self.chi0
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_mu0(self, mu0: f64) -> Result<Self> {
        Self::new(mu0, self.chi0, self.lambda0, self.epsilon)
    }

    pub fn with_chi0(self, chi0: f64) -> Result<Self> {
        Self::new(self.mu0, chi0, self.lambda0, self.epsilon)
    }

    pub fn with_lambda0(self, lambda0: f64) -> Result<Self> {
        Self::new(self.mu0, self.chi0, lambda0, self.epsilon)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.mu0, self.chi0, self.lambda0, epsilon)
    }

    /// `1 + λ₀²`
    pub(crate) fn lambda_factor(&self) -> f64 {
        1.0 + self.lambda0 * self.lambda0
    }

    /// `μ₀ − χ₀ω²`
    pub(crate) fn reactance(&self, omega: f64) -> f64 {
        self.mu0 - self.chi0 * omega * omega
    }

    fn is_degenerate(&self) -> bool {
        self.mu0 == 0.0 && self.chi0 == 0.0 && self.lambda0 * self.lambda0 == 1.0
    }
}

/// Side of the mirror: `Plus` is `x > 0`, `Minus` is `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];

    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[ComplexAmplitude; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Complex64::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    /// `J₂`, ones on the anti-diagonal.
    pub fn backward_identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[zero, one], [one, zero]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn add(&self, other: &Mat2) -> Self {
        let mut out = *self;
        for (row, orow) in out.0.iter_mut().zip(other.0.iter()) {
            for (x, y) in row.iter_mut().zip(orow.iter()) {
                *x += *y;
            }
        }
        out
    }

    pub fn scale(&self, factor: ComplexAmplitude) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|x| *x *= factor);
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [ComplexAmplitude; 2]) -> [ComplexAmplitude; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| modulus(*z)).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.add(&other.scale(Complex64::new(-1.0, 0.0))).max_abs()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    #[allow(clippy::needless_range_loop)]
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = ComplexAmplitude;

    fn index(&self, (i, j): (usize, usize)) -> &ComplexAmplitude {
        &self.0[i][j]
    }
}

pub(crate) fn modulus(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("omega", omega, "must be finite"))
    }
}

/// `D(ω) = iμ₀ − iχ₀ω² + ω(1+λ₀²)`.
pub fn denominator(p: &MirrorParams, omega: f64) -> ComplexAmplitude {
    Complex64::new(omega * p.lambda_factor(), p.reactance(omega))
}

/// Static limit at `ω = 0, μ₀ = 0`, where `D(0) = 0`.
fn zero_frequency_limit(p: &MirrorParams, side: Side) -> Result<(Complex64, Complex64)> {
    if p.is_degenerate() {
        return Err(Error::Domain(
            "s and r are 0/0 at omega = 0 for mu0 = chi0 = 0, lambda0 = +-1",
        ));
    }
    let b = p.lambda_factor();
    let s = (1.0 - p.lambda0 * p.lambda0) / b;
    let r = side.sign() * 2.0 * p.lambda0 / b;
    Ok((Complex64::new(s, 0.0), Complex64::new(r, 0.0)))
}

/// Transmission coefficient `s±(ω)`. Identical on both sides.
pub fn transmission_coefficient(p: &MirrorParams, side: Side, omega: f64) -> Result<ComplexAmplitude> {
    check_omega(omega)?;
    let d = denominator(p, omega);
    if d == Complex64::new(0.0, 0.0) {
        return zero_frequency_limit(p, side).map(|(s, _)| s);
    }
    Ok(Complex64::new(omega * (1.0 - p.lambda0 * p.lambda0), 0.0) / d)
}

/// Reflection coefficient `r±(ω)`.
pub fn reflection_coefficient(p: &MirrorParams, side: Side, omega: f64) -> Result<ComplexAmplitude> {
    check_omega(omega)?;
    let d = denominator(p, omega);
    if d == Complex64::new(0.0, 0.0) {
        return zero_frequency_limit(p, side).map(|(_, r)| r);
    }
    let num = Complex64::new(-side.sign() * 2.0 * omega * p.lambda0, p.reactance(omega));
    Ok(-num / d)
}

/// `1 + r±(ω)`, formed as `(D − n)/D` from the same numerator `n` and
/// denominator `D` as [`reflection_coefficient`]. Adding 1 to `r ≈ −1` loses
/// every digit of the small real part at low frequency; here the reactive
/// parts cancel exactly instead.
pub fn one_plus_reflection(p: &MirrorParams, side: Side, omega: f64) -> Result<ComplexAmplitude> {
    check_omega(omega)?;
    let d = denominator(p, omega);
    if d == Complex64::new(0.0, 0.0) {
        return zero_frequency_limit(p, side).map(|(_, r)| r + 1.0);
    }
    let num = Complex64::new(-side.sign() * 2.0 * omega * p.lambda0, p.reactance(omega));
    Ok((d - num) / d)
}

/// Static scattering matrix `[[s₊, r₊], [r₋, s₋]]`.
pub fn scattering_matrix(p: &MirrorParams, omega: f64) -> Result<Mat2> {
    let s_plus = transmission_coefficient(p, Side::Plus, omega)?;
    let s_minus = transmission_coefficient(p, Side::Minus, omega)?;
    let r_plus = reflection_coefficient(p, Side::Plus, omega)?;
    let r_minus = reflection_coefficient(p, Side::Minus, omega)?;
    Ok(Mat2([[s_plus, r_plus], [r_minus, s_minus]]))
}

/// First-order correction kernel `𝒮(ω, ω′)` for a finite-duration drive.
///
/// Monochromatic drives carry a distributional `f̃` and are rejected.
pub fn correction_kernel(
    p: &MirrorParams,
    d: &DriveProfile,
    omega: f64,
    omega_prime: f64,
) -> Result<Mat2> {
    check_omega(omega)?;
    check_omega(omega_prime)?;
    let f = drive::f_tilde_exact(d, omega - omega_prime)?;
    if p.epsilon == 0.0 || p.mu0 == 0.0 {
        return Ok(Mat2::ZERO);
    }
    let s = scattering_matrix(p, omega_prime)?;
    let prefactor = Complex64::new(0.0, -p.epsilon * p.mu0) * f / denominator(p, omega);
    Ok(Mat2::backward_identity().add(&s).scale(prefactor))
}

/// Residual of the two static matching conditions for `Φ_out = S(ω)·Φ_in`.
///
/// `incoming = (φ̃_in, ψ̃_in)`. Both conditions are used with denominators
/// cleared (multiplied through by `1−λ₀` and `ω(1−λ₀²)` respectively) so they
/// stay finite at `λ₀ = ±1` and `ω = 0`:
///
/// ```text
/// (1−λ₀)(φ_out + ψ_in) − (1+λ₀)(φ_in + ψ_out) = 0
/// ω(1−λ₀²)(φ_out − ψ_in) − ω(1−λ₀)²(φ_in − ψ_out) + 2i(μ₀ − χ₀ω²)(φ_in + ψ_out) = 0
/// ```
///
/// Each residual is divided by the sum of its coefficient moduli, so the
/// returned value is on the scale of the field amplitudes.
pub fn matching_residual(
    p: &MirrorParams,
    omega: f64,
    incoming: [ComplexAmplitude; 2],
) -> Result<f64> {
    if p.epsilon != 0.0 {
        return Err(Error::invalid(
            "epsilon",
            p.epsilon,
            "matching residual is defined for the static mirror only",
        ));
    }
    let [phi_in, psi_in] = incoming;
    let [phi_out, psi_out] = scattering_matrix(p, omega)?.apply(incoming);
    let l = p.lambda0;

    let (a1, b1) = (1.0 - l, 1.0 + l);
    let first = (phi_out + psi_in) * a1 - (phi_in + psi_out) * b1;
    let first_scale = libm::fabs(a1) + libm::fabs(b1);

    let c = omega * (1.0 - l * l);
    let e = omega * (1.0 - l) * (1.0 - l);
    let g = 2.0 * p.reactance(omega);
    let second = (phi_out - psi_in) * c - (phi_in - psi_out) * e
        + (phi_in + psi_out) * Complex64::new(0.0, g);
    let second_scale = libm::fabs(c) + libm::fabs(e) + libm::fabs(g);

    let normalized = |r: Complex64, scale: f64| if scale > 0.0 { modulus(r) / scale } else { 0.0 };
    Ok(normalized(first, first_scale).max(normalized(second, second_scale)))
}
