//! Particle creation from vacuum by a static, partially reflecting δ–δ′ mirror
//! whose δ coupling is modulated in time, `μ(t) = μ₀[1 + εf(t)]`, for a
//! massless scalar field in 1+1 dimensions.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! * [`scattering`]: static S-matrix, correction kernel, matching residuals;
//! * [`drive`]: the modulation `f(t) = cos(ω₀t)e^{−|t|/τ}` and its transform;
//! * [`spectrum`]: per-side spectra `N±(ω)/τ` and sampled spectrum tables;
//! * [`quadrature`] and [`totals`]: adaptive integration, `𝒩` and `ℰ`;
//! * [`sweep`]: `(χ₀, λ₀)` grids, peak refinement and level curves.
//!
//! Natural units (`c = ħ = 1`) throughout.
#![no_std]

extern crate alloc;

pub mod drive;
pub mod error;
pub mod quadrature;
pub mod scattering;
pub mod spectrum;
pub mod sweep;
pub mod totals;

pub use drive::DriveProfile;
pub use error::{Error, Result};
pub use quadrature::QuadratureResult;
pub use scattering::{ComplexAmplitude, Mat2, MirrorParams, Side};
pub use spectrum::{SpectrumGrid, SpectrumSample};
pub use sweep::{AxisRange, LevelCurve, PeakReport, SweepGrid, SweepKind};
pub use totals::{SideSplit, Totals};
