//! Exploration of the `(χ₀, λ₀)` plane at fixed `μ₀`, `ω₀` for monochromatic
//! drives: normalized-rate and ratio-to-perfect-mirror grids, 1D peak
//! refinement along `χ₀`, and level-curve extraction.
//!
//! Grid evaluation is split into a [`SweepPlan`] with independent per-cell
//! steps so a caller can fan cells out over threads; the assembled grid is
//! identical to [`SweepPlan::run`] because no cell reads another.

mod contour;
mod peak;

pub use contour::{extract_level_curve, extract_level_curve_linear, LevelCurve};
pub use peak::{find_peak, golden_section_max, refine_grid_peak, PeakReport, PEAK_ABSCISSA_TOL};

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::drive::DriveProfile;
use crate::error::{Error, Result};
use crate::scattering::MirrorParams;
use crate::totals;

/// Modulation amplitude used internally by sweeps. Normalized quantities do
/// not depend on it.
pub const SWEEP_EPSILON: f64 = 1e-2;

/// Closed interval sampled at `count` uniformly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxisRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() || start >= end {
            return Err(Error::invalid("range", start, "need finite start < end"));
        }
        if count < 2 {
            return Err(Error::invalid("range count", count as f64, "must be >= 2"));
        }
        Ok(AxisRange { start, end, count })
    }

    /// Sample points, first and last exactly `start` and `end`. Ranges
    /// symmetric about zero produce exactly negated mirror points.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let span = self.end - self.start;
        let at = |k: usize| {
            if k == n - 1 {
                self.end
            } else {
                self.start + span * (k as f64) / ((n - 1) as f64)
            }
        };
        if self.start != -self.end {
            return (0..n).map(at).collect();
        }
        let mut pts: Vec<f64> = (0..n).map(at).collect();
        for k in 0..n / 2 {
            pts[n - 1 - k] = -pts[k];
        }
        if n % 2 == 1 {
            pts[n / 2] = 0.0;
        }
        pts
    }
}

impl FromStr for AxisRange {
    type Err = Error;

    /// `start:end:count`, e.g. `0:10:201`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("range", f64::NAN, "expected start:end:count");
        let mut parts = s.split(':');
        let start = parts.next().and_then(|x| x.trim().parse::<f64>().ok()).ok_or_else(bad)?;
        let end = parts.next().and_then(|x| x.trim().parse::<f64>().ok()).ok_or_else(bad)?;
        let count = parts.next().and_then(|x| x.trim().parse::<usize>().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        AxisRange::new(start, end, count)
    }
}

impl fmt::Display for AxisRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.count)
    }
}

/// What a sweep grid cell holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SweepKind {
    /// `(2π/ε²τ)𝒩`
    NormalizedRate,
    /// `𝒩 / 𝒩|_{λ₀=1}` at the same `χ₀`
    RatioToPerfect,
}

/// Couplings held fixed across a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixedParams {
    pub mu0: f64,
    pub omega0: f64,
}

impl FixedParams {
    pub fn new(mu0: f64, omega0: f64) -> Result<Self> {
        MirrorParams::static_mirror(mu0, 0.0, 0.0)?;
        DriveProfile::monochromatic(omega0, 1.0)?;
        Ok(FixedParams { mu0, omega0 })
    }
}

/// `(2π/ε²τ)𝒩` at one point of the plane.
pub fn normalized_rate_at(fixed: FixedParams, chi0: f64, lambda0: f64, rel_tol: f64) -> Result<f64> {
    let p = MirrorParams::new(fixed.mu0, chi0, lambda0, SWEEP_EPSILON)?;
    let d = DriveProfile::monochromatic(fixed.omega0, 1.0)?;
    totals::normalized_rate(&p, &d, rel_tol)
}

/// `𝒩(χ₀, λ₀) / 𝒩(χ₀, 1)`.
pub fn ratio_to_perfect_at(fixed: FixedParams, chi0: f64, lambda0: f64, rel_tol: f64) -> Result<f64> {
    let perfect = normalized_rate_at(fixed, chi0, 1.0, rel_tol)?;
    ratio(normalized_rate_at(fixed, chi0, lambda0, rel_tol)?, perfect)
}

fn ratio(value: f64, perfect: f64) -> Result<f64> {
    if perfect == 0.0 {
        Err(Error::Domain("perfect-mirror total vanishes; ratio undefined"))
    } else {
        Ok(value / perfect)
    }
}

/// Evaluated `(χ₀, λ₀)` grid.
///
/// `values` is row-major with `χ₀` as the slow index:
/// `values[i * lambda0_axis.len() + j]` belongs to `(chi0_axis[i], lambda0_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepGrid {
    pub kind: SweepKind,
    pub fixed: FixedParams,
    pub rel_tol: f64,
    pub chi0_axis: Vec<f64>,
    pub lambda0_axis: Vec<f64>,
    pub values: Vec<f64>,
}

impl SweepGrid {
    pub fn new(
        kind: SweepKind,
        fixed: FixedParams,
        rel_tol: f64,
        chi0_axis: Vec<f64>,
        lambda0_axis: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let increasing = |axis: &[f64]| axis.len() >= 2 && axis.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&chi0_axis) || !increasing(&lambda0_axis) {
            return Err(Error::Domain("sweep axes must be strictly increasing with >= 2 points"));
        }
        if chi0_axis[0] < 0.0 {
            return Err(Error::Domain("chi0 axis must be non-negative"));
        }
        if values.len() != chi0_axis.len() * lambda0_axis.len() {
            return Err(Error::Domain("sweep value count does not match the axes"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("sweep values must be finite and non-negative"));
        }
        Ok(SweepGrid {
            kind,
            fixed,
            rel_tol,
            chi0_axis,
            lambda0_axis,
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.chi0_axis.len(), self.lambda0_axis.len())
    }

    /// Stored value at node `(i, j)`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.lambda0_axis.len() + j]
    }

    /// Re-evaluate the grid's quantity at an arbitrary point.
    pub fn evaluate(&self, chi0: f64, lambda0: f64) -> Result<f64> {
        match self.kind {
            SweepKind::NormalizedRate => normalized_rate_at(self.fixed, chi0, lambda0, self.rel_tol),
            SweepKind::RatioToPerfect => ratio_to_perfect_at(self.fixed, chi0, lambda0, self.rel_tol),
        }
    }

    /// `(i, j, value)` of the largest stored value (first in row-major order on ties).
    pub fn argmax(&self) -> (usize, usize, f64) {
        let ny = self.lambda0_axis.len();
        let (k, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        (k / ny, k % ny, v)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// A sweep broken into independent steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub kind: SweepKind,
    pub fixed: FixedParams,
    pub rel_tol: f64,
    pub chi0_axis: Vec<f64>,
    pub lambda0_axis: Vec<f64>,
}

impl SweepPlan {
    pub fn new(
        kind: SweepKind,
        mu0: f64,
        omega0: f64,
        chi0_range: AxisRange,
        lambda0_range: AxisRange,
        rel_tol: f64,
    ) -> Result<Self> {
        let fixed = FixedParams::new(mu0, omega0)?;
        if chi0_range.start < 0.0 {
            return Err(Error::invalid("chi0", chi0_range.start, "must be >= 0"));
        }
        if !rel_tol.is_finite() || rel_tol < 0.0 {
            return Err(Error::invalid("rel_tol", rel_tol, "must be finite and >= 0"));
        }
        Ok(SweepPlan {
            kind,
            fixed,
            rel_tol,
            chi0_axis: chi0_range.points(),
            lambda0_axis: lambda0_range.points(),
        })
    }

    pub fn cell_count(&self) -> usize {
        self.chi0_axis.len() * self.lambda0_axis.len()
    }

    fn wrap(&self, i: usize, lambda0: f64, e: Error) -> Error {
        Error::Cell {
            chi0: self.chi0_axis[i],
            lambda0,
            source: Box::new(e),
        }
    }

    /// Per-row denominator: `𝒩(χ₀ᵢ, 1)` for ratio sweeps, `1` otherwise.
    pub fn row_denominator(&self, i: usize) -> Result<f64> {
        match self.kind {
            SweepKind::NormalizedRate => Ok(1.0),
            SweepKind::RatioToPerfect => normalized_rate_at(self.fixed, self.chi0_axis[i], 1.0, self.rel_tol)
                .map_err(|e| self.wrap(i, 1.0, e)),
        }
    }

    /// Value of flat cell `k` (row-major) given all row denominators.
    pub fn evaluate_cell(&self, k: usize, denominators: &[f64]) -> Result<f64> {
        let ny = self.lambda0_axis.len();
        let (i, j) = (k / ny, k % ny);
        let (chi0, lambda0) = (self.chi0_axis[i], self.lambda0_axis[j]);
        let rate = normalized_rate_at(self.fixed, chi0, lambda0, self.rel_tol)
            .map_err(|e| self.wrap(i, lambda0, e))?;
        match self.kind {
            SweepKind::NormalizedRate => Ok(rate),
            SweepKind::RatioToPerfect => ratio(rate, denominators[i]).map_err(|e| self.wrap(i, lambda0, e)),
        }
    }

    pub fn assemble(self, values: Vec<f64>) -> Result<SweepGrid> {
        SweepGrid::new(
            self.kind,
            self.fixed,
            self.rel_tol,
            self.chi0_axis,
            self.lambda0_axis,
            values,
        )
    }

    /// Evaluate every cell sequentially.
    pub fn run(self) -> Result<SweepGrid> {
        let denominators = (0..self.chi0_axis.len())
            .map(|i| self.row_denominator(i))
            .collect::<Result<Vec<_>>>()?;
        let values = (0..self.cell_count())
            .map(|k| self.evaluate_cell(k, &denominators))
            .collect::<Result<Vec<_>>>()?;
        self.assemble(values)
    }
}

/// Grid of `(2π/ε²τ)𝒩` over `(χ₀, λ₀)`.
pub fn sweep_normalized_rate(
    mu0: f64,
    omega0: f64,
    chi0_range: AxisRange,
    lambda0_range: AxisRange,
    rel_tol: f64,
) -> Result<SweepGrid> {
    SweepPlan::new(SweepKind::NormalizedRate, mu0, omega0, chi0_range, lambda0_range, rel_tol)?.run()
}

/// Grid of `𝒩/𝒩|_{λ₀=1}` over `(χ₀, λ₀)`, normalized per `χ₀`.
pub fn sweep_ratio_to_perfect(
    mu0: f64,
    omega0: f64,
    chi0_range: AxisRange,
    lambda0_range: AxisRange,
    rel_tol: f64,
) -> Result<SweepGrid> {
    SweepPlan::new(SweepKind::RatioToPerfect, mu0, omega0, chi0_range, lambda0_range, rel_tol)?.run()
}
