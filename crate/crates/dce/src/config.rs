//! Option layering: command-line flags over a TOML config file over built-in
//! defaults.
//!
//! The same struct parses flags and config files, so every flag `--rel-tol`
//! has a config key `rel_tol`.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dce_core::{AxisRange, DriveProfile, MirrorParams, SweepKind};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    /// (2π/ε²τ)𝒩
    Rate,
    /// 𝒩/𝒩|λ₀=1 at the same χ₀
    Ratio,
}

impl From<KindArg> for SweepKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Rate => SweepKind::NormalizedRate,
            KindArg::Ratio => SweepKind::RatioToPerfect,
        }
    }
}

/// Every tunable option. Unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// δ coupling μ₀ ≥ 0
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu0: Option<f64>,
    /// kinetic coupling χ₀ ≥ 0
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub chi0: Option<f64>,
    /// δ′ coupling λ₀
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda0: Option<f64>,
    /// modulation amplitude ε ∈ [0, 0.1]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// drive frequency ω₀ > 0
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// envelope time τ > 0
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// use the ω₀τ → ∞ limit instead of the finite pulse
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub monochromatic: Option<bool>,
    /// relative quadrature tolerance
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rel_tol: Option<f64>,
    /// χ₀ axis as start:end:count
    #[arg(long, global = true)]
    pub grid_chi0: Option<String>,
    /// λ₀ axis as start:end:count
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid_lambda0: Option<String>,
    /// sweep quantity
    #[arg(long, global = true)]
    pub kind: Option<KindArg>,
    /// level values for contour extraction, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub levels: Option<Vec<f64>>,
    /// frequencies for `coeffs`, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega: Option<Vec<f64>>,
    /// number of spectrum samples
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// sample the spectrum uniformly on (0, omega_max) instead of the default band
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    /// χ₀ bracket for `peak` as lo:hi
    #[arg(long, global = true)]
    pub bracket: Option<String>,
    /// ω₀τ values for the convergence check of `verify`, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega0_tau: Option<Vec<f64>>,
    /// output format
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// output file (stdout if absent); written atomically
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// also write a gnuplot script next to the output file
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub emit_plot_script: Option<bool>,
    /// worker threads for sweeps and spectra
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

macro_rules! layer {
    ($top:ident, $bottom:ident; $($f:ident),*) => {
        Options { $($f: $top.$f.or($bottom.$f)),* }
    };
}

impl Options {
    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: Options) -> Options {
        layer!(self, lower; mu0, chi0, lambda0, epsilon, omega0, tau, monochromatic, rel_tol,
            grid_chi0, grid_lambda0, kind, levels, omega, points, omega_max, bracket, omega0_tau,
            format, out, emit_plot_script, threads)
    }

    pub fn from_toml(text: &str) -> CliResult<Options> {
        toml::from_str(text).map_err(|e| CliError::Invalid(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> CliResult<Options> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Options::from_toml(&text)
    }
}

/// Options with defaults filled in and validated.
#[derive(Debug, Clone)]
pub struct Settings {
    pub mirror: MirrorParams,
    pub drive: DriveProfile,
    pub rel_tol: f64,
    pub grid_chi0: AxisRange,
    pub grid_lambda0: AxisRange,
    pub kind: SweepKind,
    pub levels: Vec<f64>,
    pub omega: Option<Vec<f64>>,
    pub points: usize,
    pub omega_max: Option<f64>,
    pub bracket: (f64, f64),
    pub omega0_tau: Vec<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub emit_plot_script: bool,
    pub threads: Option<usize>,
}

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_TAU: f64 = 50.0;
pub const DEFAULT_REL_TOL: f64 = dce_core::spectrum::DEFAULT_QUAD_TOL;
pub const DEFAULT_GRID_CHI0: &str = "0:10:201";
pub const DEFAULT_GRID_LAMBDA0: &str = "-1:1:201";
pub const DEFAULT_POINTS: usize = 201;
pub const DEFAULT_BRACKET: (f64, f64) = (0.5, 10.0);
pub const DEFAULT_OMEGA0_TAU: [f64; 3] = [10.0, 100.0, 1000.0];

fn parse_bracket(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Invalid(format!("bracket {s:?}: expected lo:hi with lo < hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

impl Settings {
    /// Validate everything up front so no command starts on bad input.
    pub fn resolve(o: Options) -> CliResult<Settings> {
        let mirror = MirrorParams::new(
            o.mu0.unwrap_or(1.0),
            o.chi0.unwrap_or(0.0),
            o.lambda0.unwrap_or(0.0),
            o.epsilon.unwrap_or(DEFAULT_EPSILON),
        )?;
        let drive = DriveProfile::new(
            o.omega0.unwrap_or(1.0),
            o.tau.unwrap_or(DEFAULT_TAU),
            o.monochromatic.unwrap_or(false),
        )?;
        let rel_tol = o.rel_tol.unwrap_or(DEFAULT_REL_TOL);
        if !rel_tol.is_finite() || rel_tol < 0.0 {
            return Err(CliError::Invalid(format!("rel_tol = {rel_tol} must be finite and >= 0")));
        }
        let grid_chi0: AxisRange = o.grid_chi0.as_deref().unwrap_or(DEFAULT_GRID_CHI0).parse()?;
        let grid_lambda0: AxisRange = o.grid_lambda0.as_deref().unwrap_or(DEFAULT_GRID_LAMBDA0).parse()?;
        let levels = o.levels.unwrap_or_default();
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(CliError::Invalid("levels must be finite".into()));
        }
        if let Some(ws) = &o.omega {
            if ws.is_empty() || ws.iter().any(|w| !w.is_finite()) {
                return Err(CliError::Invalid("omega list must be non-empty and finite".into()));
            }
        }
        let points = o.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(CliError::Invalid(format!("points = {points} must be >= 2")));
        }
        if let Some(w) = o.omega_max {
            if !w.is_finite() || w <= 0.0 {
                return Err(CliError::Invalid(format!("omega_max = {w} must be finite and > 0")));
            }
        }
        let bracket = match &o.bracket {
            Some(s) => parse_bracket(s)?,
            None => DEFAULT_BRACKET,
        };
        let omega0_tau = o.omega0_tau.unwrap_or_else(|| DEFAULT_OMEGA0_TAU.to_vec());
        if omega0_tau.is_empty() || omega0_tau.iter().any(|q| !q.is_finite() || *q <= 0.0) {
            return Err(CliError::Invalid("omega0_tau values must be finite and > 0".into()));
        }
        if o.threads == Some(0) {
            return Err(CliError::Invalid("threads must be >= 1".into()));
        }
        let emit_plot_script = o.emit_plot_script.unwrap_or(false);
        if emit_plot_script && o.out.is_none() {
            return Err(CliError::Invalid("--emit-plot-script needs --out".into()));
        }
        Ok(Settings {
            mirror,
            drive,
            rel_tol,
            grid_chi0,
            grid_lambda0,
            kind: o.kind.unwrap_or(KindArg::Rate).into(),
            levels,
            omega: o.omega,
            points,
            omega_max: o.omega_max,
            bracket,
            omega0_tau,
            format: o.format,
            out: o.out,
            emit_plot_script,
            threads: o.threads,
        })
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_override_defaults() {
        let file = Options::from_toml("mu0 = 2.0\nchi0 = 3.0\nmonochromatic = true\n").unwrap();
        let flags = Options {
            mu0: Some(5.0),
            ..Options::default()
        };
        let s = Settings::resolve(flags.over(file)).unwrap();
        assert_eq!(s.mirror.mu0(), 5.0);
        assert_eq!(s.mirror.chi0(), 3.0);
        assert_eq!(s.mirror.lambda0(), 0.0);
        assert!(s.drive.is_monochromatic());
        assert_eq!(s.rel_tol, DEFAULT_REL_TOL);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(matches!(Options::from_toml("mu_0 = 1.0"), Err(CliError::Invalid(_))));
        assert!(matches!(Options::from_toml("mu0 = \"x\""), Err(CliError::Invalid(_))));
        let o = Options::from_toml("format = \"json\"\nlevels = [1.0, 1.5]\ngrid_chi0 = \"0:5:11\"").unwrap();
        let s = Settings::resolve(o).unwrap();
        assert_eq!(s.format, Some(Format::Json));
        assert_eq!(s.levels, vec![1.0, 1.5]);
        assert_eq!(s.grid_chi0.count, 11);
    }

    #[test]
    fn validation_maps_to_exit_2() {
        let bad = |o: Options| Settings::resolve(o).unwrap_err().exit_code();
        assert_eq!(bad(Options { mu0: Some(-1.0), ..Default::default() }), 2);
        assert_eq!(bad(Options { epsilon: Some(0.5), ..Default::default() }), 2);
        assert_eq!(bad(Options { rel_tol: Some(-1.0), ..Default::default() }), 2);
        assert_eq!(bad(Options { bracket: Some("3:1".into()), ..Default::default() }), 2);
        assert_eq!(bad(Options { grid_chi0: Some("0:1".into()), ..Default::default() }), 2);
        assert_eq!(bad(Options { threads: Some(0), ..Default::default() }), 2);
        assert_eq!(bad(Options { emit_plot_script: Some(true), ..Default::default() }), 2);
    }
}
