//! Invariant battery behind `dce verify`.
//!
//! Each check returns a pass/fail outcome with a one-line detail, or the
//! numerical error that stopped it (for instance a quadrature that cannot
//! meet an injected tolerance of zero).

use dce_core::scattering::{self, Mat2};
use dce_core::spectrum::{self, spectrum_general, spectrum_monochromatic, spectrum_via_reflection_form};
use dce_core::totals::{normalized_rate, total_energy, total_number};
use dce_core::{ComplexAmplitude, DriveProfile, MirrorParams, Result, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Settings;

pub const UNITARITY_DRAWS: usize = 10_000;
pub const MATCHING_DRAWS: usize = 1_000;
pub const FORM_POINTS: usize = 100;
pub const RANDOM_SETS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one named check.
pub type Outcome = (&'static str, Result<Check>);

fn check(name: &'static str, passed: bool, detail: String) -> Result<Check> {
    Ok(Check { name, passed, detail })
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn random_mirror(rng: &mut ChaCha8Rng, epsilon: f64) -> MirrorParams {
    MirrorParams::new(
        rng.random_range(0.0..=10.0),
        rng.random_range(0.0..=10.0),
        rng.random_range(-2.0..=2.0),
        epsilon,
    )
    .expect("ranges are valid")
}

fn positive_frequency(rng: &mut ChaCha8Rng, max: f64) -> f64 {
    // (0, max]
    max - rng.random_range(0.0..max)
}

pub fn unitarity() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_energy, mut worst_matrix) = (0.0f64, 0.0f64);
    for _ in 0..UNITARITY_DRAWS {
        let p = random_mirror(&mut rng, 0.0);
        let w = positive_frequency(&mut rng, 10.0);
        let s = scattering::scattering_matrix(&p, w)?;
        for row in 0..2 {
            let e = s[(row, 0)].norm_sqr() + s[(row, 1)].norm_sqr();
            worst_energy = worst_energy.max((e - 1.0).abs());
        }
        worst_matrix = worst_matrix.max((s * s.adjoint()).max_abs_diff(&Mat2::identity()));
    }
    check(
        "unitarity",
        worst_energy < 1e-12 && worst_matrix < 1e-12,
        format!("{UNITARITY_DRAWS} draws, max ||s|^2+|r|^2-1| = {worst_energy:.2e}, max |SS^+-I| = {worst_matrix:.2e}"),
    )
}

pub fn matching_residuals() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..MATCHING_DRAWS {
        let p = random_mirror(&mut rng, 0.0);
        let w = positive_frequency(&mut rng, 10.0);
        let mut amp = || ComplexAmplitude::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let incoming = [amp(), amp()];
        let scale = incoming[0].norm().max(incoming[1].norm());
        worst = worst.max(scattering::matching_residual(&p, w, incoming)? / scale);
    }
    check(
        "matching residuals",
        worst < 1e-12,
        format!("{MATCHING_DRAWS} draws, max residual/amplitude = {worst:.2e}"),
    )
}

pub fn form_equivalence(omega0: f64, rel_tol: f64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = DriveProfile::exact(omega0, 50.0 / omega0)?;
    let mut worst = 0.0f64;
    for _ in 0..FORM_POINTS {
        let p = MirrorParams::new(
            rng.random_range(0.1..=10.0),
            rng.random_range(0.0..=10.0),
            rng.random_range(-2.0..=2.0),
            0.05,
        )?;
        let w = positive_frequency(&mut rng, 2.0 * omega0);
        let side = if rng.random_bool(0.5) { Side::Plus } else { Side::Minus };
        let a = spectrum_general(&p, &d, side, w, rel_tol)?;
        let b = spectrum_via_reflection_form(&p, &d, side, w, rel_tol)?;
        worst = worst.max(rel_diff(a, b));
    }
    check(
        "form equivalence",
        worst < 1e-8,
        format!("{FORM_POINTS} points at omega0*tau = 50, max relative difference = {worst:.2e}"),
    )
}

pub const FACTOR_LAMBDAS: [f64; 5] = [-0.9, -0.5, 0.0, 1.0 / 3.0, 0.9];

pub fn global_factor(base: &MirrorParams, omega0: f64, rel_tol: f64) -> Result<Check> {
    let base = base.with_mu0(base.mu0().max(0.1))?.with_epsilon(0.01)?;
    let mono = DriveProfile::monochromatic(omega0, 1.0)?;
    let pulse = DriveProfile::exact(omega0, 50.0 / omega0)?;
    let (mut closed, mut quad) = (0.0f64, 0.0f64);
    let mut third = f64::NAN;
    for l in FACTOR_LAMBDAS {
        let p = base.with_lambda0(l)?;
        let want = ((1.0 - l) / (1.0 + l)).powi(2);
        let w = omega0 / 3.0;
        let ratio = spectrum_monochromatic(&p, &mono, Side::Minus, w)? / spectrum_monochromatic(&p, &mono, Side::Plus, w)?;
        closed = closed.max(rel_diff(ratio, want));
        let w = 0.4 * omega0;
        let ratio = spectrum_general(&p, &pulse, Side::Minus, w, rel_tol)?
            / spectrum_general(&p, &pulse, Side::Plus, w, rel_tol)?;
        quad = quad.max(rel_diff(ratio, want));
        if l == 1.0 / 3.0 {
            third = spectrum::side_ratio(&p)?;
        }
    }
    check(
        "global factor",
        closed < 1e-14 && quad < 1e-10 && rel_diff(third, 0.25) < 1e-15,
        format!("closed form {closed:.2e}, quadrature {quad:.2e}, ratio at 1/3 = {third}"),
    )
}

pub fn symmetries(base: &MirrorParams, omega0: f64, rel_tol: f64) -> Result<Check> {
    let base = base.with_mu0(base.mu0().max(0.1))?.with_epsilon(0.01)?;
    let d = DriveProfile::monochromatic(omega0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut parity = 0.0f64;
    for _ in 0..RANDOM_SETS {
        let l = rng.random_range(-2.0..=2.0);
        let a = total_number(&base.with_lambda0(l)?, &d, rel_tol)?.total;
        let b = total_number(&base.with_lambda0(-l)?, &d, rel_tol)?.total;
        parity = parity.max(rel_diff(a, b));
    }
    let grid = spectrum::sample_spectrum(&base, &d, 201, rel_tol)?;
    let n = grid.samples.len();
    let mirrored = (0..n).all(|k| {
        let (a, b) = (grid.samples[k], grid.samples[n - 1 - k]);
        a.n_plus == b.n_plus && a.n_minus == b.n_minus && a.n_total == b.n_total
    });
    check(
        "symmetries",
        parity < 1e-10 && mirrored,
        format!("lambda0 parity {parity:.2e} over {RANDOM_SETS} draws, mirrored spectrum exact: {mirrored}"),
    )
}

pub fn energy_proportionality(rel_tol: f64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_SETS {
        let p = random_mirror(&mut rng, 0.01).with_mu0(rng.random_range(0.1..=10.0))?;
        let omega0 = rng.random_range(0.2..=5.0);
        let d = DriveProfile::monochromatic(omega0, 1.0)?;
        let n = total_number(&p, &d, rel_tol)?;
        let e = total_energy(&p, &d, rel_tol)?;
        worst = worst
            .max(rel_diff(e.plus, 0.5 * omega0 * n.plus))
            .max(rel_diff(e.minus, 0.5 * omega0 * n.minus));
    }
    check(
        "energy proportionality",
        worst < 1e-8,
        format!("{RANDOM_SETS} sets, max |E - omega0 N/2| relative = {worst:.2e}"),
    )
}

pub fn dirichlet_limits() -> Result<Check> {
    let d = DriveProfile::monochromatic(1.0, 1.0)?;
    let n = |mu0: f64, chi0: f64| -> Result<f64> {
        let p = MirrorParams::new(mu0, chi0, 0.0, 0.01)?;
        Ok(spectrum_monochromatic(&p, &d, Side::Plus, 0.5)? + spectrum_monochromatic(&p, &d, Side::Minus, 0.5)?)
    };
    let reference = n(1.0, 0.0)?;
    let by_mu = n(1e3, 0.0)? / reference;
    let by_chi = n(1.0, 1e3)? / reference;
    check(
        "dirichlet limits",
        by_mu < 1e-4 && by_chi < 1e-4,
        format!("N(mu0=1e3)/N(1) = {by_mu:.2e}, N(chi0=1e3)/N(0) = {by_chi:.2e}"),
    )
}

/// Relative deviation of the finite-pulse spectrum at `ω₀/2` from the
/// monochromatic closed form.
pub fn pulse_deviation(p: &MirrorParams, omega0: f64, quality: f64, rel_tol: f64) -> Result<f64> {
    let mono = DriveProfile::monochromatic(omega0, 1.0)?;
    let pulse = DriveProfile::exact(omega0, quality / omega0)?;
    let w = 0.5 * omega0;
    let limit = spectrum_monochromatic(p, &mono, Side::Plus, w)?;
    Ok(rel_diff(spectrum_general(p, &pulse, Side::Plus, w, rel_tol)?, limit))
}

pub fn monochromatic_convergence(base: &MirrorParams, omega0: f64, qualities: &[f64], rel_tol: f64) -> Result<Check> {
    let p = base.with_mu0(base.mu0().max(0.1))?.with_epsilon(0.01)?.with_lambda0(base.lambda0().clamp(-0.9, 0.9))?;
    let mut qs = qualities.to_vec();
    qs.sort_by(f64::total_cmp);
    let devs = qs
        .iter()
        .map(|&q| pulse_deviation(&p, omega0, q, rel_tol))
        .collect::<Result<Vec<_>>>()?;
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let at_200 = pulse_deviation(&p, omega0, 200.0, rel_tol)?;
    let listed = qs
        .iter()
        .zip(&devs)
        .map(|(q, d)| format!("{q}: {d:.3e}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(
        "monochromatic convergence",
        monotone && at_200 < 0.02,
        format!("deviation by omega0*tau {{{listed}}}, at 200: {at_200:.3e}"),
    )
}

pub fn epsilon_independence(base: &MirrorParams, omega0: f64, rel_tol: f64) -> Result<Check> {
    let base = base.with_mu0(base.mu0().max(0.1))?;
    let d = DriveProfile::monochromatic(omega0, 1.0)?;
    let a = normalized_rate(&base.with_epsilon(1e-2)?, &d, rel_tol)?;
    let b = normalized_rate(&base.with_epsilon(1e-3)?, &d, rel_tol)?;
    let diff = rel_diff(a, b);
    check(
        "epsilon independence",
        diff < 1e-10,
        format!("normalized rate {a:.12e} vs {b:.12e}, relative {diff:.2e}"),
    )
}

/// `total_number` against a 10⁴-point trapezoid rule on the closed-form spectrum.
pub fn trapezoid_oracle(rel_tol: f64) -> Result<Check> {
    let p = MirrorParams::new(1.0, 0.0, 0.0, 0.01)?;
    let d = DriveProfile::monochromatic(1.0, 1.0)?;
    let quad = total_number(&p, &d, rel_tol)?.total;
    let m = 10_000;
    let h = 1.0 / m as f64;
    let f = |w: f64| -> Result<f64> {
        Ok(spectrum_monochromatic(&p, &d, Side::Plus, w)? + spectrum_monochromatic(&p, &d, Side::Minus, w)?)
    };
    // the closed form vanishes at both ends of [0, ω₀]
    let mut sum = 0.0;
    for k in 1..m {
        sum += f(k as f64 * h)?;
    }
    let trap = sum * h;
    let diff = rel_diff(quad, trap);
    check(
        "trapezoid oracle",
        diff < 1e-6,
        format!("quadrature {quad:.12e}, trapezoid {trap:.12e}, relative {diff:.2e}"),
    )
}

/// Run the whole battery with the settings' mirror, drive frequency and tolerance.
pub fn battery(s: &Settings) -> Vec<Outcome> {
    let (p, w0, tol) = (&s.mirror, s.drive.omega0(), s.rel_tol);
    vec![
        ("unitarity", unitarity()),
        ("matching residuals", matching_residuals()),
        ("form equivalence", form_equivalence(w0, tol)),
        ("global factor", global_factor(p, w0, tol)),
        ("symmetries", symmetries(p, w0, tol)),
        ("energy proportionality", energy_proportionality(tol)),
        ("dirichlet limits", dirichlet_limits()),
        ("monochromatic convergence", monochromatic_convergence(p, w0, &s.omega0_tau, tol)),
        ("epsilon independence", epsilon_independence(p, w0, tol)),
        ("trapezoid oracle", trapezoid_oracle(tol)),
    ]
}

/// One line per outcome.
pub fn report(outcomes: &[Outcome]) -> String {
    let mut out = String::new();
    for (name, r) in outcomes {
        let line = match r {
            Ok(c) => format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail),
            Err(e) => format!("ERROR {name}: {e}\n"),
        };
        out.push_str(&line);
    }
    out
}
