use std::f64::consts::PI;

use dce_core::drive::{self, f_time};
use dce_core::quadrature;
use dce_core::spectrum::{spectrum_general, spectrum_monochromatic, spectrum_via_reflection_form};
use dce_core::sweep::{self, find_peak, normalized_rate_at, AxisRange, FixedParams};
use dce_core::totals::{normalized_rate, total_number};
use dce_core::{DriveProfile, MirrorParams, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};

// closed form written out independently of the library
fn upsilon(mu0: f64, chi0: f64, lambda0: f64, w: f64) -> f64 {
    let a = mu0 - chi0 * w * w;
    let b = w * (1.0 + lambda0 * lambda0);
    mu0 * w / (a * a + b * b)
}

fn monochromatic_closed_form(mu0: f64, chi0: f64, lambda0: f64, eps: f64, w0: f64, sign: f64, w: f64) -> f64 {
    if w >= w0 {
        return 0.0;
    }
    let g = (1.0 + sign * lambda0).powi(2);
    eps * eps * g * (1.0 + lambda0 * lambda0) / (4.0 * PI)
        * upsilon(mu0, chi0, lambda0, w)
        * upsilon(mu0, chi0, lambda0, w0 - w)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn lorentzian_area_approaches_pi() {
    // ∫ f̃² dω / τ = π + π/(1 + (ω₀τ)²) for the Lorentzian pair
    let mut last = f64::INFINITY;
    for q in [10.0, 100.0, 1000.0] {
        let d = DriveProfile::exact(1.0, q).unwrap();
        let f = |w: f64| drive::f_tilde_sq(&d, w).unwrap();
        let s = d.decay_frequency(1e-16);
        let pts = [-s, -1.0 - 1.0 / q, -1.0, -1.0 + 1.0 / q, 0.0, 1.0 - 1.0 / q, 1.0, 1.0 + 1.0 / q, s];
        let area = quadrature::integrate_with_breakpoints(f, &pts, 1e-12, 200_000)
            .unwrap()
            .into_result()
            .unwrap()
            / d.tau();
        let exact = PI + PI / (1.0 + q * q);
        // tails beyond ±s carry about 2·(2/π)·1e-8 of the area
        assert!(rel(area, exact) < 1e-7, "q={q}: {area} vs {exact}");
        let dev = (area - PI).abs();
        assert!(dev < last);
        last = dev;
    }
}

#[test]
fn fft_of_time_profile_matches_transform() {
    let d = DriveProfile::exact(1.0, 50.0).unwrap();
    let dt = 0.05;
    let n: usize = 1 << 17;
    let t0 = -(n as f64) / 2.0 * dt;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::new(f_time(&d, t0 + k as f64 * dt), 0.0))
        .collect();
    // inverse transform carries the e^{+iωt} kernel
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let dw = 2.0 * PI / (n as f64 * dt);
    let mut checked = 0;
    for (k, v) in buf.iter().enumerate().take(n / 2) {
        let w = k as f64 * dw;
        if w > 3.0 {
            break;
        }
        let approx = (v * Complex::from_polar(dt, w * t0)).re;
        let exact = drive::f_tilde_exact(&d, w).unwrap().re;
        assert!(rel(approx, exact) < 0.01, "w={w}: {approx} vs {exact}");
        checked += 1;
    }
    assert!(checked > 1000);
}

#[test]
fn trapezoid_brute_force_total() {
    let (mu0, chi0, lambda0, eps, w0) = (1.0, 0.0, 0.0, 0.01, 1.0);
    let p = MirrorParams::new(mu0, chi0, lambda0, eps).unwrap();
    let d = DriveProfile::monochromatic(w0, 1.0).unwrap();
    let n = total_number(&p, &d, 1e-12).unwrap();
    let m = 10_000;
    let h = w0 / m as f64;
    let f = |w: f64| monochromatic_closed_form(mu0, chi0, lambda0, eps, w0, 1.0, w) + monochromatic_closed_form(mu0, chi0, lambda0, eps, w0, -1.0, w);
    let mut trap = 0.5 * (f(0.0) + f(w0 * (1.0 - 1e-300)));
    for k in 1..m {
        trap += f(k as f64 * h);
    }
    trap *= h;
    assert!(rel(n.total, trap) < 1e-6, "{} vs {trap}", n.total);
}

#[test]
fn closed_form_spectrum_matches_independent_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let (mu0, chi0, lambda0) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), rng.random_range(-2.0..2.0));
        let eps = rng.random_range(0.0..0.1);
        let w0 = rng.random_range(0.1..5.0);
        let w = rng.random_range(0.0..w0);
        let p = MirrorParams::new(mu0, chi0, lambda0, eps).unwrap();
        let d = DriveProfile::monochromatic(w0, 1.0).unwrap();
        for (side, sign) in [(Side::Plus, 1.0), (Side::Minus, -1.0)] {
            let got = spectrum_monochromatic(&p, &d, side, w).unwrap();
            let want = monochromatic_closed_form(mu0, chi0, lambda0, eps, w0, sign, w);
            assert!(got == want || rel(got, want) < 1e-13, "{got} vs {want}");
        }
    }
}

#[test]
fn exact_pulse_converges_to_monochromatic() {
    let p = MirrorParams::new(1.0, 0.5, 0.2, 0.01).unwrap();
    let mono = spectrum_monochromatic(&p, &DriveProfile::monochromatic(1.0, 1.0).unwrap(), Side::Plus, 0.5).unwrap();
    let dev = |q: f64| {
        let d = DriveProfile::exact(1.0, q).unwrap();
        rel(spectrum_general(&p, &d, Side::Plus, 0.5, 1e-10).unwrap(), mono)
    };
    let devs: Vec<f64> = [10.0, 100.0, 1000.0].into_iter().map(dev).collect();
    assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    assert!(dev(200.0) < 0.02);
}

#[test]
fn two_spectral_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = MirrorParams::new(
            rng.random_range(0.1..5.0),
            rng.random_range(0.0..5.0),
            rng.random_range(-1.5..1.5),
            0.05,
        )
        .unwrap();
        let d = DriveProfile::exact(1.0, 50.0).unwrap();
        let w = rng.random_range(0.05..1.2);
        for side in Side::BOTH {
            let a = spectrum_general(&p, &d, side, w, 1e-10).unwrap();
            let b = spectrum_via_reflection_form(&p, &d, side, w, 1e-10).unwrap();
            assert!(rel(a, b) < 1e-8 || (a == 0.0 && b == 0.0), "{a} vs {b}");
        }
    }
}

#[test]
fn dirichlet_suppression() {
    let d = DriveProfile::monochromatic(1.0, 1.0).unwrap();
    let n = |mu0, chi0| {
        let p = MirrorParams::new(mu0, chi0, 0.0, 0.01).unwrap();
        spectrum_monochromatic(&p, &d, Side::Plus, 0.5).unwrap()
    };
    assert!(n(1e3, 0.0) / n(1.0, 0.0) < 1e-4);
    assert!(n(1.0, 1e3) / n(1.0, 0.0) < 1e-4);
}

#[test]
fn normalized_rate_is_epsilon_independent() {
    let d = DriveProfile::monochromatic(1.0, 1.0).unwrap();
    let a = normalized_rate(&MirrorParams::new(1.0, 2.0, 0.4, 1e-2).unwrap(), &d, 1e-12).unwrap();
    let b = normalized_rate(&MirrorParams::new(1.0, 2.0, 0.4, 1e-3).unwrap(), &d, 1e-12).unwrap();
    assert!(rel(a, b) < 1e-10);
}

#[test]
fn lambda_parity_of_totals() {
    let d = DriveProfile::exact(1.0, 20.0).unwrap();
    let p = MirrorParams::new(1.0, 1.5, 0.6, 0.01).unwrap();
    let a = total_number(&p, &d, 1e-9).unwrap();
    let b = total_number(&p.with_lambda0(-0.6).unwrap(), &d, 1e-9).unwrap();
    assert!(rel(a.total, b.total) < 1e-10);
    assert!(rel(a.minus, b.plus) < 1e-10);
}

#[test]
fn peak_on_symmetric_axis() {
    let peak = find_peak(1.0, 1.0, 0.0, (0.5, 10.0), 1e-10).unwrap();
    assert!((3.0..=4.5).contains(&peak.chi0_star), "{peak:?}");
    let fixed = FixedParams::new(1.0, 1.0).unwrap();
    for dx in [-0.1, 0.1] {
        assert!(normalized_rate_at(fixed, peak.chi0_star + dx, 0.0, 1e-10).unwrap() <= peak.value);
    }
    let off = find_peak(1.0, 1.0, 0.5, (0.5, 10.0), 1e-10).unwrap();
    assert!(off.value <= peak.value);
}

#[test]
fn level_curve_points_lie_on_the_level() {
    let grid = sweep::sweep_ratio_to_perfect(
        1.0,
        1.0,
        AxisRange::new(0.0, 10.0, 21).unwrap(),
        AxisRange::new(-1.0, 1.0, 21).unwrap(),
        1e-10,
    )
    .unwrap();
    assert!(grid.min_max().1 > 1.0);
    let curves = sweep::extract_level_curve(&grid, 1.0).unwrap();
    assert!(curves.iter().any(|c| c.points.iter().any(|&(_, l)| l != 1.0)));
    for c in &curves {
        for &(x, l) in &c.points {
            let v = grid.evaluate(x, l).unwrap();
            assert!(rel(v, 1.0) < 1e-4, "({x}, {l}) -> {v}");
        }
    }
}

#[test]
fn rate_grid_is_parity_exact() {
    let grid = sweep::sweep_normalized_rate(
        1.0,
        1.0,
        AxisRange::new(0.0, 6.0, 7).unwrap(),
        AxisRange::new(-1.0, 1.0, 9).unwrap(),
        1e-10,
    )
    .unwrap();
    let (nx, ny) = grid.shape();
    for i in 0..nx {
        for j in 0..ny {
            assert_eq!(grid.value(i, j), grid.value(i, ny - 1 - j));
        }
    }
}
