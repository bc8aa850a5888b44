use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use sdqsim_core::squid_diode::*;
use sdqsim_core::SquidConfig64;

/// Dense scan of `f` over `[a, a + 2π)` followed by golden-section
/// refinement of the best point; returns `(argmax, max, raw grid max)`.
fn grid_golden_max(f: impl Fn(f64) -> f64, a: f64, n: usize) -> (f64, f64, f64) {
    let h = TAU / n as f64;
    let (mut bx, mut bv) = (a, f64::NEG_INFINITY);
    for i in 0..n {
        let x = a + h * i as f64;
        let v = f(x);
        if v > bv {
            bx = x;
            bv = v;
        }
    }
    let raw = bv;
    let (mut lo, mut hi) = (bx - h, bx + h);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - r * (hi - lo);
        let x2 = lo + r * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x), raw)
}

#[test]
fn phi_min_matches_dense_grid_oracle() {
    let s = SquidConfig64::new(0.9, 0.5, FRAC_PI_2);
    let u = |p: f64| squid_potential(&s, p);
    let (x0, _, _) = grid_golden_max(|p| -u(p), -PI, 100_000);
    // bisect the sign of a central-difference slope; golden section alone
    // stalls at sqrt(eps) on a quadratic minimum
    let slope = |p: f64| (u(p + 1e-5) - u(p - 1e-5)) / 2e-5;
    let (mut lo, mut hi) = (x0 - 1e-4, x0 + 1e-4);
    assert!(slope(lo) < 0.0 && slope(hi) > 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let m = find_phi_min(&s);
    assert!((m.phi - x).abs() < 1e-9, "{} vs {}", m.phi, x);
    let d = squid_derivatives(&s, m.phi);
    assert!(d[1].abs() <= 1e-10);
    assert!(d[2] > 0.0);
}

#[test]
fn critical_currents_match_dense_grid_oracle() {
    let s = SquidConfig64::new(0.9, 0.5, FRAC_PI_2);
    let n = 100_000;
    let (_, max, raw_max) = grid_golden_max(|p| squid_cpr(&s, p), 0.0, n);
    let (_, neg_min, raw_neg_min) = grid_golden_max(|p| -squid_cpr(&s, p), 0.0, n);
    let (ip, im) = critical_currents(&s);
    assert!((ip - max).abs() < 1e-10);
    assert!((im - neg_min).abs() < 1e-10);
    // the refined optimum can only exceed the raw grid, by at most the
    // curvature times half a grid step squared
    let h = TAU / n as f64;
    assert!(ip >= raw_max && ip - raw_max < 10.0 * h * h);
    assert!(im >= raw_neg_min && im - raw_neg_min < 10.0 * h * h);
    assert!(ip > im);
}

#[test]
fn squid_potential_reference_value() {
    let s = SquidConfig64::new(0.9, 0.5, FRAC_PI_2);
    let direct = -(1.0 - 0.9 * (0.5f64).sin().powi(2)).sqrt()
        - (1.0 - 0.5 * ((1.0 - FRAC_PI_2) / 2.0).sin().powi(2)).sqrt();
    assert!((squid_potential(&s, 1.0) - direct).abs() < 1e-15);
}

#[test]
fn cpr_matches_potential_slope() {
    let j = JunctionParams::new(0.9);
    let h = 1e-3;
    let u = |p: f64| junction_potential(&j, p);
    let fd = (-u(FRAC_PI_2 + 2.0 * h) + 8.0 * u(FRAC_PI_2 + h) - 8.0 * u(FRAC_PI_2 - h) + u(FRAC_PI_2 - 2.0 * h))
        / (12.0 * h);
    // current in units of eΔ/2ħ is four times the phase derivative of the
    // Andreev energy in units of Δ
    assert!((junction_cpr(&j, FRAC_PI_2, 0.0) - 4.0 * fd).abs() <= 1e-8);
}

#[test]
fn c3_odd_on_twenty_point_grid() {
    for i in 0..20 {
        let b = -3.0 + 6.0 * (i as f64 + 0.5) / 20.0;
        let sp = SquidConfig64::new(0.9, 0.6, b);
        let sm = SquidConfig64::new(0.9, 0.6, -b);
        let cp = taylor_coefficients(&sp, find_phi_min(&sp).phi)[2];
        let cm = taylor_coefficients(&sm, find_phi_min(&sm).phi)[2];
        assert!((cp + cm).abs() <= 1e-10, "b={b}: {cp} {cm}");
    }
}

#[test]
fn symmetric_squid_is_reciprocal_everywhere() {
    for i in 0..15 {
        let b = -3.0 + 6.0 * i as f64 / 14.0;
        let s = SquidConfig64::new(0.7, 0.7, b);
        let c = characterize(&s).unwrap();
        assert!(c.eta <= 1e-10, "b={b} eta={}", c.eta);
        assert!(c.c[2].abs() <= 1e-10, "b={b} c3={}", c.c[2]);
    }
}

fn fd4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cpr_is_odd(tau in 0.0f64..=1.0, phi in -PI..PI, t in 0.0f64..0.5) {
        let j = JunctionParams::new(tau);
        prop_assert!((junction_cpr(&j, phi, t) + junction_cpr(&j, -phi, t)).abs() < 1e-14);
    }

    #[test]
    fn potential_is_periodic(t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0, b in -PI..PI, phi in -10.0f64..10.0) {
        let s = SquidConfig64::new(t1, t2, b);
        prop_assert!((squid_potential(&s, phi + TAU) - squid_potential(&s, phi)).abs() <= 1e-12);
    }

    #[test]
    fn analytic_derivatives_match_fd(t1 in 0.05f64..0.98, t2 in 0.05f64..0.98, b in -PI..PI, phi in -PI..PI) {
        let s = SquidConfig64::new(t1, t2, b);
        let d = squid_derivatives(&s, phi);
        for k in 1..5 {
            let num = fd4(|p| squid_derivatives(&s, p)[k - 1], phi, 1e-4);
            let scale = d[k].abs().max(1e-2);
            prop_assert!((num - d[k]).abs() / scale <= 1e-6, "k={} {} vs {}", k, num, d[k]);
        }
    }

    #[test]
    fn efficiency_in_unit_interval(a in 1e-6f64..10.0, b in 1e-6f64..10.0) {
        let e = diode_efficiency(a, b).unwrap();
        prop_assert!((0.0..1.0).contains(&e));
        prop_assert_eq!(e, diode_efficiency(b, a).unwrap());
    }

    #[test]
    fn phi_min_is_stationary_minimum(t1 in 0.05f64..0.98, t2 in 0.05f64..0.98, b in -3.0f64..3.0) {
        let s = SquidConfig64::new(t1, t2, b);
        let m = find_phi_min(&s);
        let d = squid_derivatives(&s, m.phi);
        prop_assert!(d[1].abs() <= 1e-10);
        prop_assert!(d[2] > 0.0);
        prop_assert!((-PI..PI).contains(&m.phi));
    }
}
