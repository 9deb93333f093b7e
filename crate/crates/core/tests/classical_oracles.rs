//! Classical functions and the quadrature rules against MPFR and closed forms.

use std::f64::consts::PI;

use psi_special::classical::{
    beta, chaudhry_beta_p, chaudhry_gamma_p, gamma, gauss_2f1, kummer_1f1, log_gamma, pochhammer, HypParams,
};
use psi_special::quadrature::{integrate_half_line, integrate_product_2d, integrate_unit};
use psi_special::EvalPolicy;
use rug::Float;

const BITS: u32 = 512;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn mp(x: f64) -> Float {
    Float::with_val(BITS, x)
}

/// Hypergeometric series with coefficient ratio `(a+n)(b+n)/((c+n)(n+1))` at 512 bits.
fn mp_hyp(a: Option<f64>, b: f64, c: f64, z: f64) -> f64 {
    let mut term = mp(1.0);
    let mut sum = mp(0.0);
    for n in 0..5000u32 {
        sum += &term;
        let nf = f64::from(n);
        let num = a.map_or(mp(1.0), |a| mp(a + nf)) * mp(b + nf) * z;
        term *= num;
        term /= mp(c + nf) * mp(nf + 1.0);
        if term.clone().abs() < 1e-40 && n > 10 {
            break;
        }
    }
    sum.to_f64()
}

#[test]
fn gamma_family_matches_mpfr() {
    for x in [0.1, 0.5, 1.0, 1.5, 2.5, 3.7, 10.25, 30.5, 120.0] {
        assert!(rel(gamma(x).unwrap(), mp(x).gamma().to_f64()) < 1e-13, "gamma({x})");
    }
    for x in [0.3, 2.0, 50.0, 700.0, 1e5] {
        let want = mp(x).ln_gamma().to_f64();
        assert!((log_gamma(x).unwrap() - want).abs() <= 1e-13 * want.abs().max(1.0), "log_gamma({x})");
    }
    for (x, y) in [(0.5, 0.5), (2.0, 3.0), (1.3, 7.9), (12.0, 0.25)] {
        let want = (mp(x).ln_gamma() + mp(y).ln_gamma() - mp(x + y).ln_gamma()).exp().to_f64();
        assert!(rel(beta(x, y).unwrap(), want) < 1e-13, "beta({x},{y})");
    }
    assert!(gamma(0.0).is_err() && gamma(-0.5).is_err());
    assert_eq!(pochhammer(3.0, 4), 360.0);
    assert_eq!(pochhammer(0.5, 0), 1.0);
}

#[test]
fn gauss_and_kummer_match_mpfr_series() {
    let pol = EvalPolicy::default();
    for (a, b, c, z) in [
        (0.5, 1.5, 2.5, 0.3),
        (1.0, 2.0, 3.5, -0.7),
        (2.5, 0.75, 4.0, 0.9),
        (1.2, 2.1, 3.3, -0.45),
        (0.3, 3.0, 3.5, 0.95),
    ] {
        let got = gauss_2f1(HypParams::new(a, b, c).unwrap(), z, &pol).unwrap();
        assert!(rel(got.value, mp_hyp(Some(a), b, c, z)) < 1e-11, "2F1({a},{b};{c};{z})");
    }
    let z = 0.6;
    let log = gauss_2f1(HypParams::new(1.0, 1.0, 2.0).unwrap(), z, &pol).unwrap();
    assert!(rel(log.value, -(1.0f64 - z).ln() / z) < 1e-12);

    for (b, c, z) in [(0.5, 1.5, 2.0), (1.0, 3.0, -5.0), (2.5, 4.0, 12.0), (1.5, 2.5, -30.0)] {
        let got = kummer_1f1(b, c, z, &pol).unwrap();
        assert!(rel(got.value, mp_hyp(None, b, c, z)) < 1e-10, "1F1({b};{c};{z})");
    }
    let e = kummer_1f1(1.0, 2.0, 1.0, &pol).unwrap();
    let err = (e.value - (1f64.exp() - 1.0)).abs();
    assert!(err <= pol.target_for(e.value) && err <= 10.0 * e.abs_err_est, "{}", e.value);
}

#[test]
fn extended_gamma_at_one_half() {
    let pol = EvalPolicy::default();
    for p in [0.0, 0.1, 1.0, 2.5, 9.0] {
        let got = chaudhry_gamma_p(p, 0.5, &pol).unwrap();
        assert!(rel(got.value, PI.sqrt() * (-2.0 * p.sqrt()).exp()) < 1e-11, "p = {p}");
    }
    for (x, y) in [(0.7, 2.1), (3.0, 1.4)] {
        let b0 = chaudhry_beta_p(0.0, x, y, &pol).unwrap();
        assert!(rel(b0.value, beta(x, y).unwrap()) < 1e-11);
        let pxy = chaudhry_beta_p(0.6, x, y, &pol).unwrap();
        let pyx = chaudhry_beta_p(0.6, y, x, &pol).unwrap();
        assert!(rel(pxy.value, pyx.value) < 1e-11);
        assert!(pxy.value < b0.value);
    }
    assert!(chaudhry_gamma_p(-1.0, 1.0, &pol).is_err());
}

#[test]
fn quadrature_rules_meet_known_integrals() {
    let pol = EvalPolicy::default();
    let q = integrate_unit(|t| t.powf(-0.5) * (1.0 - t).powf(1.5), &pol).unwrap();
    assert!(rel(q.value, beta(0.5, 2.5).unwrap()) < 1e-12);
    let q = integrate_half_line(|t| t.powf(2.2) * (-t).exp(), &pol).unwrap();
    assert!(rel(q.value, gamma(3.2).unwrap()) < 1e-12);
    let q = integrate_half_line(|t| 1.0 / (1.0 + t * t), &pol).unwrap();
    assert!(rel(q.value, PI / 2.0) < 1e-12);
    // ∫∫ e^{-r²} r dr dθ over the quarter plane is π/4
    let q = integrate_product_2d(|_, _, r| (-r * r).exp() * r, &pol).unwrap();
    assert!(rel(q.value, PI / 4.0) < 1e-10);
    // a bump away from the origin must not be cut off
    let q = integrate_product_2d(|c, _, r| c * (-(r - 6.0).powi(2)).exp(), &pol).unwrap();
    assert!(rel(q.value, PI.sqrt() * 0.5 * (1.0 + libm_erf(6.0))) < 1e-9);
}

fn libm_erf(x: f64) -> f64 {
    mp(x).erf().to_f64()
}
