//! The Wright evaluator against brute-force MPFR summation and closed forms.

use psi_special::classical::bessel_j;
use psi_special::wright::{
    cancellation_horizon, peak_term_magnitude, required_digits, wright_eval, wright_series, WrightParams,
};
use psi_special::{EvalPolicy, NumError};
use rug::ops::Pow;
use rug::Float;

const ORACLE_BITS: u32 = 2048;

/// `Σ zⁿ / (n! Γ(αn + β))` summed term by term in 2048-bit arithmetic.
fn brute_wright(alpha: f64, beta: f64, z: f64) -> f64 {
    let zf = Float::with_val(ORACLE_BITS, z);
    let mut sum = Float::with_val(ORACLE_BITS, 0);
    let mut fact = Float::with_val(ORACLE_BITS, 1);
    let mut small_run = 0;
    for n in 0..20_000u32 {
        if n > 0 {
            fact *= n;
        }
        let arg = Float::with_val(ORACLE_BITS, alpha) * n + beta;
        let term = Float::with_val(ORACLE_BITS, zf.clone().pow(n)) / (fact.clone() * arg.gamma());
        let tiny = term.clone().abs() < Float::with_val(ORACLE_BITS, 1e-60);
        sum += &term;
        small_run = if tiny { small_run + 1 } else { 0 };
        if small_run > 5 && f64::from(n) > z.abs() {
            break;
        }
    }
    sum.to_f64()
}

fn params(a: f64, b: f64) -> WrightParams {
    WrightParams::new(a, b).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn matches_brute_force_and_error_estimate_is_honest() {
    let pol = EvalPolicy::default();
    let cases = [
        (0.5, 2.0, -10.0),
        (0.25, 1.5, -40.0),
        (1.0, 2.0, -4.0),
        (2.0, 3.0, -5.0),
        (0.75, 3.0, 7.5),
        (1.5, 2.5, -60.0),
        (0.37, 2.0, -20.0),
        (0.5, 4.0, -150.0),
        (3.0, 9.0, 30.0),
    ];
    for (a, b, z) in cases {
        let got = wright_eval(params(a, b), z, &pol).unwrap();
        let want = brute_wright(a, b, z);
        let err = (got.value - want).abs();
        assert!(got.converged);
        assert!(err <= 10.0 * got.abs_err_est.max(f64::MIN_POSITIVE), "({a},{b},{z}): err {err:e} vs est {:e}", got.abs_err_est);
        assert!(err <= pol.target_for(want) * 10.0, "({a},{b},{z}): {} vs {want}", got.value);
    }
}

#[test]
fn exponential_reduction_through_the_series() {
    // the series path on its own, at an argument that cancels 26 digits
    let tight = EvalPolicy::default().with_tolerances(1e-24, 1e-14);
    let got = wright_series(params(0.0, 2.0), -30.0, &tight).unwrap();
    assert!(rel(got.value, (-30f64).exp()) < 1e-8, "{}", got.value);
    assert!(got.precision_digits_used > 30);
    for z in [-5.0, -1.0, 0.0, 2.0] {
        let g = wright_eval(params(0.0, 2.5), z, &EvalPolicy::default()).unwrap();
        let want = z.exp() / 1.329_340_388_179_137;
        assert!((g.value - want).abs() <= 1e-10 * want.max(1.0));
    }
}

#[test]
fn naive_summation_loses_the_answer() {
    let mut sum = 0.0f64;
    let mut term = 1.0f64;
    for n in 0..200 {
        sum += term;
        term *= -30.0 / f64::from(n + 1);
    }
    assert!(rel(sum, (-30f64).exp()) > 1e-3);
}

/// `Σ (-v)ⁿ / (n! (n+ν)!)`, the Bessel series, at 2048 bits.
fn brute_bessel(order: u32, x: f64) -> f64 {
    let q = Float::with_val(ORACLE_BITS, x * x / 4.0);
    let mut sum = Float::with_val(ORACLE_BITS, 0);
    let mut term = Float::with_val(ORACLE_BITS, 1);
    for k in 1..=order {
        term /= k;
    }
    for n in 0..400u32 {
        sum += &term;
        term *= -q.clone();
        term /= n + 1;
        term /= n + 1 + order;
    }
    (sum * Float::with_val(ORACLE_BITS, x / 2.0).pow(order)).to_f64()
}

#[test]
fn bessel_oracle_and_identities() {
    for x in [0.5, 2.0, 10.0, 30.0] {
        for order in [0, 1] {
            let got = bessel_j(order, x).unwrap();
            assert!((got - brute_bessel(order, x)).abs() < 1e-14, "J{order}({x})");
        }
    }
    let pol = EvalPolicy::default();
    for v in [1.0f64, 4.0, 25.0] {
        let j0 = wright_eval(WrightParams::series_only(1.0, 1.0).unwrap(), -v, &pol).unwrap();
        assert!(rel(j0.value, bessel_j(0, 2.0 * v.sqrt()).unwrap()) < 1e-10);
        let j1 = wright_eval(params(1.0, 2.0), -v, &pol).unwrap();
        assert!(rel(j1.value, bessel_j(1, 2.0 * v.sqrt()).unwrap() / v.sqrt()) < 1e-10);
    }
    // only the bare series accepts β ≤ 1
    assert!(WrightParams::new(1.0, 1.0).is_err());
    assert!(WrightParams::series_only(1.0, 0.0).is_err());
}

fn scan_peak(a: f64, b: f64, z: f64) -> f64 {
    (0..2000)
        .map(|n| {
            let n = f64::from(n);
            let arg = Float::with_val(256, a * n + b);
            let fact = Float::with_val(256, n + 1.0).ln_gamma();
            (n * z.abs().ln() - fact.to_f64() - arg.ln_gamma().to_f64()).exp()
        })
        .fold(0.0, f64::max)
}

#[test]
fn peak_and_digits() {
    assert!(rel(peak_term_magnitude(params(0.0, 2.0), 0.0).unwrap(), 1.0) < 1e-14);
    for (a, b, z) in [(0.0, 2.0, -30.0), (1.0, 2.0, -4.0), (2.0, 3.0, -5.0), (0.5, 1.5, -200.0)] {
        let got = peak_term_magnitude(params(a, b), z).unwrap();
        assert!(rel(got, scan_peak(a, b, z)) < 1e-12, "({a},{b},{z}) {got}");
    }
    let pol = |tol: f64| EvalPolicy::default().with_tolerances(tol, 1e-12);
    assert_eq!(required_digits(params(0.0, 2.0), 0.0, &pol(1e-12)).unwrap(), 16);
    let peak = peak_term_magnitude(params(0.0, 2.0), -30.0).unwrap();
    let d = required_digits(params(0.0, 2.0), -30.0, &pol(1e-12)).unwrap();
    assert!(f64::from(d) >= peak.log10() + 22.0);
    let peak = scan_peak(2.0, 3.0, -5.0);
    let d = required_digits(params(2.0, 3.0), -5.0, &pol(1e-10)).unwrap();
    assert_eq!(d, (((peak / 1e-10).log10().ceil()) as u32 + 10).max(16));
}

#[test]
fn horizon_bounds_the_budget() {
    let pol = EvalPolicy::default();
    let w = params(0.5, 2.0);
    let h = cancellation_horizon(w, &pol);
    assert!(h.is_finite() && h > 100.0);
    assert!(required_digits(w, -h, &pol).unwrap() <= pol.max_precision_digits);
    assert!(required_digits(w, -1.01 * h, &pol).unwrap() > pol.max_precision_digits);
    assert!(cancellation_horizon(params(0.0, 2.0), &pol).is_infinite());
    match wright_eval(w, -10.0 * h, &pol) {
        Err(NumError::Convergence { partial, .. }) => assert!(!partial.converged),
        other => panic!("expected a convergence error, got {other:?}"),
    }
}
