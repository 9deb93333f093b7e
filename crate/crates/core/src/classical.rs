//! Classical special functions the Ψ family reduces to.
//!
//! These are reference implementations. None of them calls into the Wright
//! or Ψ code, so agreement between the two is a genuine cross-check.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{NumError, Result};
use crate::policy::{Approx, EvalPolicy};
use crate::quadrature::{integrate_half_line, integrate_unit_sampled, Sample};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(NumError::domain(format!("{name} requires a positive finite argument, got {x}")))
    }
}

/// Lanczos sum `A_g(x)` and shifted base `x + g - 1/2`, for `Γ(x) = √(2π) b^(x-1/2) e^-b A`.
fn lanczos(x: f64) -> (f64, f64) {
    let xm = x - 1.0;
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (xm + k as f64);
    }
    (a, xm + LANCZOS_G + 0.5)
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    check_positive("gamma", x)?;
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    let (a, b) = lanczos(x);
    // split the power so b^(x-1/2) does not overflow before e^-b brings it back
    let half = b.powf(0.5 * (x - 0.5));
    Ok((2.0 * std::f64::consts::PI).sqrt() * half * (half * (-b).exp()) * a)
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    if x < 0.5 {
        return Ok(log_gamma(x + 1.0)? - x.ln());
    }
    let (a, b) = lanczos(x);
    Ok(LN_SQRT_2PI + (x - 0.5) * b.ln() - b + a.ln())
}

/// `B(x, y) = Γ(x)Γ(y)/Γ(x+y)`, symmetric in its arguments by construction.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    check_positive("beta", x)?;
    check_positive("beta", y)?;
    if x + y < 150.0 {
        Ok(gamma(x)? * gamma(y)? / gamma(x + y)?)
    } else {
        Ok((log_gamma(x)? + log_gamma(y)? - log_gamma(x + y)?).exp())
    }
}

/// `(λ)_n = λ(λ+1)...(λ+n-1)`, with `(λ)_0 = 1`.
pub fn pochhammer(lambda: f64, n: u32) -> f64 {
    (0..n).map(|k| lambda + f64::from(k)).product()
}

/// Hypergeometric parameters `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HypParams {
    /// Rejects nonfinite values and `c ∈ {0, -1, -2, ...}`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(NumError::domain("hypergeometric parameters must be finite"));
        }
        if c <= 0.0 && c == c.round() {
            return Err(NumError::domain(format!("c = {c} is a nonpositive integer")));
        }
        Ok(HypParams { a, b, c })
    }

    /// `c > b > 0`, required by the Euler integral representations.
    pub fn require_euler(&self) -> Result<()> {
        if self.c > self.b && self.b > 0.0 {
            Ok(())
        } else {
            Err(NumError::domain(format!(
                "need c > b > 0, got b = {}, c = {}",
                self.b, self.c
            )))
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums `Σ t_n` with `t_{n+1} = t_n · ratio(n)`, stopping on a geometric
/// tail bound. `limit` is the limiting ratio magnitude used in that bound.
fn ratio_series(
    ratio: impl Fn(f64) -> f64,
    limit: f64,
    policy: &EvalPolicy,
    what: &str,
) -> Result<Approx> {
    let mut acc = Compensated::default();
    let mut term = 1.0;
    let mut n = 0usize;
    loop {
        acc.add(term);
        if term == 0.0 {
            break;
        }
        let r = ratio(n as f64);
        let next = term * r;
        n += 1;
        let bound = r.abs().max(limit);
        if bound < 1.0 && n > 1 {
            let tail = next.abs() / (1.0 - bound);
            if tail < policy.target_for(acc.value()) * 0.5 {
                let value = acc.value();
                let rounding = acc.abs * 4.0 * f64::EPSILON + value.abs() * f64::EPSILON;
                return Ok(Approx {
                    value,
                    abs_err_est: tail + rounding,
                    terms_used: n,
                    precision_digits_used: 16,
                    nodes_evaluated: 0,
                    converged: true,
                });
            }
        }
        if n >= policy.max_terms || !next.is_finite() {
            let partial = Approx {
                value: acc.value(),
                abs_err_est: f64::INFINITY,
                terms_used: n,
                precision_digits_used: 16,
                nodes_evaluated: 0,
                converged: false,
            };
            return Err(NumError::convergence(format!("{what} series not converged"), partial));
        }
        term = next;
    }
    Ok(Approx {
        value: acc.value(),
        abs_err_est: acc.abs * 4.0 * f64::EPSILON,
        terms_used: n,
        precision_digits_used: 16,
        nodes_evaluated: 0,
        converged: true,
    })
}

/// Largest `|z|` the ₂F₁ power series is asked to handle.
pub const GAUSS_MAX_ABS_Z: f64 = 0.95;

/// `₂F₁(a, b; c; z)`. For `z < -1/2` the Pfaff map `z → z/(z-1)` is applied.
pub fn gauss_2f1(p: HypParams, z: f64, policy: &EvalPolicy) -> Result<Approx> {
    if !z.is_finite() || z >= 1.0 {
        return Err(NumError::domain(format!("gauss_2f1 needs z < 1, got {z}")));
    }
    if z < -0.5 {
        let w = z / (z - 1.0);
        let inner = gauss_series(HypParams { b: p.c - p.b, ..p }, w, policy)?;
        let scale = (1.0 - z).powf(-p.a);
        return Ok(Approx {
            value: inner.value * scale,
            abs_err_est: inner.abs_err_est * scale + (inner.value * scale).abs() * 4.0 * f64::EPSILON,
            ..inner
        });
    }
    gauss_series(p, z, policy)
}

fn gauss_series(p: HypParams, z: f64, policy: &EvalPolicy) -> Result<Approx> {
    if z.abs() > GAUSS_MAX_ABS_Z {
        let partial = Approx {
            value: f64::NAN,
            abs_err_est: f64::INFINITY,
            terms_used: 0,
            precision_digits_used: 16,
            nodes_evaluated: 0,
            converged: false,
        };
        return Err(NumError::convergence(
            format!("2F1 argument {z} outside supported |z| <= {GAUSS_MAX_ABS_Z}"),
            partial,
        ));
    }
    ratio_series(
        |n| (p.a + n) * (p.b + n) / ((p.c + n) * (n + 1.0)) * z,
        z.abs(),
        policy,
        "2F1",
    )
}

/// `₁F₁(b; c; z) = Φ(b; c; z)`. For `z < 0` Kummer's map `e^z Φ(c-b; c; -z)` is used.
pub fn kummer_1f1(b: f64, c: f64, z: f64, policy: &EvalPolicy) -> Result<Approx> {
    HypParams::new(0.0, b, c)?;
    if !z.is_finite() {
        return Err(NumError::domain("kummer_1f1 needs finite z"));
    }
    if z < 0.0 {
        let inner = kummer_series(c - b, c, -z, policy)?;
        let scale = z.exp();
        return Ok(Approx {
            value: inner.value * scale,
            abs_err_est: inner.abs_err_est * scale + (inner.value * scale).abs() * 4.0 * f64::EPSILON,
            ..inner
        });
    }
    kummer_series(b, c, z, policy)
}

fn kummer_series(b: f64, c: f64, z: f64, policy: &EvalPolicy) -> Result<Approx> {
    ratio_series(|n| (b + n) / ((c + n) * (n + 1.0)) * z, 0.0, policy, "1F1")
}

/// `Γ_p(x) = ∫₀^∞ t^(x-1) exp(-t - p/t) dt`.
pub fn chaudhry_gamma_p(p: f64, x: f64, policy: &EvalPolicy) -> Result<Approx> {
    if !(p.is_finite() && p >= 0.0 && x.is_finite()) {
        return Err(NumError::domain("chaudhry_gamma_p needs finite p >= 0 and finite x"));
    }
    if p == 0.0 && x <= 0.0 {
        return Err(NumError::domain("chaudhry_gamma_p at p = 0 needs x > 0"));
    }
    let q = integrate_half_line(|t| ((x - 1.0) * t.ln() - t - p / t).exp(), policy)?;
    Ok(q.to_approx())
}

/// `B_p(x, y) = ∫₀¹ t^(x-1) (1-t)^(y-1) exp(-p/(t(1-t))) dt`.
pub fn chaudhry_beta_p(p: f64, x: f64, y: f64, policy: &EvalPolicy) -> Result<Approx> {
    if !(p.is_finite() && p >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(NumError::domain("chaudhry_beta_p needs finite p >= 0, x, y"));
    }
    if p == 0.0 && (x <= 0.0 || y <= 0.0) {
        return Err(NumError::domain("chaudhry_beta_p at p = 0 needs x, y > 0"));
    }
    let q = integrate_unit_sampled(
        |t, tc| {
            let log = (x - 1.0) * t.ln() + (y - 1.0) * tc.ln() - p / (t * tc);
            Ok(Sample::exact(log.exp()))
        },
        policy,
    )?;
    Ok(q.to_approx())
}

/// Largest argument accepted by [`bessel_j`].
pub const BESSEL_MAX_X: f64 = 50.0;

/// `J_0(x)` or `J_1(x)` from the ascending series summed in double-double.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > 1 {
        return Err(NumError::domain(format!("bessel_j supports orders 0 and 1, got {order}")));
    }
    if !(x.is_finite() && (0.0..=BESSEL_MAX_X).contains(&x)) {
        return Err(NumError::domain(format!("bessel_j needs 0 <= x <= {BESSEL_MAX_X}, got {x}")));
    }
    let half = Dd::from_f64(x).mul_f64(0.5);
    let q = -(half * half);
    let mut term = if order == 0 { Dd::ONE } else { half };
    let mut sum = term;
    let nu = f64::from(order);
    for k in 1..400 {
        let k = f64::from(k);
        term = (term * q).div_f64(k * (k + nu));
        sum += term;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    Ok(sum.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_values() {
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(gamma(0.5).unwrap(), std::f64::consts::PI.sqrt()) < 1e-14);
        assert!(rel(gamma(11.0).unwrap(), 3_628_800.0) < 1e-14);
        assert!(rel(log_gamma(100.0).unwrap(), 359.134_205_369_575_4) < 1e-14);
        assert!(gamma(0.0).is_err() && gamma(-1.5).is_err());
    }

    #[test]
    fn beta_and_pochhammer() {
        assert!(rel(beta(1.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(beta(2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-14);
        assert!(rel(beta(0.5, 0.5).unwrap(), std::f64::consts::PI) < 1e-14);
        assert_eq!(beta(1.3, 4.1).unwrap(), beta(4.1, 1.3).unwrap());
        assert_eq!(pochhammer(7.3, 0), 1.0);
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(0.5, 3), 1.875);
    }

    #[test]
    fn hypergeometric_values() {
        let pol = EvalPolicy::default().with_tolerances(1e-16, 1e-15);
        let p = HypParams::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(gauss_2f1(p, 0.0, &pol).unwrap().value, 1.0);
        let v = gauss_2f1(p, 0.5, &pol).unwrap().value;
        assert!(rel(v, 2.0 * 2f64.ln()) < 1e-13);
        // -ln(1-z)/z on the Pfaff branch too
        let v = gauss_2f1(p, -3.0, &pol).unwrap().value;
        assert!(rel(v, 4f64.ln() / 3.0) < 1e-12);
        assert!(gauss_2f1(p, 0.99, &pol).is_err());
        let v = kummer_1f1(1.0, 2.0, 1.0, &pol).unwrap().value;
        assert!(rel(v, std::f64::consts::E - 1.0) < 1e-14);
        let v = kummer_1f1(1.0, 2.0, -20.0, &pol).unwrap().value;
        assert!(rel(v, (1.0 - (-20f64).exp()) / 20.0) < 1e-13);
        assert!(HypParams::new(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn chaudhry_values() {
        let pol = EvalPolicy::default();
        assert!(rel(chaudhry_gamma_p(0.0, 5.0, &pol).unwrap().value, 24.0) < 1e-11);
        let v = chaudhry_gamma_p(1.0, 0.5, &pol).unwrap().value;
        assert!(rel(v, std::f64::consts::PI.sqrt() * (-2f64).exp()) < 1e-11);
        assert!(rel(chaudhry_beta_p(0.0, 2.0, 3.0, &pol).unwrap().value, 1.0 / 12.0) < 1e-11);
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert!(rel(bessel_j(0, 10.0).unwrap(), -0.245_935_764_451_348_3) < 1e-13);
        assert!(rel(bessel_j(1, 1.0).unwrap(), 0.440_050_585_744_933_5) < 1e-14);
        assert!(bessel_j(2, 1.0).is_err() && bessel_j(0, 60.0).is_err());
    }
}
