//! The Wright function `₁Ψ₁(α, β; z) = Σ_{n≥0} zⁿ / (n! Γ(αn + β))` for real `z`.
//!
//! The Taylor series is summed directly. For `z < 0` the series alternates and
//! the partial sums cancel badly: the largest term can exceed the value by many
//! orders of magnitude (`₁Ψ₁(0, 2; -30) = e⁻³⁰` has a peak term near `8e11`).
//! The working precision is therefore chosen from the peak-term magnitude
//! before summing ([`required_digits`]). Three tiers are used:
//!
//! * native `f64` when 16 digits suffice,
//! * double-double ([`crate::dd::Dd`]) up to 30 digits,
//! * MPFR through `rug` beyond that, up to `max_precision_digits`.
//!
//! When `α = j/m` is an exact rational with a small denominator the reciprocal
//! gammas `1/Γ(αn + β)` follow from `m` seeds by the shift
//! `Γ(w + j) = Γ(w)·(w)_j`; otherwise each one is evaluated afresh.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::dd::{Dd, DD_EPS};
use crate::error::{NumError, Result};
use crate::lgamma::ln_gamma;
use crate::policy::{Approx, EvalPolicy};

const GUARD_DIGITS: u32 = 10;
const MIN_DIGITS: u32 = 16;
const DD_MAX_DIGITS: u32 = 30;
const LN_10: f64 = std::f64::consts::LN_10;

/// Parameters `(α, β)` of the Wright kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightParams {
    alpha: f64,
    beta: f64,
}

impl WrightParams {
    pub const ALPHA_MAX: f64 = 5.0;
    pub const BETA_MAX: f64 = 10.0;

    /// Accepts `α ∈ [0, 5]`, `β ∈ (1, 10]`, the range the Ψ functions are defined on.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::checked(alpha, beta, 1.0)
    }

    /// Accepts `α ∈ [0, 5]`, `β ∈ (0, 10]`. The bare series is entire for any
    /// `β > 0`, so the Bessel cases `β = 1` are reachable; Ψ functions still
    /// reject `β ≤ 1`.
    pub fn series_only(alpha: f64, beta: f64) -> Result<Self> {
        Self::checked(alpha, beta, 0.0)
    }

    fn checked(alpha: f64, beta: f64, beta_min: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(NumError::domain("Wright parameters must be finite"));
        }
        if !(0.0..=Self::ALPHA_MAX).contains(&alpha) {
            return Err(NumError::domain(format!(
                "alpha = {alpha} outside [0, {}]",
                Self::ALPHA_MAX
            )));
        }
        if beta <= beta_min || beta > Self::BETA_MAX {
            return Err(NumError::domain(format!(
                "beta = {beta} outside ({beta_min}, {}]",
                Self::BETA_MAX
            )));
        }
        Ok(WrightParams { alpha, beta })
    }

    /// Whether `β > 1`, as the Ψ functions require.
    pub fn supports_psi(&self) -> bool {
        self.beta > 1.0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln Γ(α n + β)`.
    fn ln_gamma_at(&self, n: f64) -> f64 {
        ln_gamma(self.alpha * n + self.beta)
    }

    /// `α = j/m` exactly, with `m ≤ 64` and `j ≤ 320`.
    fn rational_step(&self) -> Option<(usize, usize)> {
        (1..=64u32).find_map(|m| {
            let m = f64::from(m);
            let prod = self.alpha * m;
            let exact = self.alpha.mul_add(m, -prod) == 0.0;
            (exact && prod == prod.round() && prod <= 320.0).then_some((m as usize, prod as usize))
        })
    }
}

/// `ln |term_n|` with `term_n = zⁿ / (n! Γ(αn+β))`.
fn ln_term(params: &WrightParams, ln_abs_z: f64, n: f64) -> f64 {
    let power = if n == 0.0 { 0.0 } else { n * ln_abs_z };
    power - ln_gamma(n + 1.0) - params.ln_gamma_at(n)
}

/// `ln |term_{n+1} / term_n|`; non-increasing in `n`.
fn ln_ratio(params: &WrightParams, ln_abs_z: f64, n: f64) -> f64 {
    ln_abs_z - (n + 1.0).ln() - (params.ln_gamma_at(n + 1.0) - params.ln_gamma_at(n))
}

/// Index and natural log of the largest term magnitude.
fn peak_term_ln(params: &WrightParams, z: f64) -> (u64, f64) {
    if z == 0.0 {
        return (0, -params.ln_gamma_at(0.0));
    }
    let ln_abs_z = z.abs().ln();
    let rising = |n: u64| ln_ratio(params, ln_abs_z, n as f64) >= 0.0;
    if !rising(0) {
        return (0, ln_term(params, ln_abs_z, 0.0));
    }
    // ratio is monotone, so gallop to a bracket and bisect on the sign change
    let mut lo = 0u64;
    let mut hi = 1u64;
    while rising(hi) && hi < (1u64 << 52) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rising(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // ratio(lo) >= 0 and ratio(hi) < 0, so the peak sits at hi
    (hi, ln_term(params, ln_abs_z, hi as f64))
}

/// `max_n |z|ⁿ / (n! Γ(αn+β))`. Overflows to `inf` for very large `|z|`.
pub fn peak_term_magnitude(params: WrightParams, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(NumError::domain("z must be finite"));
    }
    Ok(peak_term_ln(&params, z).1.exp())
}

/// Working precision, in decimal digits, for summing the series at `z`.
///
/// For `z < 0`: `ceil(log10(peak / tol)) + 10`, never below 16. For `z ≥ 0`
/// all terms are positive, nothing cancels, and the floor applies.
pub fn required_digits(params: WrightParams, z: f64, policy: &EvalPolicy) -> Result<u32> {
    if !z.is_finite() {
        return Err(NumError::domain("z must be finite"));
    }
    Ok(required_digits_unchecked(&params, z, policy))
}

fn required_digits_unchecked(params: &WrightParams, z: f64, policy: &EvalPolicy) -> u32 {
    if z >= 0.0 {
        return MIN_DIGITS;
    }
    let tol = policy.target_abs_tol.max(1e-300);
    let (_, ln_peak) = peak_term_ln(params, z);
    let digits = ((ln_peak - tol.ln()) / LN_10).ceil() + f64::from(GUARD_DIGITS);
    if digits >= f64::from(u32::MAX) {
        u32::MAX
    } else {
        (digits.max(f64::from(MIN_DIGITS))) as u32
    }
}

/// Largest `v` such that `₁Ψ₁(α, β; -v)` fits the precision budget of
/// `policy`. Infinite for `α = 0`, where the closed form is used.
pub fn cancellation_horizon(params: WrightParams, policy: &EvalPolicy) -> f64 {
    if params.alpha == 0.0 {
        return f64::INFINITY;
    }
    let fits = |v: f64| required_digits_unchecked(&params, -v, policy) <= policy.max_precision_digits;
    if !fits(f64::MIN_POSITIVE) {
        return 0.0;
    }
    let mut lo = 1e-3;
    if !fits(lo) {
        return 0.0;
    }
    let mut hi = 1.0;
    while fits(hi) {
        lo = hi;
        hi *= 4.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    lo
}

/// Evaluate `₁Ψ₁(α, β; z)`. At `α = 0` the closed form `e^z / Γ(β)` is returned.
pub fn wright_eval(params: WrightParams, z: f64, policy: &EvalPolicy) -> Result<Approx> {
    if !z.is_finite() {
        return Err(NumError::domain("z must be finite"));
    }
    if params.alpha == 0.0 {
        let value = (Dd::from_f64(z).exp() * Dd::from_f64(params.beta).recip_gamma()).to_f64();
        return Ok(Approx {
            value,
            abs_err_est: value.abs() * 2.0 * f64::EPSILON,
            terms_used: 1,
            precision_digits_used: MIN_DIGITS,
            nodes_evaluated: 0,
            converged: true,
        });
    }
    wright_series(params, z, policy)
}

/// Evaluate `₁Ψ₁(α, β; z)` by Taylor summation in escalated precision, with
/// no closed-form shortcut.
pub fn wright_series(params: WrightParams, z: f64, policy: &EvalPolicy) -> Result<Approx> {
    if !z.is_finite() {
        return Err(NumError::domain("z must be finite"));
    }
    if z == 0.0 {
        return Ok(Approx {
            value: Dd::from_f64(params.beta).recip_gamma().to_f64(),
            abs_err_est: 0.0,
            terms_used: 1,
            precision_digits_used: MIN_DIGITS,
            nodes_evaluated: 0,
            converged: true,
        });
    }
    let digits = required_digits_unchecked(&params, z, policy);
    if digits > policy.max_precision_digits {
        let partial = Approx {
            value: f64::NAN,
            abs_err_est: f64::INFINITY,
            terms_used: 0,
            precision_digits_used: digits,
            nodes_evaluated: 0,
            converged: false,
        };
        return Err(NumError::convergence(
            format!(
                "z = {z} needs {digits} working digits, budget is {}",
                policy.max_precision_digits
            ),
            partial,
        ));
    }
    let approx = if digits <= MIN_DIGITS {
        sum_native(&params, z, policy)
    } else if digits <= DD_MAX_DIGITS {
        sum_extended::<Dd>(&params, z, policy, 0, 32)
    } else {
        sum_extended::<Float>(&params, z, policy, bits_for(digits), digits)
    };
    if approx.converged {
        Ok(approx)
    } else {
        Err(NumError::convergence(
            format!(
                "series at z = {z} not converged after {} terms (err est {:e})",
                approx.terms_used, approx.abs_err_est
            ),
            approx,
        ))
    }
}

/// Working bits for `digits` decimal digits.
fn bits_for(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

/// Stopping rule shared by all tiers. Returns the tail bound once
/// `|term_n|/(1 - r) < target` with `r < 1/2`.
fn tail_if_done(mag: f64, ratio: f64, target: f64) -> Option<f64> {
    (ratio < 0.5 && mag / (1.0 - ratio) < target).then(|| mag * ratio / (1.0 - ratio))
}

fn sum_native(params: &WrightParams, z: f64, policy: &EvalPolicy) -> Approx {
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 0.0;
    let mut rounding = 0.0;
    let mut abs_sum = 0.0;
    let mut n = 0usize;
    let mut tail = f64::INFINITY;
    while n < policy.max_terms {
        let nf = n as f64;
        let lnt = ln_term(params, ln_abs_z, nf);
        let mag = lnt.exp();
        let term = if negative && n % 2 == 1 { -mag } else { mag };
        sum += term;
        abs_sum += mag;
        rounding += mag * (4.0 + lnt.abs() + 2.0 * (nf * ln_abs_z).abs()) * f64::EPSILON;
        let ratio = ln_ratio(params, ln_abs_z, nf).exp();
        n += 1;
        if let Some(t) = tail_if_done(mag, ratio, policy.target_for(sum)) {
            tail = t;
            break;
        }
    }
    rounding += abs_sum * n as f64 * f64::EPSILON;
    finish(sum, tail, rounding, n, MIN_DIGITS, policy)
}

fn finish(
    value: f64,
    tail: f64,
    rounding: f64,
    terms: usize,
    digits: u32,
    policy: &EvalPolicy,
) -> Approx {
    let abs_err_est = tail + rounding + value.abs() * f64::EPSILON * 0.5;
    let mut out = Approx {
        value,
        abs_err_est,
        terms_used: terms,
        precision_digits_used: digits,
        nodes_evaluated: 0,
        converged: true,
    };
    out.converged = tail.is_finite() && out.meets(policy);
    out
}

/// Extended-precision number used by the series tiers.
trait Working: Clone {
    fn eps(prec: u32) -> f64;
    fn from_f64(x: f64, prec: u32) -> Self;
    /// `a·k + b`, exact up to the working precision.
    fn affine(a: f64, k: f64, b: f64, prec: u32) -> Self;
    fn scale(&self, mul: f64, div: f64) -> Self;
    fn add_small(&self, x: f64) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn accumulate(&mut self, other: &Self);
    fn recip_gamma(arg: &Self) -> Self;
    /// Rounds a table entry to the working precision.
    fn from_table(x: &Float, prec: u32) -> Self;
    fn ln_abs(&self) -> f64;
    fn to_f64(&self) -> f64;
}

impl Working for Dd {
    fn eps(_: u32) -> f64 {
        DD_EPS
    }
    fn from_f64(x: f64, _: u32) -> Self {
        Dd::from_f64(x)
    }
    fn affine(a: f64, k: f64, b: f64, _: u32) -> Self {
        Dd::from_f64(a).mul_f64(k) + b
    }
    fn scale(&self, mul: f64, div: f64) -> Self {
        self.mul_f64(mul).div_f64(div)
    }
    fn add_small(&self, x: f64) -> Self {
        *self + x
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn div(&self, other: &Self) -> Self {
        *self / *other
    }
    fn accumulate(&mut self, other: &Self) {
        *self += *other;
    }
    fn recip_gamma(arg: &Self) -> Self {
        arg.recip_gamma()
    }
    fn from_table(x: &Float, _: u32) -> Self {
        Dd::from_float(x)
    }
    fn ln_abs(&self) -> f64 {
        self.hi.abs().ln()
    }
    fn to_f64(&self) -> f64 {
        Dd::to_f64(*self)
    }
}

impl Working for Float {
    fn eps(prec: u32) -> f64 {
        2f64.powi(-(prec as i32))
    }
    fn from_f64(x: f64, prec: u32) -> Self {
        Float::with_val(prec, x)
    }
    fn affine(a: f64, k: f64, b: f64, prec: u32) -> Self {
        let mut out = Float::with_val(prec, a);
        out *= k;
        out += b;
        out
    }
    fn scale(&self, mul: f64, div: f64) -> Self {
        let mut out = self.clone();
        out *= mul;
        out /= div;
        out
    }
    fn add_small(&self, x: f64) -> Self {
        let mut out = self.clone();
        out += x;
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out *= other;
        out
    }
    fn div(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out /= other;
        out
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn recip_gamma(arg: &Self) -> Self {
        arg.clone().gamma().recip()
    }
    fn from_table(x: &Float, prec: u32) -> Self {
        Float::with_val(prec, x)
    }
    fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mantissa, exp) = self.to_f64_exp();
        mantissa.abs().ln() + f64::from(exp) * std::f64::consts::LN_2
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
}

/// Produces `1/Γ(αn + β)` for `n = 0, 1, 2, ...` in order.
struct RecipGammas<W: Working> {
    alpha: f64,
    beta: f64,
    prec: u32,
    step: Option<(usize, usize)>,
    ring: Vec<W>,
}

impl<W: Working> RecipGammas<W> {
    fn new(params: &WrightParams, prec: u32) -> Self {
        RecipGammas {
            alpha: params.alpha,
            beta: params.beta,
            prec,
            step: params.rational_step(),
            ring: Vec::new(),
        }
    }

    fn get(&mut self, n: usize) -> W {
        let direct = |s: &Self, k: usize| W::recip_gamma(&W::affine(s.alpha, k as f64, s.beta, s.prec));
        match self.step {
            None => direct(self, n),
            Some((m, _)) if n < m => {
                let g = direct(self, n);
                self.ring.push(g.clone());
                g
            }
            Some((m, j)) => {
                let base = W::affine(self.alpha, (n - m) as f64, self.beta, self.prec);
                let mut denom = base.clone();
                for i in 1..j {
                    denom = denom.mul(&base.add_small(i as f64));
                }
                let slot = n % m;
                let g = if j == 0 {
                    self.ring[slot].clone()
                } else {
                    self.ring[slot].div(&denom)
                };
                self.ring[slot] = g.clone();
                g
            }
        }
    }
}

/// Tables of `1/Γ(αn + β)` shared by every evaluation with the same
/// parameters and table precision. They only grow.
struct Table {
    generator: RecipGammas<Float>,
    values: Arc<Vec<Float>>,
}

type TableKey = (u64, u64, u32);

const TABLE_CACHE_MAX: usize = 512;
const TABLE_MIN_LEN: usize = 64;
// table entries carry this many bits beyond the working precision
const TABLE_GUARD_BITS: u32 = 64;

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<Mutex<Table>>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<Mutex<Table>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// At least `len` entries of `1/Γ(αn + β)` at `prec` bits.
fn recip_gamma_table(params: &WrightParams, prec: u32, len: usize) -> Arc<Vec<Float>> {
    let key = (params.alpha.to_bits(), params.beta.to_bits(), prec);
    let entry = {
        let mut map = table_cache().lock().unwrap_or_else(|e| e.into_inner());
        if map.len() >= TABLE_CACHE_MAX && !map.contains_key(&key) {
            map.clear();
        }
        map.entry(key)
            .or_insert_with(|| {
                Arc::new(Mutex::new(Table {
                    generator: RecipGammas::new(params, prec),
                    values: Arc::new(Vec::new()),
                }))
            })
            .clone()
    };
    let mut table = entry.lock().unwrap_or_else(|e| e.into_inner());
    if table.values.len() < len {
        let mut values = (*table.values).clone();
        let target = len.max(2 * values.len()).max(TABLE_MIN_LEN);
        while values.len() < target {
            let n = values.len();
            values.push(table.generator.get(n));
        }
        table.values = Arc::new(values);
    }
    table.values.clone()
}

/// Table precision for a tier whose working precision is `prec` bits.
fn table_bits(prec: u32) -> u32 {
    (prec + TABLE_GUARD_BITS).div_ceil(64) * 64
}

fn sum_extended<W: Working>(
    params: &WrightParams,
    z: f64,
    policy: &EvalPolicy,
    prec: u32,
    digits: u32,
) -> Approx {
    let ln_abs_z = z.abs().ln();
    let eps = W::eps(prec);
    // one table per tier; the MPFR tier sizes it for the policy's budget
    let table_prec = if prec == 0 { table_bits(106) } else { table_bits(bits_for(policy.max_precision_digits).max(prec)) };
    let mut table = recip_gamma_table(params, table_prec, TABLE_MIN_LEN);
    let mut power = W::from_f64(1.0, prec); // zⁿ / n!
    let mut sum = W::from_f64(0.0, prec);
    let mut rounding = 0.0;
    let mut n = 0usize;
    let mut tail = f64::INFINITY;
    while n < policy.max_terms {
        let nf = n as f64;
        if n >= table.len() {
            table = recip_gamma_table(params, table_prec, n + 1);
        }
        let g = W::from_table(&table[n], prec);
        let term = power.mul(&g);
        sum.accumulate(&term);
        let ln_mag = term.ln_abs();
        let mag = ln_mag.exp();
        rounding += mag * eps * (8.0 + 2.0 * nf);
        let ratio = ln_ratio(params, ln_abs_z, nf).exp();
        n += 1;
        if let Some(t) = tail_if_done(mag, ratio, policy.target_for(sum.to_f64())) {
            tail = t;
            break;
        }
        power = power.scale(z, n as f64);
    }
    finish(sum.to_f64(), tail, rounding, n, digits, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64) -> WrightParams {
        WrightParams::new(a, b).unwrap()
    }

    fn tight() -> EvalPolicy {
        EvalPolicy::default().with_tolerances(1e-24, 1e-14)
    }

    #[test]
    fn rejects_out_of_box_parameters() {
        assert!(WrightParams::new(-0.1, 2.0).is_err());
        assert!(WrightParams::new(0.5, 1.0).is_err());
        assert!(WrightParams::new(0.5, 0.5).is_err());
        assert!(WrightParams::new(5.5, 2.0).is_err());
        assert!(WrightParams::new(f64::NAN, 2.0).is_err());
        assert!(wright_eval(params(1.0, 2.0), f64::INFINITY, &EvalPolicy::default()).is_err());
    }

    #[test]
    fn single_term_at_zero() {
        let v = wright_eval(params(0.0, 2.0), 0.0, &EvalPolicy::default()).unwrap();
        assert_eq!(v.value, 1.0);
        let v = wright_series(params(1.7, 2.0), 0.0, &EvalPolicy::default()).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn alpha_zero_is_exponential() {
        let v = wright_eval(params(0.0, 2.0), -1.0, &EvalPolicy::default()).unwrap();
        assert!((v.value - (-1f64).exp()).abs() < 1e-16);
        let v = wright_series(params(0.0, 2.0), -1.0, &tight()).unwrap();
        assert!((v.value - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn escalates_for_cancellation() {
        let policy = tight();
        let v = wright_series(params(0.0, 2.0), -30.0, &policy).unwrap();
        let exact = (-30f64).exp();
        assert!(((v.value - exact) / exact).abs() < 1e-8);
        assert!(v.precision_digits_used > DD_MAX_DIGITS);
    }

    #[test]
    fn irrational_alpha_all_tiers_agree() {
        let p = params(0.37, 2.3);
        let z = -12.0;
        let dd = sum_extended::<Dd>(&p, z, &tight(), 0, 32);
        let mp = sum_extended::<Float>(&p, z, &tight(), 300, 90);
        assert!((dd.value - mp.value).abs() < 1e-20, "{} vs {}", dd.value, mp.value);
        let native = sum_native(&p, 3.0, &EvalPolicy::default());
        let mp = sum_extended::<Float>(&p, 3.0, &tight(), 300, 90);
        assert!(((native.value - mp.value) / mp.value).abs() < 1e-13);
    }

    #[test]
    fn rational_ladder_matches_direct_gammas() {
        // α = 3/4 uses the ladder, α = 0.75 + 2^-40 does not
        let p = params(0.75, 1.5);
        let q = params(0.75 + 2f64.powi(-40), 1.5);
        assert!(p.rational_step().is_some());
        assert!(q.rational_step().is_none());
        let a = sum_extended::<Float>(&p, -20.0, &tight(), 300, 90).value;
        let b = sum_extended::<Float>(&q, -20.0, &tight(), 300, 90).value;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn peak_scan_examples() {
        assert!((peak_term_magnitude(params(0.0, 2.0), 0.0).unwrap() - 1.0).abs() < 1e-14);
        // brute-force scans
        let brute = |f: &dyn Fn(u32) -> f64| (0..400).map(f).fold(0.0f64, f64::max);
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let p30 = brute(&|n| 30f64.powi(n as i32) / fact(n));
        let got = peak_term_magnitude(params(0.0, 2.0), -30.0).unwrap();
        assert!(((got - p30) / p30).abs() < 1e-12);
        let p4 = brute(&|n| 4f64.powi(n as i32) / (fact(n) * fact(n + 1)));
        let got = peak_term_magnitude(params(1.0, 2.0), -4.0).unwrap();
        assert!(((got - p4) / p4).abs() < 1e-13);
    }

    #[test]
    fn required_digits_examples() {
        let pol = EvalPolicy::default().with_tolerances(1e-12, 1e-12);
        assert_eq!(required_digits(params(0.0, 2.0), 0.0, &pol).unwrap(), 16);
        let peak = peak_term_magnitude(params(0.0, 2.0), -30.0).unwrap();
        let d = required_digits(params(0.0, 2.0), -30.0, &pol).unwrap();
        assert!(d >= 16 && f64::from(d) >= peak.log10() + 12.0 + 10.0);
        // (α=2, β=3, z=-5): scan of 5ⁿ/(n! Γ(2n+3)) peaks at n = 0 with 1/2
        let pol10 = EvalPolicy::default().with_tolerances(1e-10, 1e-12);
        let d = required_digits(params(2.0, 3.0), -5.0, &pol10).unwrap();
        assert_eq!(d, ((0.5f64 / 1e-10).log10().ceil() as u32) + 10);
    }

    #[test]
    fn budget_exhaustion_is_a_convergence_error() {
        let pol = EvalPolicy {
            max_precision_digits: 40,
            ..EvalPolicy::default()
        };
        let err = wright_series(params(1.0, 2.0), -1e4, &pol).unwrap_err();
        let partial = err.partial().expect("partial result");
        assert!(!partial.converged);
        assert!(partial.precision_digits_used > 40);
    }

    #[test]
    fn horizon_is_the_budget_edge() {
        let pol = EvalPolicy::default();
        let p = params(1.0, 2.0);
        let h = cancellation_horizon(p, &pol);
        assert!(h.is_finite() && h > 100.0);
        assert!(required_digits(p, -h, &pol).unwrap() <= pol.max_precision_digits);
        assert!(required_digits(p, -h * 1.01, &pol).unwrap() > pol.max_precision_digits);
        assert!(cancellation_horizon(params(0.0, 2.0), &pol).is_infinite());
    }
}
