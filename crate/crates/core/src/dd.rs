//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi)/2`, giving about 32 significant decimal digits.
//!
//! Only what the series evaluators need is provided: the four operations,
//! `exp`, `ln`, and a Stirling-series `ln_gamma`.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use rug::Float;

/// Unit roundoff of double-double arithmetic, 2^-104.
pub const DD_EPS: f64 = 4.930380657631324e-32;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to a multiple-precision value.
    pub fn from_float(x: &Float) -> Self {
        let hi = x.to_f64();
        if !hi.is_finite() {
            return Dd::from_f64(hi);
        }
        let rest = Float::with_val(x.prec().max(128), x - hi);
        Dd { hi, lo: rest.to_f64() }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn to_float(self, prec: u32) -> Float {
        let mut f = Float::with_val(prec, self.hi);
        f += self.lo;
        f
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let f = f - e + self.lo;
        let q2 = (s + f) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    /// Multiplication by an exact power of two.
    pub fn ldexp(self, k: i32) -> Self {
        let scale = |v: f64| {
            // split to stay in range when |k| > 1023
            let half = k / 2;
            v * 2f64.powi(half) * 2f64.powi(k - half)
        };
        Dd {
            hi: scale(self.hi),
            lo: scale(self.lo),
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 {
            return Dd::ONE;
        }
        let consts = constants();
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - consts.ln2.mul_f64(k)).ldexp(-10);
        // e^r - 1 by Horner, |r| < 3.4e-4
        let mut s = Dd::ONE.div_f64(13.0);
        for j in (1..13).rev() {
            s = (s * r + Dd::ONE).div_f64(j as f64);
        }
        s *= r;
        // (1 + s)^(2^10) keeping the "minus one" form
        for _ in 0..10 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    /// Natural logarithm, `self > 0`.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        if self.hi.is_infinite() {
            return self;
        }
        // x = m·2^e with m near 1 keeps exp(-y) well inside the normal range
        let e = self.hi.log2().round() as i32;
        let m = self.ldexp(-e);
        let y = Dd::from_f64(m.hi.ln());
        // one Newton step on exp(y) = m doubles the 53-bit start
        let ln_m = y + m * (-y).exp() - Dd::ONE;
        ln_m + constants().ln2.mul_f64(f64::from(e))
    }

    /// `ln Γ(self)` for `self > 0`.
    pub fn ln_gamma(self) -> Self {
        debug_assert!(self.hi > 0.0);
        const SHIFT_TO: f64 = 32.0;
        let consts = constants();
        let mut w = self;
        let mut shift = Dd::ONE;
        let mut shifted = false;
        while w.hi < SHIFT_TO {
            shift *= w;
            w += Dd::ONE;
            shifted = true;
        }
        let inv = w.recip();
        let inv2 = inv.sqr();
        let mut series = Dd::ZERO;
        for c in consts.stirling.iter().rev() {
            series = series * inv2 + *c;
        }
        series *= inv;
        let mut out = (w - Dd::from_f64(0.5)) * w.ln() - w + consts.half_ln_2pi + series;
        if shifted {
            out -= shift.ln();
        }
        out
    }

    /// `1/Γ(self)` for `self > 0`.
    pub fn recip_gamma(self) -> Self {
        (-self.ln_gamma()).exp()
    }
}

struct Constants {
    ln2: Dd,
    half_ln_2pi: Dd,
    stirling: [Dd; 12],
}

fn constants() -> &'static Constants {
    static CONSTS: OnceLock<Constants> = OnceLock::new();
    CONSTS.get_or_init(|| {
        let ln2 = Float::with_val(256, rug::float::Constant::Log2);
        let mut two_pi = Float::with_val(256, rug::float::Constant::Pi);
        two_pi *= 2;
        let half_ln_2pi = Float::with_val(256, two_pi.ln() / 2);
        // B_2k as exact fractions, k = 1..=12
        const BERNOULLI: [(f64, f64); 12] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
        ];
        let mut stirling = [Dd::ZERO; 12];
        for (k, (num, den)) in BERNOULLI.iter().enumerate() {
            let two_k = 2.0 * (k as f64 + 1.0);
            stirling[k] = Dd::from_f64(*num) / Dd::from_f64(den * two_k * (two_k - 1.0));
        }
        Constants {
            ln2: Dd::from_float(&ln2),
            half_ln_2pi: Dd::from_float(&half_ln_2pi),
            stirling,
        }
    })
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + q3
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREC: u32 = 256;

    fn rel_err(x: Dd, exact: &Float) -> f64 {
        let diff = Float::with_val(PREC, x.to_float(PREC) - exact);
        (diff / exact).to_f64().abs()
    }

    #[test]
    fn arithmetic_matches_mpfr() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let exact = Float::with_val(PREC, 1) / 3u32;
        assert!(rel_err(a, &exact) < 4.0 * DD_EPS);

        let b = Dd::from_f64(std::f64::consts::PI).mul_f64(1.0 / 7.0).div_f64(3.3);
        let exact = Float::with_val(PREC, std::f64::consts::PI) * (1.0 / 7.0) / 3.3;
        assert!(rel_err(b, &exact) < 8.0 * DD_EPS);
    }

    #[test]
    fn exp_and_ln_match_mpfr() {
        for x in [-600.0, -30.5, -1.0, -1e-9, 1e-9, 0.3, 2.0, 17.25, 600.0] {
            let got = Dd::from_f64(x).exp();
            let exact = Float::with_val(PREC, x).exp();
            // reduction by k·ln2 costs about k·2^-107 relative
            let tol = DD_EPS * (16.0 + x.abs() / 8.0);
            assert!(rel_err(got, &exact) < tol, "exp({x}): {}", rel_err(got, &exact));
        }
        for x in [1e-300, 1e-5, 0.5, 1.0 + 1e-12, 3.0, 1e10, 1e300] {
            let got = Dd::from_f64(x).ln();
            let exact = Float::with_val(PREC, x).ln();
            if x == 1.0 + 1e-12 {
                assert!(rel_err(got, &exact) < 1e-20);
            } else {
                assert!(rel_err(got, &exact) < 1e-30, "ln({x})");
            }
        }
    }

    #[test]
    fn ln_gamma_matches_mpfr() {
        for x in [0.01, 0.5, 1.5, 2.0, 3.7, 10.0, 31.9, 32.0, 57.25, 1e3, 1e6] {
            let got = Dd::from_f64(x).ln_gamma();
            let exact = Float::with_val(PREC, x).ln_gamma();
            let abs = Float::with_val(PREC, got.to_float(PREC) - &exact).to_f64().abs();
            let scale = exact.to_f64().abs().max(1.0);
            assert!(abs / scale < 1e-28, "ln_gamma({x}): abs err {abs}");
        }
    }

    #[test]
    fn recip_gamma_at_integers() {
        // 1/Γ(6) = 1/120
        let got = Dd::from_f64(6.0).recip_gamma();
        let exact = Float::with_val(PREC, 1) / 120u32;
        assert!(rel_err(got, &exact) < 1e-28);
    }
}
