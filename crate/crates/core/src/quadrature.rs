//! Double-exponential quadrature.
//!
//! `tanh-sinh` on `(0, 1)` and `exp-sinh` on `(0, ∞)`, both trapezoid sums in
//! the transformed variable with step `h = 2^-L`. Each level only evaluates the
//! nodes that are new at that level, and the error estimate is the difference
//! between successive levels. Node tables are built once per level and shared.
//!
//! Integrands receive the node and, on `(0, 1)`, its complement `1 - t`
//! computed without cancellation, so factors like `(1 - t)^(y-1)` stay
//! accurate next to `t = 1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{NumError, Result};
use crate::policy::{Approx, EvalPolicy};

/// Levels beyond this are never built, whatever the policy asks for.
pub const MAX_LEVELS: u32 = 18;
const MIN_LEVEL: u32 = 3;
const WEIGHT_FLOOR: f64 = 1e-320;
// nodes closer to 0 than this are dropped so power-law factors cannot overflow
const NODE_FLOOR: f64 = 1e-300;
const TAIL_RATIO: f64 = 1e-19;
const TAIL_RUN: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// `|S_L - S_{L-1}|`.
    pub abs_err_est: f64,
    pub levels_used: u32,
    pub nodes_evaluated: usize,
    pub converged: bool,
    /// `h Σ |w_k| err_k`, from the per-node error bounds the integrand reported.
    pub integrand_err: f64,
}

impl QuadResult {
    /// Quadrature and propagated integrand error together.
    pub fn total_err(&self) -> f64 {
        self.abs_err_est + self.integrand_err
    }

    pub fn to_approx(&self) -> Approx {
        Approx {
            value: self.value,
            abs_err_est: self.total_err(),
            terms_used: self.levels_used as usize,
            precision_digits_used: 16,
            nodes_evaluated: self.nodes_evaluated,
            converged: self.converged,
        }
    }
}

/// An integrand value together with an absolute error bound for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub err: f64,
}

impl Sample {
    pub fn exact(value: f64) -> Self {
        Sample { value, err: 0.0 }
    }
}

impl From<f64> for Sample {
    fn from(value: f64) -> Self {
        Sample::exact(value)
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    u: f64,
    t: f64,
    tc: f64,
    w: f64,
}

/// Nodes that are new at one level, ordered outward from the centre.
struct Level {
    center: Option<Node>,
    sides: [Vec<Node>; 2],
}

fn step(level: u32) -> f64 {
    2f64.powi(-(level as i32))
}

/// Abscissae `u ≥ 0` new at this level, in increasing order.
fn new_abscissae(level: u32) -> impl Iterator<Item = f64> {
    let h = step(level);
    let (first, stride) = if level == 0 { (1u64, 1u64) } else { (1, 2) };
    (0..).map(move |j| (first + stride * j) as f64 * h)
}

fn tanh_sinh_level(level: u32) -> Level {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for u in new_abscissae(level) {
        let s = FRAC_PI_2 * u.sinh();
        let e = (-2.0 * s).exp();
        let small = e / (1.0 + e);
        let large = 1.0 / (1.0 + e);
        let w = PI * u.cosh() * e / ((1.0 + e) * (1.0 + e));
        if w < WEIGHT_FLOOR || small < NODE_FLOOR {
            break;
        }
        left.push(Node { u, t: small, tc: large, w });
        right.push(Node { u, t: large, tc: small, w });
    }
    let center = (level == 0).then_some(Node {
        u: 0.0,
        t: 0.5,
        tc: 0.5,
        w: PI / 4.0,
    });
    Level {
        center,
        sides: [left, right],
    }
}

fn exp_sinh_level(level: u32) -> Level {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for u in new_abscissae(level) {
        let s = FRAC_PI_2 * u.sinh();
        let c = FRAC_PI_2 * u.cosh();
        let big = s.exp();
        let tiny = (-s).exp();
        let w_small = c * tiny;
        let w_big = c * big;
        let left_ok = w_small >= WEIGHT_FLOOR && tiny >= NODE_FLOOR;
        let right_ok = big <= 1.0 / NODE_FLOOR;
        if left_ok {
            left.push(Node { u, t: tiny, tc: f64::NAN, w: w_small });
        }
        if right_ok {
            right.push(Node { u, t: big, tc: f64::NAN, w: w_big });
        }
        if !left_ok && !right_ok {
            break;
        }
    }
    let center = (level == 0).then_some(Node {
        u: 0.0,
        t: 1.0,
        tc: f64::NAN,
        w: FRAC_PI_2,
    });
    Level {
        center,
        sides: [left, right],
    }
}

type Table = [OnceLock<Level>; MAX_LEVELS as usize + 1];

fn cached(table: &'static Table, level: u32, build: fn(u32) -> Level) -> &'static Level {
    table[level as usize].get_or_init(|| build(level))
}

fn tanh_sinh(level: u32) -> &'static Level {
    static TABLE: Table = [const { OnceLock::new() }; MAX_LEVELS as usize + 1];
    cached(&TABLE, level, tanh_sinh_level)
}

fn exp_sinh(level: u32) -> &'static Level {
    static TABLE: Table = [const { OnceLock::new() }; MAX_LEVELS as usize + 1];
    cached(&TABLE, level, exp_sinh_level)
}

#[derive(Default)]
struct LevelSum {
    sum: f64,
    err: f64,
    nodes: usize,
}

fn eval_node<F>(f: &F, node: &Node) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> Result<Sample>,
{
    let sample = f(node.t, node.tc)?;
    if !sample.value.is_finite() {
        return Err(NumError::domain(format!(
            "integrand is not finite ({}) at t = {:e}",
            sample.value, node.t
        )));
    }
    Ok((node.w * sample.value, node.w * sample.err.abs()))
}

/// Running state of the tail cutoff: the largest contribution so far and, per
/// side, the outermost abscissa whose contribution was not negligible.
#[derive(Default)]
struct Tail {
    peak: f64,
    reach: [f64; 2],
}

fn sum_level<F>(level: &Level, f: &F, tail: &mut Tail) -> Result<LevelSum>
where
    F: Fn(f64, f64) -> Result<Sample>,
{
    let mut out = LevelSum::default();
    if let Some(node) = &level.center {
        let (v, e) = eval_node(f, node)?;
        out.sum += v;
        out.err += e;
        out.nodes += 1;
        tail.peak = tail.peak.max(v.abs());
    }
    for (side, reach) in level.sides.iter().zip(tail.reach.iter_mut()) {
        let mut quiet = 0;
        for node in side {
            let (v, e) = eval_node(f, node)?;
            out.sum += v;
            out.err += e;
            out.nodes += 1;
            tail.peak = tail.peak.max(v.abs());
            // stop a side once its contributions are negligible for a few nodes
            // in a row, but never inside the region that mattered before
            if v.abs() <= WEIGHT_FLOOR.max(TAIL_RATIO * tail.peak) {
                quiet += 1;
                if quiet >= TAIL_RUN && node.u > *reach {
                    break;
                }
            } else {
                quiet = 0;
                *reach = reach.max(node.u);
            }
        }
    }
    Ok(out)
}

fn refine<F>(levels: fn(u32) -> &'static Level, f: F, policy: &EvalPolicy) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Result<Sample>,
{
    let max_level = policy.quad_max_levels.clamp(MIN_LEVEL, MAX_LEVELS);
    let mut tail = Tail::default();
    let mut total = 0.0;
    let mut err_sum = 0.0;
    let mut nodes = 0;
    let mut prev = f64::NAN;
    let mut result = QuadResult {
        value: f64::NAN,
        abs_err_est: f64::INFINITY,
        levels_used: 0,
        nodes_evaluated: 0,
        converged: false,
        integrand_err: 0.0,
    };
    for level in 0..=max_level {
        let part = sum_level(levels(level), &f, &mut tail)?;
        total += part.sum;
        err_sum += part.err;
        nodes += part.nodes;
        let h = step(level);
        let estimate = h * total;
        result = QuadResult {
            value: estimate,
            abs_err_est: if level == 0 { f64::INFINITY } else { (estimate - prev).abs() },
            levels_used: level + 1,
            nodes_evaluated: nodes,
            converged: false,
            integrand_err: h * err_sum,
        };
        if level >= MIN_LEVEL && result.abs_err_est <= policy.target_for(estimate) {
            result.converged = true;
            return Ok(result);
        }
        prev = estimate;
    }
    Err(NumError::convergence(
        format!(
            "quadrature not converged after {} levels (value {:e}, err est {:e})",
            result.levels_used, result.value, result.abs_err_est
        ),
        result.to_approx(),
    ))
}

/// `∫₀¹ f(t) dt` by tanh-sinh.
pub fn integrate_unit(f: impl Fn(f64) -> f64, policy: &EvalPolicy) -> Result<QuadResult> {
    refine(tanh_sinh, |t, _| Ok(Sample::exact(f(t))), policy)
}

/// `∫₀¹ f(t, 1 - t) dt` with a fallible integrand that reports its own error.
pub fn integrate_unit_sampled<F>(f: F, policy: &EvalPolicy) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Result<Sample>,
{
    refine(tanh_sinh, f, policy)
}

/// `∫₀^∞ f(t) dt` by exp-sinh.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, policy: &EvalPolicy) -> Result<QuadResult> {
    refine(exp_sinh, |t, _| Ok(Sample::exact(f(t))), policy)
}

/// `∫₀^∞ f(t) dt` with a fallible integrand that reports its own error.
pub fn integrate_half_line_sampled<F>(f: F, policy: &EvalPolicy) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<Sample>,
{
    refine(exp_sinh, |t, _| f(t), policy)
}

/// `∫₀^{π/2} ∫₀^∞ f(θ, r) dr dθ`. The integrand receives `(cos θ, sin θ, r)`.
pub fn integrate_product_2d(
    f: impl Fn(f64, f64, f64) -> f64,
    policy: &EvalPolicy,
) -> Result<QuadResult> {
    integrate_product_2d_sampled(|c, s, r| Ok(Sample::exact(f(c, s, r))), policy)
}

/// Fallible form of [`integrate_product_2d`]. The error estimate is the outer
/// estimate plus the largest inner estimate.
pub fn integrate_product_2d_sampled<F>(f: F, policy: &EvalPolicy) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> Result<Sample>,
{
    let inner_worst = std::cell::Cell::new(0.0f64);
    let inner_nodes = std::cell::Cell::new(0usize);
    let outer = refine(
        tanh_sinh,
        |t, tc| {
            // θ = (π/2)t, with cos θ taken from the complement for accuracy near π/2
            let (sin, cos) = ((FRAC_PI_2 * t).sin(), (FRAC_PI_2 * tc).sin());
            let inner = integrate_half_line_sampled(|r| f(cos, sin, r), policy)?;
            inner_worst.set(inner_worst.get().max(inner.abs_err_est));
            inner_nodes.set(inner_nodes.get() + inner.nodes_evaluated);
            Ok(Sample {
                value: FRAC_PI_2 * inner.value,
                err: FRAC_PI_2 * inner.total_err(),
            })
        },
        policy,
    )?;
    Ok(QuadResult {
        abs_err_est: outer.abs_err_est + inner_worst.get(),
        nodes_evaluated: inner_nodes.get(),
        ..outer
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> EvalPolicy {
        EvalPolicy::default()
    }

    #[test]
    fn unit_constant_and_singular() {
        let r = integrate_unit(|_| 1.0, &pol()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let r = integrate_unit(|t| t.powf(-0.5), &pol()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn half_line_examples() {
        let r = integrate_half_line(|t| (-t).exp(), &pol()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        let r = integrate_half_line(|t| t.powi(4) * (-t).exp(), &pol()).unwrap();
        assert!((r.value - 24.0).abs() < 24.0 * 1e-12);
    }

    #[test]
    fn complement_is_exact_near_one() {
        // ∫ (1-t)^(-0.9) dt = 10 needs the complement, not 1 - t
        let r = integrate_unit_sampled(|_, tc| Ok(Sample::exact(tc.powf(-0.9))), &pol()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn nonfinite_integrand_is_a_domain_error() {
        let err = integrate_unit(|t| if t > 0.3 && t < 0.7 { f64::NAN } else { 1.0 }, &pol())
            .unwrap_err();
        assert!(err.is_domain());
    }

    #[test]
    fn budget_exhaustion_is_a_convergence_error() {
        let p = EvalPolicy {
            quad_max_levels: 4,
            ..EvalPolicy::default().with_tolerances(1e-15, 1e-15)
        };
        let err = integrate_half_line(|t| (t * 40.0).sin().abs() * (-t).exp(), &p).unwrap_err();
        assert!(!err.is_domain());
        assert!(err.partial().is_some());
    }

    #[test]
    fn product_separable() {
        let r = integrate_product_2d(|c, s, r| c * s * r * (-r * r).exp(), &pol()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12, "{}", r.value);
        let r = integrate_product_2d(|_, _, _| 0.0, &pol()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn tables_are_symmetric() {
        for level in 0..6 {
            let l = tanh_sinh(level);
            assert_eq!(l.sides[0].len(), l.sides[1].len());
            for (a, b) in l.sides[0].iter().zip(&l.sides[1]) {
                assert_eq!(a.t, b.tc);
                assert!(a.t > 0.0 && a.t < 1.0);
            }
        }
    }
}
