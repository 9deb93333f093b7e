//! Ψ-gamma, Ψ-beta and the Ψ-Gauss / Ψ-confluent hypergeometric functions.
//!
//! Every function here is an integral (or a series of integrals) against the
//! Wright kernel `₁Ψ₁(α, β; -v)`, `v ≥ 0`. All integrand weights are positive
//! and are evaluated in log form, then multiplied by the kernel value.
//!
//! Nodes where `v` exceeds the kernel's cancellation horizon contribute zero:
//! for `α < 1` the kernel has decayed far below any useful tolerance there,
//! while summing its Taylor series would need more digits than the policy
//! allows.

use std::cell::{Cell, OnceCell};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classical::HypParams;
use crate::dd::Dd;
use crate::error::{NumError, Result};
use crate::policy::{Approx, EvalPolicy};
use crate::quadrature::{integrate_half_line_sampled, integrate_unit_sampled, QuadResult, Sample};
use crate::wright::{cancellation_horizon, wright_eval, WrightParams};

/// Upper end of the accepted `p` range.
pub const P_MAX: f64 = 10.0;
/// Upper end of the accepted `x`, `y`, `b`, `c - b` range.
pub const ARG_MAX: f64 = 20.0;
/// Upper end of the Mellin variable for the kernel transform.
pub const S_MAX: f64 = 2.0;
/// Mellin kernel evaluation refuses `β - αs` at or below this.
pub const KERNEL_POLE_GUARD: f64 = 0.25;
/// Series routes stop after this many terms.
pub const SERIES_MAX_TERMS: usize = 64;
/// Largest `|z|` accepted by the series routes.
pub const SERIES_MAX_ABS_Z: f64 = 0.8;
/// Largest `|z|` accepted by the confluent integral routes.
pub const CONFLUENT_MAX_ABS_Z: f64 = 100.0;
// nodes out to this many horizons carry the tail bound in their error
const TAIL_BAND: f64 = 4.0;

/// Wright parameters together with the extension parameter `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    wright: WrightParams,
    p: f64,
}

impl PsiParams {
    /// `p ∈ [0, 10]`. For `α > 1` the kernel grows along the negative axis and
    /// the integrals diverge, so `p > 0` with `α > 1` is rejected.
    pub fn new(alpha: f64, beta: f64, p: f64) -> Result<Self> {
        let wright = WrightParams::new(alpha, beta)?;
        Self::from_wright(wright, p)
    }

    pub fn from_wright(wright: WrightParams, p: f64) -> Result<Self> {
        require_psi_beta(wright)?;
        if !p.is_finite() || !(0.0..=P_MAX).contains(&p) {
            return Err(NumError::domain(format!("p = {p} outside [0, {P_MAX}]")));
        }
        if p > 0.0 && wright.alpha() > 1.0 {
            return Err(NumError::domain(format!(
                "alpha = {} > 1 with p > 0: the kernel grows and the integral diverges",
                wright.alpha()
            )));
        }
        Ok(PsiParams { wright, p })
    }

    pub fn wright(&self) -> WrightParams {
        self.wright
    }

    pub fn alpha(&self) -> f64 {
        self.wright.alpha()
    }

    pub fn beta(&self) -> f64 {
        self.wright.beta()
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

fn require_psi_beta(wright: WrightParams) -> Result<()> {
    if wright.supports_psi() {
        Ok(())
    } else {
        Err(NumError::domain(format!("beta = {} must exceed 1", wright.beta())))
    }
}

/// Mellin variable `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinPoint {
    s: f64,
}

impl MellinPoint {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(NumError::domain(format!("Mellin variable s = {s} must be positive")));
        }
        Ok(MellinPoint { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

macro_rules! route_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = NumError;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(NumError::domain(format!(
                        "unknown route '{s}' (expected one of: {})",
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

route_enum!(
    /// Integral representations of the Ψ-beta function.
    BetaRoute { Unit => "unit", Trig => "trig", Rational => "rational" }
);
route_enum!(
    /// Representations of the Ψ-Gauss function.
    GaussRoute { Series => "series", Euler => "euler", Rational => "rational", Trig => "trig" }
);
route_enum!(
    /// Representations of the Ψ-confluent function.
    ConfluentRoute { Series => "series", Euler => "euler", Reflected => "reflected" }
);

fn policy_for_kernel(policy: &EvalPolicy) -> EvalPolicy {
    let abs = policy.target_abs_tol.min(policy.target_rel_tol * 1e-2).max(1e-20);
    EvalPolicy {
        target_abs_tol: abs,
        ..*policy
    }
}

/// The Wright kernel `v ↦ ₁Ψ₁(α, β; -v)` on `v ≥ 0`, as used inside the
/// Ψ integrands. Records the highest working precision it needed.
pub struct PsiKernel {
    params: WrightParams,
    policy: EvalPolicy,
    horizon: f64,
    at_zero: f64,
    tail_bound: OnceCell<f64>,
    max_digits: Cell<u32>,
    evaluations: Cell<usize>,
}

impl PsiKernel {
    pub fn new(params: WrightParams, policy: &EvalPolicy) -> Self {
        let policy = policy_for_kernel(policy);
        PsiKernel {
            params,
            horizon: cancellation_horizon(params, &policy),
            at_zero: recip_gamma(params.beta()),
            tail_bound: OnceCell::new(),
            policy,
            max_digits: Cell::new(16),
            evaluations: Cell::new(0),
        }
    }

    /// Largest `v` evaluated; beyond it the kernel is taken as zero.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn max_digits(&self) -> u32 {
        self.max_digits.get()
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }

    /// Bound on `|₁Ψ₁(α, β; -v)|` just past the horizon: twice the largest
    /// magnitude sampled over the last quarter-oscillation before it.
    fn tail_bound(&self) -> f64 {
        *self.tail_bound.get_or_init(|| {
            let h = self.horizon;
            if !h.is_finite() {
                return 0.0;
            }
            let spacing = (h / 16.0).min(FRAC_PI_2 * h.sqrt());
            let mut worst = 0.0f64;
            for k in 0..5 {
                match wright_eval(self.params, -(h - f64::from(k) * spacing), &self.policy) {
                    Ok(a) => worst = worst.max(a.value.abs() + a.abs_err_est),
                    Err(_) => return f64::INFINITY,
                }
            }
            2.0 * worst
        })
    }

    /// `₁Ψ₁(α, β; -v)` with its error bound. Past the horizon the value is
    /// taken as zero; up to four horizons out the error carries the tail
    /// bound, further out the node is treated as negligible.
    pub fn eval(&self, v: f64) -> Result<Sample> {
        if v == 0.0 {
            return Ok(Sample {
                value: self.at_zero,
                err: self.at_zero * f64::EPSILON,
            });
        }
        if v > self.horizon {
            let err = if v <= TAIL_BAND * self.horizon { self.tail_bound() } else { 0.0 };
            return Ok(Sample { value: 0.0, err });
        }
        let a = wright_eval(self.params, -v, &self.policy)?;
        self.evaluations.set(self.evaluations.get() + 1);
        self.max_digits.set(self.max_digits.get().max(a.precision_digits_used));
        Ok(Sample {
            value: a.value,
            err: a.abs_err_est,
        })
    }

    /// `exp(log_weight) · Ψ(-v)`, with the kernel error scaled the same way.
    fn weighted(&self, log_weight: f64, v: f64) -> Result<Sample> {
        let k = self.eval(v)?;
        if k.value == 0.0 {
            let err = if k.err == 0.0 { 0.0 } else { (log_weight + k.err.ln()).exp() };
            return Ok(Sample { value: 0.0, err });
        }
        let scale = log_weight.exp();
        Ok(Sample {
            value: scale * k.value,
            err: scale * k.err,
        })
    }

    /// Scales a quadrature outcome by the normalisation and decides
    /// convergence on the combined error estimate.
    fn conclude(&self, q: Result<QuadResult>, scale: f64, policy: &EvalPolicy) -> Result<Approx> {
        let (approx, reason) = match q {
            Ok(q) => {
                let value = q.value * scale;
                let approx = Approx {
                    value,
                    abs_err_est: q.total_err() * scale.abs() + value.abs() * 4.0 * f64::EPSILON,
                    terms_used: q.levels_used as usize,
                    precision_digits_used: self.max_digits(),
                    nodes_evaluated: q.nodes_evaluated,
                    converged: q.converged,
                };
                (approx, None)
            }
            Err(NumError::Convergence { reason, partial }) => (
                Approx {
                    value: partial.value * scale,
                    abs_err_est: partial.abs_err_est * scale.abs(),
                    precision_digits_used: self.max_digits(),
                    ..partial
                },
                Some(reason),
            ),
            Err(e) => return Err(e),
        };
        settle(approx, policy, reason)
    }
}

/// `1/Γ(x)` through the double-double log-gamma.
fn recip_gamma(x: f64) -> f64 {
    Dd::from_f64(x).recip_gamma().to_f64()
}

/// `B(x, y)` through the double-double log-gamma, independent of the
/// classical module.
pub(crate) fn beta_norm(x: f64, y: f64) -> f64 {
    let (x, y) = (Dd::from_f64(x), Dd::from_f64(y));
    (x.ln_gamma() + y.ln_gamma() - (x + y).ln_gamma()).exp().to_f64()
}

fn rising(lambda: f64, n: u32) -> f64 {
    (0..n).map(|k| lambda + f64::from(k)).product()
}

fn check_arg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= ARG_MAX {
        Ok(())
    } else {
        Err(NumError::domain(format!("{name} = {v} outside (0, {ARG_MAX}]")))
    }
}

fn require_half_line_kernel(params: WrightParams) -> Result<()> {
    if params.alpha() < 1.0 {
        Ok(())
    } else {
        Err(NumError::domain(format!(
            "half-line integrals need alpha < 1 (alpha = {}): the kernel does not decay absolutely",
            params.alpha()
        )))
    }
}

fn check_hyp(hyp: &HypParams) -> Result<()> {
    hyp.require_euler()?;
    check_arg("b", hyp.b)?;
    check_arg("c - b", hyp.c - hyp.b)?;
    if hyp.a.abs() > ARG_MAX {
        return Err(NumError::domain(format!("|a| = {} exceeds {ARG_MAX}", hyp.a.abs())));
    }
    Ok(())
}

/// Returns `approx` if it meets the tolerance, otherwise a convergence error
/// carrying it as the partial result.
fn settle(approx: Approx, policy: &EvalPolicy, reason: Option<String>) -> Result<Approx> {
    if reason.is_none() && approx.converged && approx.meets(policy) {
        return Ok(Approx {
            converged: true,
            ..approx
        });
    }
    let reason = reason.unwrap_or_else(|| {
        format!(
            "error estimate {:e} exceeds the target {:e}",
            approx.abs_err_est,
            policy.target_for(approx.value)
        )
    });
    Err(NumError::convergence(
        reason,
        Approx {
            converged: false,
            ..approx
        },
    ))
}

/// Accepts an unconverged partial from a sub-evaluation, clearing `ok`.
fn lenient(r: Result<Approx>, ok: &mut bool) -> Result<Approx> {
    match r {
        Err(NumError::Convergence { partial, .. }) if partial.value.is_finite() => {
            *ok = false;
            Ok(partial)
        }
        other => other,
    }
}

/// `ΨΓ_p(x) = ∫₀^∞ t^(x-1) ₁Ψ₁(α, β; -t - p/t) dt`.
pub fn psi_gamma_p(params: PsiParams, x: f64, policy: &EvalPolicy) -> Result<Approx> {
    policy.validate()?;
    check_arg("x", x)?;
    require_half_line_kernel(params.wright)?;
    let kernel = PsiKernel::new(params.wright, policy);
    gamma_raw(&kernel, params.p, x, policy)
}

pub(crate) fn gamma_raw(kernel: &PsiKernel, p: f64, x: f64, policy: &EvalPolicy) -> Result<Approx> {
    let q = integrate_half_line_sampled(|t| kernel.weighted((x - 1.0) * t.ln(), t + p / t), policy);
    kernel.conclude(q, 1.0, policy)
}

/// `ΨΓ^(α,β)(s) = ∫₀^∞ v^(s-1) ₁Ψ₁(α, β; -v) dv`, the kernel of the Mellin transforms.
pub fn psi_gamma_kernel(wright: WrightParams, s: MellinPoint, policy: &EvalPolicy) -> Result<Approx> {
    policy.validate()?;
    require_psi_beta(wright)?;
    require_half_line_kernel(wright)?;
    if s.s > S_MAX {
        return Err(NumError::domain(format!("s = {} exceeds {S_MAX}", s.s)));
    }
    let gap = wright.beta() - wright.alpha() * s.s;
    if gap <= KERNEL_POLE_GUARD {
        return Err(NumError::domain(format!(
            "beta - alpha*s = {gap} too close to a pole (needs > {KERNEL_POLE_GUARD})"
        )));
    }
    let kernel = PsiKernel::new(wright, policy);
    kernel_raw(&kernel, s.s, policy)
}

pub(crate) fn kernel_raw(kernel: &PsiKernel, s: f64, policy: &EvalPolicy) -> Result<Approx> {
    let q = integrate_half_line_sampled(|v| kernel.weighted((s - 1.0) * v.ln(), v), policy);
    kernel.conclude(q, 1.0, policy)
}

/// `ΨB_p(x, y) = ∫₀¹ t^(x-1) (1-t)^(y-1) ₁Ψ₁(α, β; -p/(t(1-t))) dt` by the chosen representation.
pub fn psi_beta(
    params: PsiParams,
    x: f64,
    y: f64,
    route: BetaRoute,
    policy: &EvalPolicy,
) -> Result<Approx> {
    policy.validate()?;
    check_arg("x", x)?;
    check_arg("y", y)?;
    if route == BetaRoute::Rational {
        require_rational_kernel(params)?;
    }
    let kernel = PsiKernel::new(params.wright, policy);
    beta_raw(&kernel, params.p, x, y, route, policy)
}

/// The `u ∈ (0, ∞)` substitution keeps the kernel argument at least `4p`,
/// but at `p = 0` it is a plain half-line integral of a power law.
fn require_rational_kernel(params: PsiParams) -> Result<()> {
    if params.p > 0.0 && params.alpha() >= 1.0 {
        require_half_line_kernel(params.wright)
    } else {
        Ok(())
    }
}

pub(crate) fn beta_raw(
    kernel: &PsiKernel,
    p: f64,
    x: f64,
    y: f64,
    route: BetaRoute,
    policy: &EvalPolicy,
) -> Result<Approx> {
    let q = match route {
        BetaRoute::Unit => integrate_unit_sampled(
            |t, tc| kernel.weighted((x - 1.0) * t.ln() + (y - 1.0) * tc.ln(), p / (t * tc)),
            policy,
        ),
        BetaRoute::Trig => integrate_unit_sampled(
            |tau, tau_c| {
                let (sin, cos) = ((FRAC_PI_2 * tau).sin(), (FRAC_PI_2 * tau_c).sin());
                // 2 dθ = π dτ
                let log = PI.ln() + (2.0 * x - 1.0) * cos.ln() + (2.0 * y - 1.0) * sin.ln();
                kernel.weighted(log, p / (cos * cos * sin * sin))
            },
            policy,
        ),
        BetaRoute::Rational => integrate_half_line_sampled(
            |u| {
                let log = (x - 1.0) * u.ln() - (x + y) * u.ln_1p();
                kernel.weighted(log, 2.0 * p + p * (u + 1.0 / u))
            },
            policy,
        ),
    };
    kernel.conclude(q, 1.0, policy)
}

/// Truncated sum with the magnitude of the last included term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSum {
    pub approx: Approx,
    pub last_term: f64,
    pub terms: usize,
}

/// `Σ_{n<N} (y)_n / n! · ΨB_p(x+n, 1)`, the series side of the summation
/// relation for `ΨB_p(x, 1-y)`.
pub fn psi_beta_summation_rhs(
    params: PsiParams,
    x: f64,
    y: f64,
    n_terms: usize,
    policy: &EvalPolicy,
) -> Result<TruncatedSum> {
    policy.validate()?;
    if params.p <= 0.0 {
        return Err(NumError::domain("the summation relation needs p > 0"));
    }
    if n_terms == 0 {
        return Err(NumError::domain("n_terms must be at least 1"));
    }
    check_arg("x", x)?;
    if !y.is_finite() || y.abs() > ARG_MAX {
        return Err(NumError::domain(format!("y = {y} outside [-{ARG_MAX}, {ARG_MAX}]")));
    }
    let kernel = PsiKernel::new(params.wright, policy);
    summation_raw(&kernel, params.p, x, y, n_terms, policy)
}

pub(crate) fn summation_raw(
    kernel: &PsiKernel,
    p: f64,
    x: f64,
    y: f64,
    n_terms: usize,
    policy: &EvalPolicy,
) -> Result<TruncatedSum> {
    let mut coef = 1.0; // (y)_n / n!
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut nodes = 0;
    let mut last_term = 0.0;
    let mut terms = 0;
    let mut inner_ok = true;
    for n in 0..n_terms {
        if coef == 0.0 {
            break;
        }
        let b = lenient(beta_raw(kernel, p, x + n as f64, 1.0, BetaRoute::Unit, policy), &mut inner_ok)?;
        let term = coef * b.value;
        sum += term;
        err += (coef * b.abs_err_est).abs();
        nodes += b.nodes_evaluated;
        last_term = term.abs();
        terms = n + 1;
        coef *= (y + n as f64) / (n as f64 + 1.0);
    }
    let approx = Approx {
        value: sum,
        abs_err_est: err + last_term,
        terms_used: terms,
        precision_digits_used: kernel.max_digits(),
        nodes_evaluated: nodes,
        converged: false,
    };
    let approx = Approx {
        converged: inner_ok && approx.meets(policy),
        ..approx
    };
    if last_term > policy.target_for(sum) && terms == n_terms {
        return Err(NumError::convergence(
            format!("summation still moving after {n_terms} terms (last term {last_term:e})"),
            approx,
        ));
    }
    if !inner_ok {
        return Err(NumError::convergence("a term of the summation did not converge", approx));
    }
    Ok(TruncatedSum {
        approx,
        last_term,
        terms,
    })
}

/// `ΨB_p(b+n, c-b)` for `n = 0, 1, ...`, each computed once per evaluation.
struct ShiftedBetas<'k> {
    kernel: &'k PsiKernel,
    p: f64,
    b: f64,
    gap: f64,
    cache: Vec<Approx>,
    all_converged: bool,
}

impl<'k> ShiftedBetas<'k> {
    fn get(&mut self, n: usize, policy: &EvalPolicy) -> Result<Approx> {
        while self.cache.len() <= n {
            let k = self.cache.len() as f64;
            let v = lenient(
                beta_raw(self.kernel, self.p, self.b + k, self.gap, BetaRoute::Unit, policy),
                &mut self.all_converged,
            )?;
            self.cache.push(v);
        }
        Ok(self.cache[n])
    }
}

/// `Σ_n coef_n · ΨB_p(b+n, c-b) / B(b, c-b)` where `coef_{n+1} = coef_n · ratio(n)`.
fn hyp_series(
    kernel: &PsiKernel,
    p: f64,
    b: f64,
    c: f64,
    ratio: impl Fn(f64) -> f64,
    policy: &EvalPolicy,
) -> Result<Approx> {
    let norm = beta_norm(b, c - b);
    let mut betas = ShiftedBetas {
        kernel,
        p,
        b,
        gap: c - b,
        cache: Vec::new(),
        all_converged: true,
    };
    let mut coef = 1.0;
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut nodes = 0;
    for n in 0..SERIES_MAX_TERMS {
        let bn = betas.get(n, policy)?;
        let term = coef * bn.value / norm;
        sum += term;
        err += (coef * bn.abs_err_est / norm).abs();
        nodes += bn.nodes_evaluated;
        let r = ratio(n as f64);
        // ΨB_p(b+n, c-b) does not grow with n, so the coefficients bound the tail
        let bound = r.abs();
        let tail = if bound < 1.0 { term.abs() * bound / (1.0 - bound) } else { f64::INFINITY };
        if coef == 0.0 || (n >= 1 && tail < 0.5 * policy.target_for(sum)) {
            let value = sum;
            let out = Approx {
                value,
                abs_err_est: err + if coef == 0.0 { 0.0 } else { tail } + value.abs() * 8.0 * f64::EPSILON,
                terms_used: n + 1,
                precision_digits_used: kernel.max_digits(),
                nodes_evaluated: nodes,
                converged: betas.all_converged,
            };
            let reason = (!betas.all_converged).then(|| "a term of the series did not converge".to_string());
            return settle(out, policy, reason);
        }
        coef *= r;
    }
    let partial = Approx {
        value: sum,
        abs_err_est: f64::INFINITY,
        terms_used: SERIES_MAX_TERMS,
        precision_digits_used: kernel.max_digits(),
        nodes_evaluated: nodes,
        converged: false,
    };
    Err(NumError::convergence(
        format!("series route not converged within {SERIES_MAX_TERMS} terms"),
        partial,
    ))
}

fn check_series_z(z: f64) -> Result<()> {
    if z.is_finite() && z.abs() <= SERIES_MAX_ABS_Z {
        Ok(())
    } else {
        Err(NumError::domain(format!("series route needs |z| <= {SERIES_MAX_ABS_Z}, got {z}")))
    }
}

/// `ΨF_p(a, b; c; z) = Σ (a)_n ΨB_p(b+n, c-b)/B(b, c-b) · zⁿ/n!` by the chosen representation.
pub fn psi_2f1(
    params: PsiParams,
    hyp: HypParams,
    z: f64,
    route: GaussRoute,
    policy: &EvalPolicy,
) -> Result<Approx> {
    policy.validate()?;
    check_hyp(&hyp)?;
    if !z.is_finite() || !(-ARG_MAX..1.0).contains(&z) {
        return Err(NumError::domain(format!("psi_2f1 needs -{ARG_MAX} <= z < 1, got {z}")));
    }
    if route == GaussRoute::Series {
        check_series_z(z)?;
    }
    if route == GaussRoute::Rational {
        require_rational_kernel(params)?;
    }
    let kernel = PsiKernel::new(params.wright, policy);
    gauss_raw(&kernel, params.p, hyp, z, route, policy)
}

pub(crate) fn gauss_raw(
    kernel: &PsiKernel,
    p: f64,
    hyp: HypParams,
    z: f64,
    route: GaussRoute,
    policy: &EvalPolicy,
) -> Result<Approx> {
    let HypParams { a, b, c } = hyp;
    if route == GaussRoute::Series {
        return hyp_series(kernel, p, b, c, |n| (a + n) / (n + 1.0) * z, policy);
    }
    let q = match route {
        GaussRoute::Euler => integrate_unit_sampled(
            |t, tc| {
                let log = (b - 1.0) * t.ln() + (c - b - 1.0) * tc.ln() - a * (-z * t).ln_1p();
                kernel.weighted(log, p / (t * tc))
            },
            policy,
        ),
        GaussRoute::Rational => integrate_half_line_sampled(
            |u| {
                let log = (b - 1.0) * u.ln() + (a - c) * u.ln_1p() - a * (u * (1.0 - z)).ln_1p();
                kernel.weighted(log, 2.0 * p + p * (u + 1.0 / u))
            },
            policy,
        ),
        GaussRoute::Trig => integrate_unit_sampled(
            |tau, tau_c| {
                let (sin, cos) = ((FRAC_PI_2 * tau).sin(), (FRAC_PI_2 * tau_c).sin());
                let log = PI.ln()
                    + (2.0 * b - 1.0) * sin.ln()
                    + (2.0 * c - 2.0 * b - 1.0) * cos.ln()
                    - a * (-z * sin * sin).ln_1p();
                kernel.weighted(log, p / (sin * sin * cos * cos))
            },
            policy,
        ),
        GaussRoute::Series => unreachable!(),
    };
    kernel.conclude(q, 1.0 / beta_norm(b, c - b), policy)
}

/// `ΨΦ_p(b; c; z) = Σ ΨB_p(b+n, c-b)/B(b, c-b) · zⁿ/n!` by the chosen representation.
pub fn psi_1f1(
    params: PsiParams,
    b: f64,
    c: f64,
    z: f64,
    route: ConfluentRoute,
    policy: &EvalPolicy,
) -> Result<Approx> {
    policy.validate()?;
    check_hyp(&HypParams::new(0.0, b, c)?)?;
    if !z.is_finite() || z.abs() > CONFLUENT_MAX_ABS_Z {
        return Err(NumError::domain(format!(
            "psi_1f1 needs |z| <= {CONFLUENT_MAX_ABS_Z}, got {z}"
        )));
    }
    if route == ConfluentRoute::Series {
        check_series_z(z)?;
    }
    let kernel = PsiKernel::new(params.wright, policy);
    confluent_raw(&kernel, params.p, b, c, z, route, policy)
}

pub(crate) fn confluent_raw(
    kernel: &PsiKernel,
    p: f64,
    b: f64,
    c: f64,
    z: f64,
    route: ConfluentRoute,
    policy: &EvalPolicy,
) -> Result<Approx> {
    let q = match route {
        ConfluentRoute::Series => {
            return hyp_series(kernel, p, b, c, |n| z / (n + 1.0), policy);
        }
        ConfluentRoute::Euler => integrate_unit_sampled(
            |t, tc| {
                let log = (b - 1.0) * t.ln() + (c - b - 1.0) * tc.ln() + z * t;
                kernel.weighted(log, p / (t * tc))
            },
            policy,
        ),
        ConfluentRoute::Reflected => integrate_unit_sampled(
            |u, uc| {
                let log = (c - b - 1.0) * u.ln() + (b - 1.0) * uc.ln() + z * uc;
                kernel.weighted(log, p / (u * uc))
            },
            policy,
        ),
    };
    kernel.conclude(q, 1.0 / beta_norm(b, c - b), policy)
}

fn scaled(a: Approx, factor: f64) -> Approx {
    Approx {
        value: a.value * factor,
        abs_err_est: a.abs_err_est * factor.abs(),
        ..a
    }
}

fn scaled_result(r: Result<Approx>, factor: f64) -> Result<Approx> {
    match r {
        Ok(a) => Ok(scaled(a, factor)),
        Err(NumError::Convergence { reason, partial }) => Err(NumError::convergence(reason, scaled(partial, factor))),
        Err(e) => Err(e),
    }
}

/// `dⁿ/dzⁿ ΨF_p(a, b; c; z) = (a)_n (b)_n / (c)_n · ΨF_p(a+n, b+n; c+n; z)`.
pub fn psi_2f1_derivative(
    params: PsiParams,
    hyp: HypParams,
    z: f64,
    n: u32,
    policy: &EvalPolicy,
) -> Result<Approx> {
    if n == 0 {
        return Err(NumError::domain("derivative order must be at least 1"));
    }
    let shift = f64::from(n);
    let shifted = HypParams::new(hyp.a + shift, hyp.b + shift, hyp.c + shift)?;
    let factor = rising(hyp.a, n) * rising(hyp.b, n) / rising(hyp.c, n);
    scaled_result(psi_2f1(params, shifted, z, GaussRoute::Euler, policy), factor)
}

/// `dⁿ/dzⁿ ΨΦ_p(b; c; z) = (b)_n / (c)_n · ΨΦ_p(b+n; c+n; z)`.
pub fn psi_1f1_derivative(
    params: PsiParams,
    b: f64,
    c: f64,
    z: f64,
    n: u32,
    policy: &EvalPolicy,
) -> Result<Approx> {
    if n == 0 {
        return Err(NumError::domain("derivative order must be at least 1"));
    }
    let shift = f64::from(n);
    let factor = rising(b, n) / rising(c, n);
    scaled_result(psi_1f1(params, b + shift, c + shift, z, ConfluentRoute::Euler, policy), factor)
}
