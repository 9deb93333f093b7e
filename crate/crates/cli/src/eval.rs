//! Point evaluation of the library functions from a flat parameter record.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use psi_special::classical::HypParams;
use psi_special::psi::{self, BetaRoute, ConfluentRoute, GaussRoute, MellinPoint, PsiParams};
use psi_special::wright::{wright_eval, WrightParams};
use psi_special::{Approx, EvalPolicy, NumError};
use serde::{Deserialize, Serialize};

/// Functions reachable from `eval` and `table`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Wright,
    PsiGamma,
    PsiGammaKernel,
    PsiBeta,
    Psi2F1,
    Psi1F1,
}

impl Function {
    pub const NAMES: [&'static str; 6] = ["wright", "psi-gamma", "psi-gamma-kernel", "psi-beta", "psi-2f1", "psi-1f1"];

    pub fn name(self) -> &'static str {
        match self {
            Function::Wright => "wright",
            Function::PsiGamma => "psi-gamma",
            Function::PsiGammaKernel => "psi-gamma-kernel",
            Function::PsiBeta => "psi-beta",
            Function::Psi2F1 => "psi-2f1",
            Function::Psi1F1 => "psi-1f1",
        }
    }

    /// Parameters the function reads, in output order.
    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            Function::Wright => &["alpha", "beta", "z"],
            Function::PsiGamma => &["alpha", "beta", "p", "x"],
            Function::PsiGammaKernel => &["alpha", "beta", "s"],
            Function::PsiBeta => &["alpha", "beta", "p", "x", "y"],
            Function::Psi2F1 => &["alpha", "beta", "p", "a", "b", "c", "z"],
            Function::Psi1F1 => &["alpha", "beta", "p", "b", "c", "z"],
        }
    }

    pub fn default_route(self) -> Option<&'static str> {
        match self {
            Function::PsiBeta => Some("unit"),
            Function::Psi2F1 | Function::Psi1F1 => Some("euler"),
            _ => None,
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Function {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Function::NAMES
            .iter()
            .zip([
                Function::Wright,
                Function::PsiGamma,
                Function::PsiGammaKernel,
                Function::PsiBeta,
                Function::Psi2F1,
                Function::Psi1F1,
            ])
            .find(|(name, _)| **name == s)
            .map(|(_, f)| f)
            .ok_or_else(|| anyhow!("unknown function '{s}' (expected one of: {})", Function::NAMES.join(", ")))
    }
}

/// Every parameter any function can take. Unset fields are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRecord {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
    pub s: Option<f64>,
}

impl ParamRecord {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: ParamRecord) -> ParamRecord {
        ParamRecord {
            alpha: over.alpha.or(self.alpha),
            beta: over.beta.or(self.beta),
            p: over.p.or(self.p),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            c: over.c.or(self.c),
            x: over.x.or(self.x),
            y: over.y.or(self.y),
            z: over.z.or(self.z),
            s: over.s.or(self.s),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.slot(name).and_then(|v| v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self.slot_mut(name).ok_or_else(|| anyhow!("unknown parameter '{name}'"))?;
        *slot = Some(value);
        Ok(())
    }

    fn slot(&self, name: &str) -> Option<Option<f64>> {
        Some(match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "p" => self.p,
            "a" => self.a,
            "b" => self.b,
            "c" => self.c,
            "x" => self.x,
            "y" => self.y,
            "z" => self.z,
            "s" => self.s,
            _ => return None,
        })
    }

    fn slot_mut(&mut self, name: &str) -> Option<&mut Option<f64>> {
        Some(match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "p" => &mut self.p,
            "a" => &mut self.a,
            "b" => &mut self.b,
            "c" => &mut self.c,
            "x" => &mut self.x,
            "y" => &mut self.y,
            "z" => &mut self.z,
            "s" => &mut self.s,
            _ => return None,
        })
    }

    fn need(&self, name: &str, function: Function) -> Result<f64> {
        self.get(name)
            .ok_or_else(|| anyhow!("--{name} is required for --fn {function}"))
    }

    /// The parameters `function` reads, all of which must be set.
    pub fn used_by(&self, function: Function) -> Result<BTreeMap<String, f64>> {
        function
            .inputs()
            .iter()
            .map(|&n| Ok((n.to_string(), self.need(n, function)?)))
            .collect()
    }
}

/// Result of one evaluation, successful or not.
pub enum Evaluation {
    Done(Approx),
    Unconverged { reason: String, partial: Approx },
}

impl Evaluation {
    pub fn approx(&self) -> &Approx {
        match self {
            Evaluation::Done(a) => a,
            Evaluation::Unconverged { partial, .. } => partial,
        }
    }
}

/// Usage and domain problems are errors; convergence shortfalls are not.
pub fn evaluate(function: Function, p: &ParamRecord, route: Option<&str>, policy: &EvalPolicy) -> Result<Evaluation> {
    let v = |name: &str| p.need(name, function);
    if route.is_some() && function.default_route().is_none() {
        bail!("--route does not apply to --fn {function}");
    }
    let route = route.or(function.default_route()).unwrap_or_default();
    let outcome = match function {
        Function::Wright => wright_eval(WrightParams::series_only(v("alpha")?, v("beta")?)?, v("z")?, policy),
        Function::PsiGamma => psi::psi_gamma_p(PsiParams::new(v("alpha")?, v("beta")?, v("p")?)?, v("x")?, policy),
        Function::PsiGammaKernel => {
            psi::psi_gamma_kernel(WrightParams::new(v("alpha")?, v("beta")?)?, MellinPoint::new(v("s")?)?, policy)
        }
        Function::PsiBeta => {
            let r: BetaRoute = route.parse()?;
            psi::psi_beta(PsiParams::new(v("alpha")?, v("beta")?, v("p")?)?, v("x")?, v("y")?, r, policy)
        }
        Function::Psi2F1 => {
            let r: GaussRoute = route.parse()?;
            let hyp = HypParams::new(v("a")?, v("b")?, v("c")?)?;
            psi::psi_2f1(PsiParams::new(v("alpha")?, v("beta")?, v("p")?)?, hyp, v("z")?, r, policy)
        }
        Function::Psi1F1 => {
            let r: ConfluentRoute = route.parse()?;
            psi::psi_1f1(PsiParams::new(v("alpha")?, v("beta")?, v("p")?)?, v("b")?, v("c")?, v("z")?, r, policy)
        }
    };
    match outcome {
        Ok(a) => Ok(Evaluation::Done(a)),
        Err(NumError::Convergence { reason, partial }) => Ok(Evaluation::Unconverged { reason, partial }),
        Err(e) => Err(e.into()),
    }
}

/// Diagnostics printed with every evaluation.
#[derive(Debug, Serialize)]
pub struct Diagnostics {
    pub terms_used: usize,
    pub precision_digits_used: u32,
    pub nodes_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// The JSON object `eval` prints.
#[derive(Debug, Serialize)]
pub struct EvalOutput {
    pub function: String,
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub abs_err_est: f64,
    pub converged: bool,
    pub route: Option<String>,
    pub diagnostics: Diagnostics,
}

impl EvalOutput {
    pub fn new(function: Function, params: BTreeMap<String, f64>, route: Option<&str>, eval: &Evaluation) -> Self {
        let a = eval.approx();
        let message = match eval {
            Evaluation::Done(_) => None,
            Evaluation::Unconverged { reason, .. } => Some(reason.clone()),
        };
        EvalOutput {
            function: function.name().to_string(),
            params,
            value: a.value,
            abs_err_est: a.abs_err_est,
            converged: matches!(eval, Evaluation::Done(_)) && a.converged,
            route: route.or(function.default_route()).map(str::to_string),
            diagnostics: Diagnostics {
                terms_used: a.terms_used,
                precision_digits_used: a.precision_digits_used,
                nodes_evaluated: a.nodes_evaluated,
                message,
            },
        }
    }
}
