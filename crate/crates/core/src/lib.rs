//! Wright-function generalizations of the gamma, beta, Gauss and confluent
//! hypergeometric functions.
//!
//! The kernel throughout is the Wright function
//! `₁Ψ₁(α, β; z) = Σ zⁿ / (n! Γ(αn + β))`, which replaces the exponential
//! kernel `exp(-p/t)` of the extended (Chaudhry-type) functions:
//!
//! * [`wright`]: the kernel itself, summed in escalated working precision.
//! * [`quadrature`]: tanh-sinh / exp-sinh rules used by every integral.
//! * [`classical`]: independent reference implementations (Γ, B, ₂F₁, ₁F₁,
//!   Γ_p, B_p, Bessel J₀/J₁) used as oracles.
//! * [`psi`]: Ψ-gamma, Ψ-beta, the Mellin kernel, ΨF and ΨΦ.
//! * [`identities`]: executable residual checks for every proven relation.

pub mod classical;
pub mod dd;
mod error;
pub mod identities;
mod lgamma;
mod policy;
pub mod psi;
pub mod quadrature;
pub mod wright;

pub use error::{NumError, Result};
pub use policy::{Approx, EvalPolicy};
