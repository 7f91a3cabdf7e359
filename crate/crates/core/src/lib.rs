//! k-generalized gamma and beta functions for several variables.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`] holds the one-dimensional functions: the Pochhammer
//!   k-symbol, Γ_k, β_k, their extended forms and the confluent
//!   hypergeometric k-function ₁F₁,k with its series, integral, Kummer and
//!   derivative forms.
//! * [`quadrature`] is the integration engine: double-exponential rules on
//!   `(0,1)` and `(0,∞)`, a stick-breaking simplex rule for `n ≤ 4` and a
//!   Dirichlet importance sampler for any `n`.
//! * [`multivar`] is the catalogue of n-variable functions built on top of
//!   the two modules above.
//! * [`harness`] encodes the inequalities satisfied by the first- and
//!   second-kind generalized betas as error-aware checks, samples
//!   parameters and aggregates reports.

pub mod error;
mod float_serde;
pub mod harness;
pub mod multivar;
pub mod parallel;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use parallel::Execution;
pub use quadrature::{Method, QuadResult};
pub use scalar::{Approx, HypParams, KParam, SeriesControl};
