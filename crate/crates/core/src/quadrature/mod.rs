//! Integration engine.
//!
//! * [`integrate_01_weighted`]: `∫₀¹ x^{px−1}(1−x)^{py−1} f(x) dx` with the
//!   Jacobi weight evaluated at double-exponential nodes that carry both `x`
//!   and `1−x` exactly.
//! * [`integrate_halfline`]: `∫₀^∞ m^{φ−1} f(m) dm`, split at a pivot and
//!   mapped to two unit-interval problems.
//! * [`integrate_simplex_det`]: stick-breaking tensor rule over `E_{n−1}`
//!   for `n ≤ 4`.
//! * [`mc_dirichlet`]: Dirichlet importance sampling for any `n ≤ 10`.

mod montecarlo;
mod simplex;
mod tanh_sinh;
mod weighted;

use serde::Serialize;

pub(crate) use montecarlo::mc_dirichlet_try;
pub use montecarlo::{mc_dirichlet, mc_dirichlet_with, sample_dirichlet, RngState};
pub use simplex::{integrate_simplex_det, pi_of, sup_pi, SimplexPoint, MAX_DIM};
pub use weighted::{integrate_01_weighted, integrate_halfline, integrate_halfline_pivot};

pub(crate) use simplex::simplex_raw;
pub(crate) use tanh_sinh::{DeOptions, Raw};
pub(crate) use weighted::{default_pivot, halfline_power_raw, halfline_raw, weighted_raw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Deterministic,
    MonteCarlo,
}

/// An integral (or any computed quantity) with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    #[serde(serialize_with = "crate::float_serde::float")]
    pub value: f64,
    #[serde(serialize_with = "crate::float_serde::float")]
    pub abs_err: f64,
    pub evals: u64,
    pub method: Method,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::float_serde::float_opt"
    )]
    pub stderr: Option<f64>,
}

impl QuadResult {
    pub fn deterministic(value: f64, abs_err: f64, evals: u64) -> Self {
        QuadResult {
            value,
            abs_err,
            evals,
            method: Method::Deterministic,
            stderr: None,
        }
    }

    /// Monte Carlo estimate; `abs_err` is three standard errors.
    pub fn monte_carlo(value: f64, stderr: f64, evals: u64) -> Self {
        QuadResult {
            value,
            abs_err: 3.0 * stderr,
            evals,
            method: Method::MonteCarlo,
            stderr: Some(stderr),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        QuadResult {
            value: self.value * c,
            abs_err: self.abs_err * c.abs(),
            stderr: self.stderr.map(|s| s * c.abs()),
            ..self
        }
    }

    pub fn add(self, other: QuadResult) -> Self {
        let method = if self.method == Method::MonteCarlo || other.method == Method::MonteCarlo {
            Method::MonteCarlo
        } else {
            Method::Deterministic
        };
        let stderr = match (self.stderr, other.stderr) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
        };
        QuadResult {
            value: self.value + other.value,
            abs_err: self.abs_err + other.abs_err,
            evals: self.evals + other.evals,
            method,
            stderr,
        }
    }

    pub fn sub(self, other: QuadResult) -> Self {
        self.add(other.scale(-1.0))
    }

    /// An exactly known constant, carrying only its rounding error.
    pub fn exact(value: f64) -> Self {
        QuadResult::deterministic(value, 4.0 * f64::EPSILON * value.abs(), 0)
    }

    /// Product with first-order error propagation.
    pub fn mul(self, other: QuadResult) -> Self {
        let value = self.value * other.value;
        let abs_err = self.value.abs() * other.abs_err
            + other.value.abs() * self.abs_err
            + self.abs_err * other.abs_err;
        let method = if self.method == Method::MonteCarlo || other.method == Method::MonteCarlo {
            Method::MonteCarlo
        } else {
            Method::Deterministic
        };
        let stderr = match (self.stderr, other.stderr) {
            (None, None) => None,
            (a, b) => {
                Some(self.value.abs() * b.unwrap_or(0.0) + other.value.abs() * a.unwrap_or(0.0))
            }
        };
        QuadResult {
            value,
            abs_err,
            evals: self.evals + other.evals,
            method,
            stderr,
        }
    }

    /// Whether the reported error meets `rel_tol` relative to the value.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.abs_err <= rel_tol * self.value.abs().max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_propagates_errors() {
        let a = QuadResult::deterministic(2.0, 0.1, 10);
        let b = QuadResult::deterministic(3.0, 0.2, 5);
        let c = a.mul(b);
        assert_eq!(c.value, 6.0);
        assert!((c.abs_err - (2.0 * 0.2 + 3.0 * 0.1 + 0.02)).abs() < 1e-15);
        assert_eq!(c.evals, 15);
    }

    #[test]
    fn monte_carlo_error_is_three_sigma() {
        let r = QuadResult::monte_carlo(1.0, 0.01, 100);
        assert_eq!(r.abs_err, 0.03);
        assert_eq!(r.stderr, Some(0.01));
    }
}
