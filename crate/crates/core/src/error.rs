use thiserror::Error;

/// Failures raised by evaluators and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A product overflowed; `index` is the factor count reached.
    #[error("range error: overflow after {index} factors")]
    Range { index: u64 },

    #[error("series did not converge within {terms} terms (last term {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("quadrature missed its tolerance: best {best:e} with error {abs_err:e}")]
    Quadrature { best: f64, abs_err: f64 },

    #[error("result overflows f64 (ln value {ln_value:.3})")]
    Overflow { ln_value: f64 },

    #[error("non-finite integrand value")]
    NonFinite,

    #[error("evaluation budget of {budget} integrand calls exceeded")]
    Budget { budget: u64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
