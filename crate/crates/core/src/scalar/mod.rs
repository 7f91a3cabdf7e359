//! One-dimensional k-generalized special functions.

mod hyp;
mod integrals;

use serde::Serialize;

use crate::error::{domain, Error, Result};

pub use hyp::{
    hyp1f1k, hyp1f1k_approx, hyp1f1k_deriv, hyp1f1k_integral, hyp1f1k_kummer, hyp1f1k_ln,
};
pub use integrals::{
    beta_ext1, beta_ext2, beta_hyp2, beta_k2, gamma_ext, gamma_hyp1, gamma_k, ExtReading,
};

pub(crate) use hyp::{ln_hyp, ln_neg_scaled};

/// The deformation parameter `k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct KParam(f64);

impl KParam {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return domain(format!("k must be positive and finite, got {k}"));
        }
        Ok(KParam(k))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Parameters `(a, b)` of ₁F₁,k.
///
/// `b = a` is accepted: the function then collapses to `e^l`, which several
/// reduction identities rely on. Only the integral representation needs
/// `b > a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypParams {
    a: f64,
    b: f64,
}

impl HypParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return domain(format!(
                "hypergeometric a must be positive and finite, got {a}"
            ));
        }
        if !(b >= a) {
            return domain(format!(
                "hypergeometric parameters need b >= a, got a={a}, b={b}"
            ));
        }
        Ok(HypParams { a, b })
    }

    pub fn a(self) -> f64 {
        self.a
    }

    pub fn b(self) -> f64 {
        self.b
    }

    /// True when `a = b`, i.e. ₁F₁,k(a;a;l) = e^l.
    pub fn is_degenerate(self) -> bool {
        self.a == self.b
    }

    /// `(a + k, b + k)`, the parameters of the derivative.
    pub fn shifted(self, k: KParam) -> Self {
        HypParams {
            a: self.a + k.get(),
            b: self.b + k.get(),
        }
    }

    /// `(a + 1, b + 1)`.
    pub fn shifted_unit(self) -> Self {
        HypParams {
            a: self.a + 1.0,
            b: self.b + 1.0,
        }
    }
}

/// Truncation control for the ₁F₁,k series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return domain(format!("series rel_tol must lie in (0,1), got {rel_tol}"));
        }
        if max_terms == 0 {
            return domain("series max_terms must be at least 1");
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-16,
            max_terms: 20_000,
        }
    }
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx {
    pub value: f64,
    pub abs_err: f64,
}

/// Pochhammer k-symbol `(a)_{m,k} = a(a+k)···(a+(m−1)k)`.
pub fn poch_k(a: f64, m: u64, k: KParam) -> Result<f64> {
    let mut p = 1.0;
    for i in 0..m {
        p *= a + i as f64 * k.get();
        if !p.is_finite() {
            return Err(Error::Range { index: i + 1 });
        }
    }
    Ok(p)
}

/// `ln Γ_k(φ) = (φ/k − 1) ln k + ln Γ(φ/k)` for `φ > 0`.
pub fn ln_gamma_k(phi: f64, k: KParam) -> f64 {
    let k = k.get();
    (phi / k - 1.0) * k.ln() + libm::lgamma(phi / k)
}

/// Γ_k from the scaling identity with the classical gamma function.
pub fn gamma_k_closed(phi: f64, k: KParam) -> f64 {
    ln_gamma_k(phi, k).exp()
}

/// `ln β_k(φ, ψ)` from log-gammas.
pub fn ln_beta_k2(phi: f64, psi: f64, k: KParam) -> f64 {
    ln_gamma_k(phi, k) + ln_gamma_k(psi, k) - ln_gamma_k(phi + psi, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: f64) -> KParam {
        KParam::new(v).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(poch_k(2.0, 0, k(1.0)).unwrap(), 1.0);
        assert_eq!(poch_k(2.0, 3, k(1.0)).unwrap(), 24.0);
        assert_eq!(poch_k(1.5, 2, k(0.5)).unwrap(), 3.0);
    }

    #[test]
    fn pochhammer_overflow_reports_index() {
        match poch_k(1e300, 5, k(1.0)) {
            Err(Error::Range { index }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(KParam::new(0.0).is_err());
        assert!(KParam::new(f64::NAN).is_err());
        assert!(HypParams::new(0.0, 1.0).is_err());
        assert!(HypParams::new(2.0, 1.0).is_err());
        assert!(HypParams::new(1.0, 1.0).unwrap().is_degenerate());
        assert!(SeriesControl::new(1.0, 10).is_err());
        assert!(SeriesControl::new(1e-10, 0).is_err());
    }

    #[test]
    fn closed_form_gamma_k() {
        assert!((gamma_k_closed(5.0, k(1.0)) - 24.0).abs() < 1e-12);
        assert!((gamma_k_closed(2.0, k(2.0)) - 1.0).abs() < 1e-14);
    }
}
