//! n-variable k-beta and k-gamma functions.
//!
//! Every simplex function here has the shape
//! `k^{1−n} ∫_{E_{n−1}} ∏ t_i^{φ_i/k−1} g(t) dt` and is evaluated either by
//! the nested deterministic rule or as `β_k(φ)·E_{Dirichlet(φ/k)}[g]`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::parallel::Execution;
use crate::quadrature::{
    mc_dirichlet_try, simplex_raw, DeOptions, QuadResult, RngState, SimplexPoint, MAX_DIM,
};
use crate::scalar::{gamma_ext, gamma_hyp1, ln_gamma_k, ln_hyp, HypParams, KParam, SeriesControl};

/// Shape exponents `φ ∈ (0,∞)^n` together with `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiVec {
    phi: Vec<f64>,
    k: KParam,
}

impl PhiVec {
    pub fn new(phi: Vec<f64>, k: KParam) -> Result<Self> {
        if phi.is_empty() || phi.len() > MAX_DIM {
            return domain(format!(
                "phi must have 1..={MAX_DIM} entries, got {}",
                phi.len()
            ));
        }
        if phi.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return domain("phi entries must be positive and finite");
        }
        Ok(PhiVec { phi, k })
    }

    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn k(&self) -> KParam {
        self.k
    }

    /// `σ(φ) = Σ φ_i`
    pub fn sigma(&self) -> f64 {
        self.phi.iter().sum()
    }

    /// Dirichlet parameters `φ_i/k`.
    pub fn alpha(&self) -> Vec<f64> {
        self.phi.iter().map(|p| p / self.k.get()).collect()
    }

    /// `φ + c·e`
    pub fn shifted(&self, c: f64) -> Result<Self> {
        PhiVec::new(self.phi.iter().map(|p| p + c).collect(), self.k)
    }

    /// `c·φ`
    pub fn scaled(&self, c: f64) -> Result<Self> {
        PhiVec::new(self.phi.iter().map(|p| p * c).collect(), self.k)
    }

    /// `φ + ψ`
    pub fn plus(&self, other: &PhiVec) -> Result<Self> {
        if other.n() != self.n() {
            return domain("phi vectors differ in length");
        }
        PhiVec::new(
            self.phi
                .iter()
                .zip(&other.phi)
                .map(|(a, b)| a + b)
                .collect(),
            self.k,
        )
    }

    fn need_simplex(&self) -> Result<()> {
        if self.n() < 2 {
            return domain("simplex functions need n >= 2");
        }
        Ok(())
    }
}

/// Parameters of the first-kind generalized beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstKindParams {
    pub h: HypParams,
    pub eta: f64,
    pub zeta: f64,
}

impl FirstKindParams {
    pub fn new(h: HypParams, eta: f64, zeta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return domain(format!("eta must be positive and finite, got {eta}"));
        }
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return domain(format!("zeta must be nonnegative and finite, got {zeta}"));
        }
        Ok(FirstKindParams { h, eta, zeta })
    }
}

/// Per-coordinate parameters of the second-kind generalized beta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondKindParams {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl SecondKindParams {
    /// `q_i = p_i` is accepted (the coordinate factor collapses to an
    /// exponential).
    pub fn new(p: Vec<f64>, q: Vec<f64>, eta: Vec<f64>, zeta: Vec<f64>) -> Result<Self> {
        let n = p.len();
        if q.len() != n || eta.len() != n || zeta.len() != n {
            return domain("second-kind parameter vectors must share one length");
        }
        for i in 0..n {
            HypParams::new(p[i], q[i])?;
            if !(eta[i] > 0.0 && eta[i].is_finite()) {
                return domain(format!("eta[{i}] must be positive, got {}", eta[i]));
            }
            if !(zeta[i] >= 0.0 && zeta[i].is_finite()) {
                return domain(format!("zeta[{i}] must be nonnegative, got {}", zeta[i]));
            }
        }
        Ok(SecondKindParams { p, q, eta, zeta })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn hyp(&self, i: usize) -> HypParams {
        HypParams::new(self.p[i], self.q[i]).expect("validated on construction")
    }
}

/// How a simplex integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EvalMethod {
    Deterministic {
        tol: f64,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
        stream: u64,
    },
}

impl EvalMethod {
    pub const DEFAULT_TOL: f64 = 1e-9;
    pub const DEFAULT_SAMPLES: usize = 100_000;

    /// Deterministic for `n ≤ 3`, Monte Carlo with 10^5 samples otherwise.
    pub fn default_for(n: usize, seed: u64) -> Self {
        if n <= 3 {
            EvalMethod::Deterministic {
                tol: Self::DEFAULT_TOL,
            }
        } else {
            EvalMethod::MonteCarlo {
                samples: Self::DEFAULT_SAMPLES,
                seed,
                stream: 0,
            }
        }
    }
}

/// How the exponents of the vector-parameter extended beta couple to `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// `e^{−Σ a_i^k/(k π(t))}`, one shared denominator.
    #[default]
    Simplex,
    /// `∏ e^{−a_i^k/(k t_i)}`, one denominator per coordinate.
    Coordinate,
}

/// `ln β_k(φ) = Σ ln Γ_k(φ_i) − ln Γ_k(σ(φ))`.
pub fn ln_beta_k_n(pv: &PhiVec) -> Result<f64> {
    pv.need_simplex()?;
    let k = pv.k();
    Ok(pv.phi().iter().map(|&p| ln_gamma_k(p, k)).sum::<f64>() - ln_gamma_k(pv.sigma(), k))
}

/// `β_k(φ) = ∏ Γ_k(φ_i)/Γ_k(σ(φ))`, assembled in log space.
pub fn beta_k_n(pv: &PhiVec) -> Result<f64> {
    let ln = ln_beta_k_n(pv)?;
    if ln > 709.78 {
        return Err(Error::Overflow { ln_value: ln });
    }
    Ok(ln.exp())
}

/// `β_k(φ)` as an exact constant with a rounding-level error.
pub(crate) fn beta_k_n_exact(pv: &PhiVec) -> Result<QuadResult> {
    let v = beta_k_n(pv)?;
    let ln = ln_beta_k_n(pv)?;
    Ok(QuadResult::deterministic(
        v,
        v * 16.0 * f64::EPSILON * (1.0 + ln.abs()),
        0,
    ))
}

/// `k^{1−n} ∫_{E_{n−1}} ∏ t_i^{φ_i/k−1} g(t) dt` for an integrand returning
/// a value and its absolute error.
pub fn integrate_phi<G>(pv: &PhiVec, method: EvalMethod, g: G) -> Result<QuadResult>
where
    G: Fn(&SimplexPoint) -> Result<(f64, f64)> + Sync,
{
    pv.need_simplex()?;
    let alpha = pv.alpha();
    let n = pv.n();
    match method {
        EvalMethod::Deterministic { tol } => {
            if n > 4 {
                return domain(format!("deterministic evaluation supports n <= 4, got {n}"));
            }
            if !(tol > 0.0 && tol < 1.0) {
                return domain(format!("tolerance must lie in (0,1), got {tol}"));
            }
            let raw = simplex_raw(&alpha, &g, &DeOptions::with_tol(tol))?;
            let pre = pv.k().get().powi(1 - n as i32);
            if !raw.converged {
                return Err(Error::Quadrature {
                    best: pre * raw.value,
                    abs_err: pre * raw.abs_err,
                });
            }
            Ok(QuadResult::deterministic(raw.value, raw.abs_err, raw.evals).scale(pre))
        }
        EvalMethod::MonteCarlo {
            samples,
            seed,
            stream,
        } => {
            let mut rng = RngState::with_stream(seed, stream);
            let mean = mc_dirichlet_try(
                &alpha,
                |t| Ok(g(t)?.0),
                samples,
                &mut rng,
                Execution::default(),
            )?;
            Ok(mean.mul(beta_k_n_exact(pv)?))
        }
    }
}

fn plain<F>(f: F) -> impl Fn(&SimplexPoint) -> Result<(f64, f64)> + Sync
where
    F: Fn(&SimplexPoint) -> f64 + Sync,
{
    move |t| Ok((f(t), 0.0))
}

/// `β_k(φ)` by direct integration.
pub fn beta_k_n_quad(pv: &PhiVec, method: EvalMethod) -> Result<QuadResult> {
    integrate_phi(pv, method, plain(|_| 1.0))
}

/// `k^{1−n} ∫ ∏ t_i^{φ_i/k−1} e^{−a^k/(k π(t))} dt`.
pub fn beta_ext_n(pv: &PhiVec, a: f64, method: EvalMethod) -> Result<QuadResult> {
    if !(a >= 0.0 && a.is_finite()) {
        return domain(format!("a must be nonnegative and finite, got {a}"));
    }
    let kv = pv.k().get();
    let c = a.powf(kv) / kv;
    integrate_phi(
        pv,
        method,
        plain(move |t| if c == 0.0 { 1.0 } else { (-c / t.pi()).exp() }),
    )
}

/// Vector-parameter extended beta; see [`Coupling`] for the two readings.
pub fn beta_ext_n_vec(
    pv: &PhiVec,
    a: &[f64],
    coupling: Coupling,
    method: EvalMethod,
) -> Result<QuadResult> {
    if a.len() != pv.n() {
        return domain(format!(
            "expected {} extension parameters, got {}",
            pv.n(),
            a.len()
        ));
    }
    if a.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return domain("extension parameters must be nonnegative and finite");
    }
    let kv = pv.k().get();
    let c: Vec<f64> = a.iter().map(|x| x.powf(kv) / kv).collect();
    match coupling {
        Coupling::Simplex => {
            let total: f64 = c.iter().sum();
            integrate_phi(
                pv,
                method,
                plain(move |t| {
                    if total == 0.0 {
                        1.0
                    } else {
                        (-total / t.pi()).exp()
                    }
                }),
            )
        }
        Coupling::Coordinate => integrate_phi(
            pv,
            method,
            plain(move |t| {
                let e: f64 = c
                    .iter()
                    .zip(t.coords())
                    .map(|(ci, ti)| if *ci == 0.0 { 0.0 } else { ci / ti })
                    .sum();
                (-e).exp()
            }),
        ),
    }
}

/// Orthant gamma `∫_{(0,∞)^n} ∏ m_i^{φ_i−1} e^{−m_i^k/k − c_i^k/(k m_i^k)} dm`,
/// computed as the product of its one-dimensional factors.
pub fn gamma_kc(pv: &PhiVec, c: &[f64]) -> Result<QuadResult> {
    if c.len() != pv.n() {
        return domain(format!("expected {} c parameters, got {}", pv.n(), c.len()));
    }
    let mut acc = QuadResult::exact(1.0);
    for (&p, &ci) in pv.phi().iter().zip(c) {
        acc = acc.mul(gamma_ext(p, ci, pv.k())?);
    }
    Ok(acc)
}

/// Hypergeometric orthant gamma, the product of [`gamma_hyp1`] factors.
pub fn gamma_kc_hyp(pv: &PhiVec, c: &[f64], hv: &[HypParams]) -> Result<QuadResult> {
    if c.len() != pv.n() || hv.len() != pv.n() {
        return domain(format!(
            "expected {} c and hypergeometric parameters",
            pv.n()
        ));
    }
    let mut acc = QuadResult::exact(1.0);
    for ((&p, &ci), &h) in pv.phi().iter().zip(c).zip(hv) {
        acc = acc.mul(gamma_hyp1(p, ci, h, pv.k())?);
    }
    Ok(acc)
}

/// ₁F₁,k value and absolute error for use inside integrands.
pub(crate) fn hyp_value(h: HypParams, l: f64, k: KParam) -> Result<(f64, f64)> {
    if h.is_degenerate() {
        return Ok((l.exp(), 0.0));
    }
    let kv = k.get();
    let (ln, rel) = ln_hyp(h.a() / kv, h.b() / kv, l, SeriesControl::default())?;
    if ln > 709.78 {
        return Err(Error::Overflow { ln_value: ln });
    }
    let v = ln.exp();
    Ok((v, v * rel))
}

/// Argument of the first-kind integrand, `−η^k/(kπ) − ζ^k π/η^k`.
pub(crate) fn first_kind_arg(eta: f64, zeta: f64, k: f64, pi: f64) -> f64 {
    let ek = eta.powf(k);
    let z = if zeta == 0.0 {
        0.0
    } else {
        zeta.powf(k) * pi / ek
    };
    -ek / (k * pi) - z
}

/// Argument of the i-th second-kind factor, `−η^k/(k t) − ζ^k t/η^k`.
pub(crate) fn second_kind_arg(eta: f64, zeta: f64, k: f64, t: f64) -> f64 {
    let ek = eta.powf(k);
    let z = if zeta == 0.0 {
        0.0
    } else {
        zeta.powf(k) * t / ek
    };
    -ek / (k * t) - z
}

/// First-kind generalized beta
/// `k^{1−n} ∫ ∏ t_i^{φ_i/k−1} ₁F₁,k(a; b; −η^k/(kπ(t)) − ζ^k π(t)/η^k) dt`.
pub fn beta_first(pv: &PhiVec, fp: &FirstKindParams, method: EvalMethod) -> Result<QuadResult> {
    let k = pv.k();
    let kv = k.get();
    let FirstKindParams { h, eta, zeta } = *fp;
    integrate_phi(pv, method, move |t| {
        hyp_value(h, first_kind_arg(eta, zeta, kv, t.pi()), k)
    })
}

/// Second-kind generalized beta
/// `k^{1−n} ∫ ∏ t_i^{φ_i/k−1} ∏ ₁F₁,k(p_i; q_i; −η_i^k/(k t_i) − ζ_i^k t_i/η_i^k) dt`.
pub fn beta_second(pv: &PhiVec, sp: &SecondKindParams, method: EvalMethod) -> Result<QuadResult> {
    if sp.n() != pv.n() {
        return domain(format!(
            "second-kind parameters have length {}, phi has {}",
            sp.n(),
            pv.n()
        ));
    }
    let k = pv.k();
    let kv = k.get();
    let hs: Vec<HypParams> = (0..sp.n()).map(|i| sp.hyp(i)).collect();
    integrate_phi(pv, method, move |t| {
        let mut v = 1.0;
        let mut rel = 0.0;
        for (i, &ti) in t.coords().iter().enumerate() {
            let (f, e) = hyp_value(hs[i], second_kind_arg(sp.eta[i], sp.zeta[i], kv, ti), k)?;
            if f == 0.0 {
                return Ok((0.0, 0.0));
            }
            v *= f;
            rel += e / f;
        }
        Ok((v, v * rel))
    })
}
