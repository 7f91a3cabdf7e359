//! Parameter draws for the registered checks.

use rand::Rng;
use serde::Serialize;

use super::{SuiteConfig, TheoremId};
use crate::error::{Error, Result};
use crate::multivar::{FirstKindParams, PhiVec, SecondKindParams};
use crate::quadrature::RngState;
use crate::scalar::{HypParams, KParam};

const MAX_RETRIES: usize = 1000;

/// First-kind parameters `(a, b, η, ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstDraw {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    pub zeta: f64,
}

/// Second-kind per-coordinate parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondDraw {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
}

/// One parameter set. Unused parts are empty and omitted from reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    pub k: f64,
    pub phi: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub psi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<FirstDraw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<SecondDraw>,
    /// Moment orders: one entry for first-kind moments, `n` for second-kind.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<f64>,
}

impl Params {
    pub fn first_kind(k: f64, phi: Vec<f64>, a: f64, b: f64, eta: f64, zeta: f64) -> Self {
        Params {
            k,
            phi,
            psi: Vec::new(),
            first: Some(FirstDraw { a, b, eta, zeta }),
            second: None,
            z: Vec::new(),
        }
    }

    pub fn second_kind(
        k: f64,
        phi: Vec<f64>,
        p: Vec<f64>,
        q: Vec<f64>,
        eta: Vec<f64>,
        zeta: Vec<f64>,
    ) -> Self {
        Params {
            k,
            phi,
            psi: Vec::new(),
            first: None,
            second: Some(SecondDraw { p, q, eta, zeta }),
            z: Vec::new(),
        }
    }

    pub fn with_psi(mut self, psi: Vec<f64>) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_z(mut self, z: Vec<f64>) -> Self {
        self.z = z;
        self
    }

    pub fn kparam(&self) -> Result<KParam> {
        KParam::new(self.k)
    }

    pub fn phi_vec(&self) -> Result<PhiVec> {
        PhiVec::new(self.phi.clone(), self.kparam()?)
    }

    pub fn psi_vec(&self) -> Result<PhiVec> {
        PhiVec::new(self.psi.clone(), self.kparam()?)
    }

    pub fn first_params(&self) -> Result<FirstKindParams> {
        let f = self
            .first
            .ok_or_else(|| Error::Config("missing first-kind parameters".into()))?;
        FirstKindParams::new(HypParams::new(f.a, f.b)?, f.eta, f.zeta)
    }

    pub fn second_params(&self) -> Result<SecondKindParams> {
        let s = self
            .second
            .as_ref()
            .ok_or_else(|| Error::Config("missing second-kind parameters".into()))?;
        SecondKindParams::new(s.p.clone(), s.q.clone(), s.eta.clone(), s.zeta.clone())
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        lo + (hi - lo) * rng.random::<f64>()
    }
}

fn uniforms<R: Rng>(rng: &mut R, n: usize, range: (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, range)).collect()
}

/// Region emptiness that can be decided without sampling.
fn check_feasible(id: TheoremId, cfg: &SuiteConfig) -> Result<()> {
    if id == TheoremId::TangentLower && cfg.phi_range.1 <= cfg.k_range.0 {
        return Err(Error::Config(format!(
            "{}: needs phi_i > k but phi <= {} and k >= {}",
            id.as_str(),
            cfg.phi_range.1,
            cfg.k_range.0
        )));
    }
    if id.has_moments() && cfg.z_range.0 > 0.9 * cfg.hyp_a_range.1 {
        return Err(Error::Config(format!(
            "{}: moment order must stay below 0.9·a but z >= {} and a <= {}",
            id.as_str(),
            cfg.z_range.0,
            cfg.hyp_a_range.1
        )));
    }
    Ok(())
}

/// Draws a parameter set satisfying the hypotheses of `id`, consuming one
/// block of `rng` per attempt.
pub fn sample_params(id: TheoremId, cfg: &SuiteConfig, rng: &mut RngState) -> Result<Params> {
    cfg.validate()?;
    check_feasible(id, cfg)?;
    for _ in 0..MAX_RETRIES {
        let mut r = rng.next_block();
        if let Some(p) = draw(id, cfg, &mut r) {
            return Ok(p);
        }
    }
    Err(Error::Config(format!(
        "{}: no admissible parameters after {MAX_RETRIES} draws",
        id.as_str()
    )))
}

fn draw<R: Rng>(id: TheoremId, cfg: &SuiteConfig, r: &mut R) -> Option<Params> {
    let n = if id.has_moments() && id != TheoremId::LowerHyp {
        2
    } else {
        cfg.n_values[r.random_range(0..cfg.n_values.len())]
    };
    let k = uniform(r, cfg.k_range);
    let phi = uniforms(r, n, cfg.phi_range);
    if id == TheoremId::TangentLower && phi.iter().any(|&p| p <= k) {
        return None;
    }
    let mut params = if id.is_second_kind() {
        let p = uniforms(r, n, cfg.hyp_a_range);
        let q = p
            .iter()
            .map(|&pi| pi + uniform(r, cfg.hyp_gap_range))
            .collect();
        let eta = uniforms(r, n, cfg.eta_range);
        let zeta = uniforms(r, n, cfg.zeta_range);
        Params::second_kind(k, phi, p, q, eta, zeta)
    } else {
        let a = uniform(r, cfg.hyp_a_range);
        let b = a + uniform(r, cfg.hyp_gap_range);
        let eta = uniform(r, cfg.eta_range);
        let zeta = if id == TheoremId::MomentUpper {
            0.0
        } else {
            uniform(r, cfg.zeta_range)
        };
        if id == TheoremId::UpperRefinement && eta.powf(2.0 * k) < k * zeta.powf(k) {
            return None;
        }
        Params::first_kind(k, phi, a, b, eta, zeta)
    };
    if id.is_convexity() {
        params.psi = uniforms(r, n, cfg.phi_range);
    }
    if id.has_moments() {
        // the ζ-moments are finite only while 2z < a + φ_i
        let phi_min = params.phi.iter().cloned().fold(f64::INFINITY, f64::min);
        let caps: Vec<f64> = match (&params.second, params.first) {
            (Some(s), _) => {
                s.p.iter()
                    .zip(&params.phi)
                    .map(|(&p, &f)| p.min(0.5 * (p + f)))
                    .collect()
            }
            (None, Some(f)) if id == TheoremId::MomentUpper => vec![f.a],
            (None, Some(f)) => vec![f.a.min(0.5 * (f.a + phi_min))],
            (None, None) => return None,
        };
        let mut z = Vec::with_capacity(caps.len());
        for cap in caps {
            let hi = cfg.z_range.1.min(0.9 * cap);
            if hi < cfg.z_range.0 {
                return None;
            }
            z.push(uniform(r, (cfg.z_range.0, hi)));
        }
        params.z = z;
    }
    Some(params)
}
