use super::tanh_sinh::{DeOptions, Raw};
use super::weighted::weighted_raw;
use super::QuadResult;
use crate::error::{domain, Error, Result};
use crate::scalar::KParam;

/// Largest number of simplex coordinates supported anywhere in the crate.
pub const MAX_DIM: usize = 10;

/// A point of the simplex `E_{n−1}` stored with all `n` coordinates,
/// including the implied `t_n = 1 − Σ_{i<n} t_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexPoint {
    n: usize,
    t: [f64; MAX_DIM],
}

impl SimplexPoint {
    /// Builds a point from its first `n − 1` coordinates.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let n = coords.len() + 1;
        if !(2..=MAX_DIM).contains(&n) {
            return domain(format!("simplex dimension {n} outside 2..={MAX_DIM}"));
        }
        if coords.iter().any(|&c| !(c >= 0.0)) {
            return domain("simplex coordinates must be nonnegative");
        }
        let s: f64 = coords.iter().sum();
        if s > 1.0 + 4.0 * f64::EPSILON * n as f64 {
            return domain(format!("simplex coordinates sum to {s} > 1"));
        }
        let mut t = [0.0; MAX_DIM];
        t[..n - 1].copy_from_slice(coords);
        t[n - 1] = (1.0 - s).max(0.0);
        Ok(SimplexPoint { n, t })
    }

    /// Builds a point from all `n` coordinates, which must sum to 1 up to
    /// rounding. Used by samplers that produce the last coordinate directly.
    pub(crate) fn from_full(t_all: &[f64]) -> Self {
        let mut t = [0.0; MAX_DIM];
        t[..t_all.len()].copy_from_slice(t_all);
        SimplexPoint { n: t_all.len(), t }
    }

    pub(crate) fn zeroed(n: usize) -> Self {
        SimplexPoint {
            n,
            t: [0.0; MAX_DIM],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All `n` coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.t[..self.n]
    }

    pub fn last(&self) -> f64 {
        self.t[self.n - 1]
    }

    /// `π(t) = ∏ t_i` over all `n` coordinates.
    pub fn pi(&self) -> f64 {
        self.coords().iter().product()
    }
}

pub fn pi_of(t: &SimplexPoint) -> f64 {
    t.pi()
}

/// `n^{−n}`, the maximum of `π` over `E_{n−1}`.
pub fn sup_pi(n: usize) -> f64 {
    assert!(n >= 2, "sup_pi needs n >= 2");
    (-(n as f64) * (n as f64).ln()).exp()
}

fn check_alpha(alpha: &[f64]) -> Result<()> {
    let n = alpha.len();
    if !(2..=MAX_DIM).contains(&n) {
        return domain(format!("simplex dimension {n} outside 2..={MAX_DIM}"));
    }
    if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return domain("simplex exponents must be positive and finite");
    }
    Ok(())
}

struct Nest<'a, G> {
    alpha: &'a [f64],
    /// `suffix[j] = Σ_{i≥j} alpha_i`
    suffix: [f64; MAX_DIM + 1],
    g: &'a G,
}

impl<G> Nest<'_, G>
where
    G: Fn(&SimplexPoint) -> Result<(f64, f64)>,
{
    /// Integrates over `t_j` given the earlier coordinates in `pt` and the
    /// remaining mass `rem = 1 − Σ_{i<j} t_i`. Stick-breaking with
    /// `t_j = rem·x` turns the Dirichlet weight into the Jacobi weight
    /// `x^{α_j−1}(1−x)^{A_{j+1}−1}`.
    fn level(&self, j: usize, pt: SimplexPoint, rem: f64, opts: &DeOptions) -> Result<Raw> {
        let n = self.alpha.len();
        let inner_opts = DeOptions {
            rel_tol: 0.25 * opts.rel_tol,
            max_panels: opts.max_panels.min(8),
            ..*opts
        };
        let f = |x: f64, xc: f64| {
            let mut p = pt;
            p.t[j] = rem * x;
            let rest = rem * xc;
            if j + 2 == n {
                p.t[n - 1] = rest;
                (self.g)(&p)
            } else {
                let r = self.level(j + 1, p, rest, &inner_opts)?;
                Ok((r.value, r.abs_err))
            }
        };
        weighted_raw(self.alpha[j], self.suffix[j + 1], &f, opts)
    }
}

/// Lenient `∫_{E_{n−1}} ∏ t_i^{α_i−1} g(t) dt` (no `k` prefactor).
pub(crate) fn simplex_raw<G>(alpha: &[f64], g: &G, opts: &DeOptions) -> Result<Raw>
where
    G: Fn(&SimplexPoint) -> Result<(f64, f64)>,
{
    check_alpha(alpha)?;
    let n = alpha.len();
    let mut suffix = [0.0; MAX_DIM + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + alpha[j];
    }
    let nest = Nest { alpha, suffix, g };
    nest.level(0, SimplexPoint::zeroed(n), 1.0, opts)
}

/// `k^{1−n} ∫_{E_{n−1}} ∏ t_i^{φ_i/k−1} g(t) dt` by a nested
/// double-exponential rule, for `n ∈ 2..=4`.
pub fn integrate_simplex_det<G>(
    n: usize,
    exponents: &[f64],
    g: G,
    k: KParam,
    tol: f64,
) -> Result<QuadResult>
where
    G: Fn(&SimplexPoint) -> f64,
{
    if !(2..=4).contains(&n) {
        return domain(format!(
            "deterministic simplex rule supports n in 2..=4, got {n}"
        ));
    }
    if exponents.len() != n {
        return domain(format!("expected {n} exponents, got {}", exponents.len()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return domain(format!("tolerance must lie in (0,1), got {tol}"));
    }
    let kv = k.get();
    let alpha: Vec<f64> = exponents.iter().map(|&p| p / kv).collect();
    let h = |t: &SimplexPoint| Ok((g(t), 0.0));
    let raw = simplex_raw(&alpha, &h, &DeOptions::with_tol(tol))?;
    if !raw.converged {
        return Err(Error::Quadrature {
            best: raw.value,
            abs_err: raw.abs_err,
        });
    }
    let pre = kv.powi(1 - n as i32);
    Ok(QuadResult::deterministic(raw.value, raw.abs_err, raw.evals).scale(pre))
}
