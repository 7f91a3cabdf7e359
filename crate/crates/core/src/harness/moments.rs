//! Moment integrals over the extension parameters, as nested quadratures.
//!
//! The integrands decay only algebraically when `b > a`, so every
//! half-line tail goes through the power mapping with `₁F₁(−X)` rescaled
//! by `X^α`. Every innermost integrand call is counted against a hard
//! budget.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::multivar::{first_kind_arg, hyp_value, PhiVec};
use crate::quadrature::{
    halfline_power_raw, halfline_raw, simplex_raw, DeOptions, QuadResult, Raw, SimplexPoint,
};
use crate::scalar::{ln_neg_scaled, HypParams, KParam, SeriesControl};

/// Integrand evaluations allowed per moment integral.
pub const EVAL_BUDGET: u64 = 2_000_000;

/// Largest split point used for the per-coordinate integrals.
const MAX_PIVOT: f64 = 1e100;

pub(crate) struct Counter {
    used: Cell<u64>,
    budget: u64,
}

impl Counter {
    pub(crate) fn new(budget: u64) -> Self {
        Counter {
            used: Cell::new(0),
            budget,
        }
    }

    fn tick(&self) -> Result<()> {
        let u = self.used.get() + 1;
        self.used.set(u);
        if u > self.budget {
            return Err(Error::Budget {
                budget: self.budget,
            });
        }
        Ok(())
    }

    pub(crate) fn used(&self) -> u64 {
        self.used.get()
    }
}

fn logaddexp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn inner_opts(tol: f64) -> DeOptions {
    DeOptions {
        max_panels: 8,
        ..DeOptions::with_tol(0.25 * tol)
    }
}

fn finish(raw: Raw, scale: f64, counter: &Counter) -> Result<QuadResult> {
    let (value, abs_err) = (scale * raw.value, scale * raw.abs_err);
    if !raw.converged {
        return Err(Error::Quadrature {
            best: value,
            abs_err,
        });
    }
    Ok(QuadResult::deterministic(value, abs_err, counter.used()))
}

/// `H = (w/X)^α · X^α ₁F₁(α; β; −X)` from `ln(w/X)` and `ln X`.
fn scaled_tail(alpha: f64, beta: f64, ln_ratio: f64, ln_x: f64) -> Result<(f64, f64)> {
    if ln_ratio == f64::NEG_INFINITY {
        return Ok((0.0, 0.0));
    }
    let x = if ln_x > 709.0 {
        f64::INFINITY
    } else {
        ln_x.exp()
    };
    let (ln_ns, rel) = ln_neg_scaled(alpha, beta, x, SeriesControl::default())?;
    let v = (alpha * ln_ratio + ln_ns).exp();
    Ok((v, v * rel))
}

fn simplex_value<G>(alpha: &[f64], g: &G, opts: &DeOptions) -> Result<(f64, f64)>
where
    G: Fn(&SimplexPoint) -> Result<(f64, f64)>,
{
    let r = simplex_raw(alpha, g, opts)?;
    Ok((r.value, r.abs_err))
}

/// `∫₀^∞ η^{z−1} β_{0,k}^{(a,b)}(φ; η) dη` for `0 < z < a`.
pub fn moment_over_eta(
    pv: &PhiVec,
    h: HypParams,
    z: f64,
    tol: f64,
    budget: u64,
) -> Result<QuadResult> {
    let k = pv.k();
    let kv = k.get();
    let n = pv.n();
    let alpha = pv.alpha();
    let pre = kv.powi(1 - n as i32);
    let (ha, hb) = (h.a() / kv, h.b() / kv);
    let ln_k = kv.ln();
    let counter = Counter::new(budget);
    let inner = inner_opts(tol);

    let f = |eta: f64| {
        let g = |t: &SimplexPoint| {
            counter.tick()?;
            hyp_value(h, first_kind_arg(eta, 0.0, kv, t.pi()), k)
        };
        simplex_value(&alpha, &g, &inner)
    };
    // η^a ₁F₁(−η^k/(kπ)) = (kπ)^α · X^α ₁F₁(−X)
    let tail = |ln_eta: f64| {
        let g = |t: &SimplexPoint| {
            counter.tick()?;
            let ln_pi = t.pi().ln();
            scaled_tail(ha, hb, ln_k + ln_pi, kv * ln_eta - ln_k - ln_pi)
        };
        simplex_value(&alpha, &g, &inner)
    };
    let pivot = (kv / (n as f64).powi(n as i32)).powf(1.0 / kv);
    let opts = DeOptions::with_tol(tol);
    let raw = if h.is_degenerate() {
        halfline_raw(z, pivot, &f, &opts)?
    } else {
        halfline_power_raw(z, h.a() - z, pivot, &f, &tail, &opts)?
    };
    finish(raw, pre, &counter)
}

/// `ln` of the one-dimensional moment
/// `G(t) = ∫₀^∞ ζ^{z−1} ₁F₁,k(a; b; −η^k/(k t) − ζ^k t/η^k) dζ`
/// and its relative error.
///
/// With `c = η^k/(k t)` and `ζ = η (c/t)^{1/k} u`,
/// `G = η^z t^{−z/k} c^{z/k−α} ∫₀^∞ u^{z−1} (1+u^k)^{−α} S(c(1+u^k)) du`
/// where `S(X) = X^α ₁F₁(α; β; −X)` stays bounded, so nothing overflows
/// however small `t` is.
fn ln_coordinate_moment(
    h: HypParams,
    eta: f64,
    z: f64,
    k: KParam,
    t: f64,
    counter: &Counter,
    opts: &DeOptions,
) -> Result<(f64, f64)> {
    let kv = k.get();
    let ln_t = t.ln();
    let ln_c = kv * eta.ln() - kv.ln() - ln_t;
    let scale = z * eta.ln() - z / kv * ln_t;
    if h.is_degenerate() {
        // G = η^z t^{−z/k} e^{−c} ∫ s^{z−1} e^{−s^k} ds
        let f = |s: f64| {
            counter.tick()?;
            Ok(((-s.powf(kv)).exp(), 0.0))
        };
        let raw = halfline_raw(z, 1.0, &f, opts)?;
        let c = ln_c.exp();
        return Ok((scale - c + raw.value.ln(), raw.abs_err / raw.value));
    }
    let (alpha, beta) = (h.a() / kv, h.b() / kv);
    let ctl = SeriesControl::default();
    let ns = |ln_x: f64| {
        let x = if ln_x > 709.0 {
            f64::INFINITY
        } else {
            ln_x.exp()
        };
        ln_neg_scaled(alpha, beta, x, ctl)
    };
    let f = |u: f64| {
        counter.tick()?;
        let ln_1p = (u.powf(kv)).ln_1p();
        let (ln_s, rel) = ns(ln_c + ln_1p)?;
        let v = (ln_s - alpha * ln_1p).exp();
        Ok((v, v * rel))
    };
    // u^a (1+u^k)^{−α} S = (u^k/(1+u^k))^α S
    let tail = |ln_u: f64| {
        counter.tick()?;
        let ln_1p = logaddexp(0.0, kv * ln_u);
        let (ln_s, rel) = ns(ln_c + ln_1p)?;
        let v = (alpha * (kv * ln_u - ln_1p) + ln_s).exp();
        Ok((v, v * rel))
    };
    let pivot = (-ln_c / kv).exp().clamp(1.0, MAX_PIVOT);
    let raw = halfline_power_raw(z, h.a() - z, pivot, &f, &tail, opts)?;
    if !(raw.value > 0.0) {
        return Err(Error::NonFinite);
    }
    Ok((
        scale + (z / kv - alpha) * ln_c + raw.value.ln(),
        raw.abs_err / raw.value,
    ))
}

fn check_orders(z: &[f64], hs: &[HypParams]) -> Result<()> {
    for (zi, hi) in z.iter().zip(hs) {
        if !(*zi > 0.0) || (!hi.is_degenerate() && *zi >= hi.a()) {
            return Err(Error::Domain(format!(
                "moment order {zi} must lie in (0, a)"
            )));
        }
    }
    Ok(())
}

/// Simplex integral of `∏ G_i(t_i)`, or `G(π(t))` when `shared`.
///
/// `G(t)` grows like `t^{e}` with `e = α − 2z/k` as `t → 0`, which can
/// overflow long before the weight `t^{φ/k−1}` brings the product back down.
/// Negative powers are therefore moved from `G` into the weight exponents.
fn tonelli(
    pv: &PhiVec,
    hs: &[HypParams],
    eta: &[f64],
    z: &[f64],
    shared: bool,
    tol: f64,
    budget: u64,
) -> Result<QuadResult> {
    let n = pv.n();
    let k = pv.k();
    let kv = k.get();
    let growth: Vec<f64> = hs
        .iter()
        .zip(z)
        .map(|(h, &zi)| {
            if h.is_degenerate() {
                0.0
            } else {
                (h.a() / kv - 2.0 * zi / kv).min(0.0)
            }
        })
        .collect();
    let mut alpha = pv.alpha();
    for (i, a) in alpha.iter_mut().enumerate() {
        *a += if shared { growth[0] } else { growth[i] };
        if !(*a > 0.0) {
            return Err(Error::Domain(format!(
                "moment diverges: 2z must stay below a + phi_{i}"
            )));
        }
    }
    let counter = Counter::new(budget);
    let inner = inner_opts(tol);
    let g = |t: &SimplexPoint| {
        let args: &[f64] = if shared { &[t.pi()] } else { t.coords() };
        let mut ln = 0.0;
        let mut rel = 0.0;
        for (i, &ti) in args.iter().enumerate() {
            if ti == 0.0 {
                return Ok((0.0, 0.0));
            }
            let (l, r) = ln_coordinate_moment(hs[i], eta[i], z[i], k, ti, &counter, &inner)?;
            ln += l - growth[i] * ti.ln();
            rel += r;
        }
        let v = ln.exp();
        Ok((v, v * rel))
    };
    let raw = simplex_raw(&alpha, &g, &DeOptions::with_tol(tol))?;
    finish(raw, kv.powi(1 - n as i32), &counter)
}

/// `∫₀^∞ r^{z−1} β_{r,k}^{(a,b)}(φ; η) dr` for `0 < z < a`, with the order of
/// integration exchanged. The integral is finite iff additionally
/// `2z < a + φ_i` for every `i`.
pub fn moment_over_zeta(
    pv: &PhiVec,
    h: HypParams,
    eta: f64,
    z: f64,
    tol: f64,
    budget: u64,
) -> Result<QuadResult> {
    check_orders(&[z], &[h])?;
    tonelli(pv, &[h], &[eta], &[z], true, tol, budget)
}

/// `∫_{(0,∞)^n} ∏ ζ_i^{z_i−1} β_{ζ,k}^{(p,q)}(φ; η) dζ`, exchanging the order
/// of integration so that each coordinate contributes a one-dimensional
/// moment inside the simplex integral. Finite iff `2z_i < p_i + φ_i`.
pub fn moment_second_kind(
    pv: &PhiVec,
    hs: &[HypParams],
    eta: &[f64],
    z: &[f64],
    tol: f64,
    budget: u64,
) -> Result<QuadResult> {
    let n = pv.n();
    if hs.len() != n || eta.len() != n || z.len() != n {
        return Err(Error::Domain(format!(
            "expected {n} parameters per coordinate"
        )));
    }
    check_orders(z, hs)?;
    tonelli(pv, hs, eta, z, false, tol, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multivar::beta_k_n;
    use crate::scalar::{gamma_hyp1, gamma_k_closed};

    fn pv(phi: &[f64], k: f64) -> PhiVec {
        PhiVec::new(phi.to_vec(), KParam::new(k).unwrap()).unwrap()
    }

    #[test]
    fn eta_moment_matches_product_form() {
        // ∫ η^{z−1} β(φ;η) dη = Γ_k^{(a,b)}(z) β_k(φ + z e)
        let p = pv(&[2.0, 1.5], 1.2);
        let h = HypParams::new(1.4, 2.5).unwrap();
        let z = 0.7;
        let m = moment_over_eta(&p, h, z, 1e-8, EVAL_BUDGET).unwrap();
        let g = gamma_hyp1(z, 0.0, h, p.k()).unwrap().value;
        let b = beta_k_n(&p.shifted(z).unwrap()).unwrap();
        assert!(
            ((m.value - g * b) / (g * b)).abs() < 1e-6,
            "{} vs {}",
            m.value,
            g * b
        );
    }

    #[test]
    fn degenerate_zeta_moment() {
        // a = b: ∫ r^{z−1} e^{−r^k π/η^k} dr = Γ_k(z) (η^k/(kπ))^{z/k}
        let p = pv(&[1.5, 2.0], 1.0);
        let h = HypParams::new(1.0, 1.0).unwrap();
        let (eta, z) = (0.8, 0.6);
        let m = moment_over_zeta(&p, h, eta, z, 1e-8, EVAL_BUDGET).unwrap();
        // β_k(φ − z e) · Γ(z) η^z · e^{−η/π} integrated: compare with a direct simplex rule
        let k = p.k();
        let direct = crate::quadrature::integrate_simplex_det(
            2,
            p.phi(),
            |t| {
                let pi = t.pi();
                (eta / pi).powf(z) * (-eta / pi).exp()
            },
            k,
            1e-11,
        )
        .unwrap()
        .value
            * gamma_k_closed(z, k);
        assert!(
            ((m.value - direct) / direct).abs() < 1e-6,
            "{} vs {direct}",
            m.value
        );
    }

    #[test]
    fn budget_is_enforced() {
        let p = pv(&[2.0, 2.0], 1.0);
        let h = HypParams::new(1.0, 2.0).unwrap();
        assert_eq!(
            moment_over_eta(&p, h, 0.5, 1e-8, 100),
            Err(Error::Budget { budget: 100 })
        );
    }
}
