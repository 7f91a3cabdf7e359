//! The confluent hypergeometric k-function
//! ₁F₁,k(a;b;l) = Σ (a)_{m,k}/(b)_{m,k} · l^m/m!.
//!
//! With α = a/k and β = b/k the series is Kummer's M(α, β, l), so all the
//! work happens on M. Every evaluation path returns `ln M` together with a
//! relative error bound; values never go through an alternating sum.

use super::{Approx, HypParams, KParam, SeriesControl};
use crate::error::{domain, Error, Result};
use crate::quadrature::integrate_01_weighted;

const LN_RESCALE: f64 = 280.0 * std::f64::consts::LN_10;
const ASYMPTOTIC_FROM: f64 = 20.0;
const LN_MAX: f64 = 709.782_712_893_384;

fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln M(α, β, x)` for `x ≥ 0`, `0 ≤ α ≤ β`, by the positive-term series.
fn ln_series(alpha: f64, beta: f64, x: f64, ctl: SeriesControl) -> Result<(f64, f64)> {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut shift = 0.0;
    let mut small = 0;
    for m in 0..ctl.max_terms {
        let mf = m as f64;
        term *= (alpha + mf) / (beta + mf) * x / (mf + 1.0);
        if term == 0.0 {
            return Ok((sum.ln() + shift, 2.0 * (mf + 1.0) * f64::EPSILON));
        }
        sum += term;
        if sum > 1e280 {
            sum *= 1e-280;
            term *= 1e-280;
            shift += LN_RESCALE;
        }
        small = if term <= ctl.rel_tol * sum {
            small + 1
        } else {
            0
        };
        if small >= 3 && mf + 1.0 > x {
            let q = (alpha + mf + 1.0) / (beta + mf + 1.0) * x / (mf + 2.0);
            let tail = if q < 1.0 { term * q / (1.0 - q) } else { term };
            let rel = tail / sum + 2.0 * (mf + 1.0) * f64::EPSILON;
            return Ok((sum.ln() + shift, rel));
        }
    }
    Err(Error::NonConvergence {
        terms: ctl.max_terms,
        last_term: term,
    })
}

/// Large-`x` expansion
/// `M(α,β,x) ≈ Γ(β)/Γ(α) e^x x^{α−β} Σ_s (β−α)_s (1−α)_s /(s! x^s)`.
/// Returns `None` unless both the truncated sum and the neglected
/// `e^{−x}` branch are below double precision.
///
/// With `drop_exp` the factor `e^x` is removed analytically, giving
/// `ln(e^{−x} M)` without cancellation at huge `x`.
fn ln_asymptotic(alpha: f64, beta: f64, x: f64, drop_exp: bool) -> Option<(f64, f64)> {
    let gap = beta - alpha;
    let neglected = if gap > 0.0 {
        lgamma(alpha) - lgamma(gap) - x + (beta - 2.0 * alpha) * x.ln()
    } else {
        f64::NEG_INFINITY
    };
    if neglected > -39.0 {
        return None;
    }
    let mut s = 1.0;
    let mut c = 1.0f64;
    let mut last = f64::INFINITY;
    for i in 0..200 {
        let fi = i as f64;
        c *= (gap + fi) * (1.0 - alpha + fi) / ((fi + 1.0) * x);
        if c == 0.0 {
            last = 0.0;
            break;
        }
        if c.abs() > last {
            return None;
        }
        s += c;
        last = c.abs();
        if last <= 1e-17 * s.abs() {
            break;
        }
    }
    if last > 1e-15 * s.abs() || s <= 0.0 {
        return None;
    }
    let exp_part = if drop_exp { 0.0 } else { x };
    let ln = lgamma(beta) - lgamma(alpha) + exp_part + (alpha - beta) * x.ln() + s.ln();
    let rel = last + neglected.exp() + 8.0 * f64::EPSILON * (1.0 + ln.abs());
    Some((ln, rel))
}

/// `ln M(α, β, x)` for `x ≥ 0`, `0 ≤ α ≤ β`; with `drop_exp`,
/// `ln(e^{−x} M(α, β, x))`.
fn ln_m_pos(
    alpha: f64,
    beta: f64,
    x: f64,
    ctl: SeriesControl,
    drop_exp: bool,
) -> Result<(f64, f64)> {
    let shift = if drop_exp { x } else { 0.0 };
    if alpha == 0.0 || x == 0.0 {
        return Ok((-shift, 0.0));
    }
    if alpha == beta {
        return Ok((x - shift, 0.0));
    }
    if x >= ASYMPTOTIC_FROM {
        if let Some(r) = ln_asymptotic(alpha, beta, x, drop_exp) {
            return Ok(r);
        }
    }
    let (ln, rel) = ln_series(alpha, beta, x, ctl)?;
    Ok((ln - shift, rel + 4.0 * f64::EPSILON * shift))
}

/// `ln M(α, β, l)` and its relative error for `0 < α ≤ β`; negative
/// arguments go through Kummer's transformation so every summed term is
/// positive.
pub(crate) fn ln_hyp(alpha: f64, beta: f64, l: f64, ctl: SeriesControl) -> Result<(f64, f64)> {
    if l.is_nan() {
        return domain("hypergeometric argument is NaN");
    }
    if l == f64::NEG_INFINITY {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if l >= 0.0 {
        return ln_m_pos(alpha, beta, l, ctl, false);
    }
    ln_m_pos(beta - alpha, beta, -l, ctl, true)
}

/// `ln(M(α, β, −X)·X^α)`, which tends to `ln Γ(β)/Γ(β−α)` as `X → ∞`.
pub(crate) fn ln_neg_scaled(
    alpha: f64,
    beta: f64,
    x: f64,
    ctl: SeriesControl,
) -> Result<(f64, f64)> {
    if x == f64::INFINITY {
        return Ok((lgamma(beta) - lgamma(beta - alpha), 8.0 * f64::EPSILON));
    }
    let (ln, rel) = ln_hyp(alpha, beta, -x, ctl)?;
    Ok((ln + alpha * x.ln(), rel))
}

fn alpha_beta(h: HypParams, k: KParam) -> (f64, f64) {
    (h.a() / k.get(), h.b() / k.get())
}

/// `ln ₁F₁,k(a;b;l)`; finite wherever the value itself may overflow.
pub fn hyp1f1k_ln(h: HypParams, l: f64, k: KParam, ctl: SeriesControl) -> Result<f64> {
    if h.is_degenerate() {
        return Ok(l);
    }
    let (alpha, beta) = alpha_beta(h, k);
    Ok(ln_hyp(alpha, beta, l, ctl)?.0)
}

/// ₁F₁,k(a;b;l) with an absolute error estimate, clamped to
/// `[0, e^{max(l,0)}]`.
pub fn hyp1f1k_approx(h: HypParams, l: f64, k: KParam, ctl: SeriesControl) -> Result<Approx> {
    let (ln, rel) = if h.is_degenerate() {
        if l.is_nan() {
            return domain("hypergeometric argument is NaN");
        }
        (l, 0.0)
    } else {
        let (alpha, beta) = alpha_beta(h, k);
        ln_hyp(alpha, beta, l, ctl)?
    };
    if ln > LN_MAX {
        return Err(Error::Overflow { ln_value: ln });
    }
    let upper = if l > 0.0 { l.exp() } else { 1.0 };
    let value = ln.exp().clamp(0.0, upper);
    Ok(Approx {
        value,
        abs_err: value * rel,
    })
}

/// ₁F₁,k(a;b;l) by its defining series (Kummer form for `l < 0`).
pub fn hyp1f1k(h: HypParams, l: f64, k: KParam, ctl: SeriesControl) -> Result<f64> {
    Ok(hyp1f1k_approx(h, l, k, ctl)?.value)
}

/// `e^l ₁F₁,k(b−a; b; −l)`. At `a = b` the inner function is identically 1.
pub fn hyp1f1k_kummer(h: HypParams, l: f64, k: KParam) -> Result<f64> {
    if h.is_degenerate() {
        return Ok(l.exp());
    }
    let inner = HypParams::new(h.b() - h.a(), h.b())?;
    let ln = l + hyp1f1k_ln(inner, -l, k, SeriesControl::default())?;
    if ln > LN_MAX {
        return Err(Error::Overflow { ln_value: ln });
    }
    Ok(ln.exp())
}

/// Euler-type integral
/// `∫₀¹ u^{a/k−1}(1−u)^{(b−a)/k−1} e^{lu} du / B(a/k, (b−a)/k)`,
/// normalized so the value at `l = 0` is 1. Requires `b > a`.
pub fn hyp1f1k_integral(h: HypParams, l: f64, k: KParam) -> Result<f64> {
    if h.is_degenerate() {
        return domain("integral representation needs b > a");
    }
    if !l.is_finite() {
        return domain(format!(
            "integral representation needs a finite argument, got {l}"
        ));
    }
    let (alpha, beta) = alpha_beta(h, k);
    let gap = beta - alpha;
    let ln_norm = lgamma(beta) - lgamma(alpha) - lgamma(gap);
    // e^{lu} = e^{l}·e^{−l(1−u)} keeps the integrand ≤ 1 for l > 0.
    let (r, shift) = if l > 0.0 {
        (
            integrate_01_weighted(alpha, gap, |_, uc| (-l * uc).exp(), 1e-13)?,
            l,
        )
    } else {
        (
            integrate_01_weighted(alpha, gap, |u, _| (l * u).exp(), 1e-13)?,
            0.0,
        )
    };
    let ln = ln_norm + shift + r.value.ln();
    if ln > LN_MAX {
        return Err(Error::Overflow { ln_value: ln });
    }
    Ok(ln.exp())
}

/// `d/dl ₁F₁,k(a;b;l) = (a/b)·₁F₁,k(a+k; b+k; l)`.
pub fn hyp1f1k_deriv(h: HypParams, l: f64, k: KParam) -> Result<f64> {
    Ok(h.a() / h.b() * hyp1f1k(h.shifted(k), l, k, SeriesControl::default())?)
}
