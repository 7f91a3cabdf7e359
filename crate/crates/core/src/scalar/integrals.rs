//! Γ_k, β_k and their extended forms as direct quadratures.

use serde::Serialize;

use super::hyp::{ln_hyp, ln_neg_scaled};
use super::{HypParams, KParam, SeriesControl};
use crate::error::{domain, Error, Result};
use crate::quadrature::{
    default_pivot, halfline_power_raw, halfline_raw, integrate_01_weighted, integrate_halfline,
    integrate_halfline_pivot, weighted_raw, DeOptions, QuadResult, Raw,
};

const TOL: f64 = 1e-13;

/// How the first exponential of the two-parameter extended beta is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtReading {
    /// `e^{−a^k/(k m)}·e^{−b^k/(k(1−m))}`
    #[default]
    Consistent,
    /// `e^{−a^k/m}·e^{−b^k/(k(1−m))}`
    AsPrinted,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return domain(format!("{name} must be nonnegative and finite, got {v}"));
    }
    Ok(())
}

fn strict(raw: Raw) -> Result<QuadResult> {
    if raw.converged {
        Ok(QuadResult::deterministic(raw.value, raw.abs_err, raw.evals))
    } else {
        Err(Error::Quadrature {
            best: raw.value,
            abs_err: raw.abs_err,
        })
    }
}

/// `Γ_k(φ) = ∫₀^∞ m^{φ−1} e^{−m^k/k} dm`.
pub fn gamma_k(phi: f64, k: KParam) -> Result<QuadResult> {
    positive("phi", phi)?;
    let kv = k.get();
    integrate_halfline(phi, |m| (-m.powf(kv) / kv).exp(), k, TOL)
}

/// `β_k(φ, ψ) = (1/k) ∫₀¹ m^{φ/k−1}(1−m)^{ψ/k−1} dm`.
pub fn beta_k2(phi: f64, psi: f64, k: KParam) -> Result<QuadResult> {
    positive("phi", phi)?;
    positive("psi", psi)?;
    let kv = k.get();
    Ok(integrate_01_weighted(phi / kv, psi / kv, |_, _| 1.0, TOL)?.scale(1.0 / kv))
}

/// Extended k-gamma `∫₀^∞ m^{φ−1} e^{−m^k/k − a^k/(k m^k)} dm`.
pub fn gamma_ext(phi: f64, a: f64, k: KParam) -> Result<QuadResult> {
    positive("phi", phi)?;
    nonnegative("a", a)?;
    let kv = k.get();
    let ak = a.powf(kv) / kv;
    let f = |m: f64| {
        let mk = m.powf(kv);
        let e = if ak == 0.0 { 0.0 } else { ak / mk };
        (-mk / kv - e).exp()
    };
    let pivot = default_pivot(phi, kv).max(a);
    integrate_halfline_pivot(phi, f, pivot, TOL)
}

/// `(1/k) ∫₀¹ m^{φ/k−1}(1−m)^{ψ/k−1} e^{−a^k/(k m(1−m))} dm`.
pub fn beta_ext1(phi: f64, psi: f64, a: f64, k: KParam) -> Result<QuadResult> {
    positive("phi", phi)?;
    positive("psi", psi)?;
    nonnegative("a", a)?;
    let kv = k.get();
    let c = a.powf(kv) / kv;
    let f = |x: f64, xc: f64| if c == 0.0 { 1.0 } else { (-c / (x * xc)).exp() };
    Ok(integrate_01_weighted(phi / kv, psi / kv, f, TOL)?.scale(1.0 / kv))
}

/// Two-parameter extended k-beta
/// `(1/k) ∫₀¹ m^{φ/k−1}(1−m)^{ψ/k−1} e^{−a^k/(k m)} e^{−b^k/(k(1−m))} dm`
/// under [`ExtReading::Consistent`].
pub fn beta_ext2(
    phi: f64,
    psi: f64,
    a: f64,
    b: f64,
    k: KParam,
    reading: ExtReading,
) -> Result<QuadResult> {
    positive("phi", phi)?;
    positive("psi", psi)?;
    nonnegative("a", a)?;
    nonnegative("b", b)?;
    let kv = k.get();
    let ca = match reading {
        ExtReading::Consistent => a.powf(kv) / kv,
        ExtReading::AsPrinted => a.powf(kv),
    };
    let cb = b.powf(kv) / kv;
    let f = |x: f64, xc: f64| {
        let ea = if ca == 0.0 { 0.0 } else { ca / x };
        let eb = if cb == 0.0 { 0.0 } else { cb / xc };
        (-ea - eb).exp()
    };
    Ok(integrate_01_weighted(phi / kv, psi / kv, f, TOL)?.scale(1.0 / kv))
}

fn hyp_pair(h: HypParams, l: f64, k: KParam) -> Result<(f64, f64)> {
    if h.is_degenerate() {
        return Ok((l.exp(), 0.0));
    }
    let (ln, rel) = ln_hyp(
        h.a() / k.get(),
        h.b() / k.get(),
        l,
        SeriesControl::default(),
    )?;
    let v = ln.exp();
    Ok((v, v * rel))
}

/// `(1/k) ∫₀¹ m^{φ/k−1}(1−m)^{ψ/k−1} ₁F₁,k(a_h; b_h; −a^k/(k m(1−m))) dm`.
pub fn beta_hyp2(phi: f64, psi: f64, a: f64, h: HypParams, k: KParam) -> Result<QuadResult> {
    positive("phi", phi)?;
    positive("psi", psi)?;
    nonnegative("a", a)?;
    let kv = k.get();
    let c = a.powf(kv) / kv;
    let f = |x: f64, xc: f64| {
        if c == 0.0 {
            return Ok((1.0, 0.0));
        }
        hyp_pair(h, -c / (x * xc), k)
    };
    strict(weighted_raw(
        phi / kv,
        psi / kv,
        &f,
        &DeOptions::with_tol(TOL),
    )?)
    .map(|r| r.scale(1.0 / kv))
}

/// `Γ_k^{(a,b)}(φ, a_e) = ∫₀^∞ m^{φ−1} ₁F₁,k(a; b; −m^k/k − a_e^k/(k m^k)) dm`.
///
/// For `b > a` the integrand decays only like `m^{φ−1−a}`, so the integral
/// exists iff `φ < a`. The tail beyond the split point `M` is mapped by
/// `m = M y^{−1/δ}`, `δ = a − φ`, which turns it into a bounded integrand on
/// `(0, 1]` whose limit at `y = 0` is `k^{a/k} Γ(b/k)/Γ((b−a)/k)`.
pub fn gamma_hyp1(phi: f64, a_ext: f64, h: HypParams, k: KParam) -> Result<QuadResult> {
    positive("phi", phi)?;
    nonnegative("a", a_ext)?;
    let kv = k.get();
    let c = a_ext.powf(kv) / kv;
    let arg = |m: f64| {
        let u = m.powf(kv) / kv;
        let e = if c == 0.0 { 0.0 } else { c / m.powf(kv) };
        -(u + e)
    };
    let opts = DeOptions::with_tol(TOL);
    if h.is_degenerate() {
        let f = |m: f64| hyp_pair(h, arg(m), k);
        let pivot = default_pivot(phi, kv).max(a_ext);
        return strict(halfline_raw(phi, pivot, &f, &opts)?);
    }
    if phi >= h.a() {
        return domain(format!(
            "integral diverges: phi = {phi} must be below the hypergeometric a = {}",
            h.a()
        ));
    }
    let alpha = h.a() / kv;
    let beta = h.b() / kv;
    let ln_k = kv.ln();
    let ctl = SeriesControl::default();
    let f = |m: f64| hyp_pair(h, arg(m), k);
    // m^a ₁F₁(−X) = k^α (u/X)^α · X^α ₁F₁(−X), u = m^k/k
    let tail = |ln_m: f64| {
        let ln_u = kv * ln_m - ln_k;
        let (ln_ratio, x) = if ln_u > 700.0 {
            (0.0, f64::INFINITY)
        } else {
            let u = ln_u.exp();
            let v = if c == 0.0 { 0.0 } else { c / (kv * u) };
            (-(v / u).ln_1p(), u + v)
        };
        let (ln_ns, rel) = ln_neg_scaled(alpha, beta, x, ctl)?;
        let val = (alpha * ln_k + alpha * ln_ratio + ln_ns).exp();
        Ok((val, val * rel))
    };
    let pivot = kv.powf(1.0 / kv).max(a_ext).max(1.0);
    strict(halfline_power_raw(
        phi,
        h.a() - phi,
        pivot,
        &f,
        &tail,
        &opts,
    )?)
}
