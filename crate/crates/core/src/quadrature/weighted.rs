use super::tanh_sinh::{integrate_unit, DeOptions, Node, Raw};
use super::QuadResult;
use crate::error::{domain, Error, Result};
use crate::scalar::KParam;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return domain(format!("tolerance must lie in (0,1), got {tol}"));
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

/// `x^{px−1}(1−x)^{py−1}` from exact `x` and `1 − x`.
#[inline]
pub(crate) fn jacobi_weight(px: f64, py: f64, node: Node) -> f64 {
    let mut w = 1.0;
    if px != 1.0 {
        w *= node.x.powf(px - 1.0);
    }
    if py != 1.0 {
        w *= node.xc.powf(py - 1.0);
    }
    w
}

/// Exponents below this put visible mass closer to an endpoint than the
/// outermost node (x^{p} at x = 1e−275 is not small when p ≈ 0.05).
const POWER_MAP_BELOW: f64 = 0.2;

/// Splits at 1/2 and maps each half by `x = v^{1/p}/2`, which absorbs the
/// endpoint weight into the Jacobian:
/// `∫₀^{1/2} x^{p−1} g dx = 2^{−p}/p ∫₀¹ g(v^{1/p}/2) dv`.
fn power_mapped_raw<F>(px: f64, py: f64, f: &F, opts: &DeOptions) -> Result<Raw>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    // near end coordinate from the node; the far coordinate is ≥ 1/2
    let near = |p: f64, node: Node| {
        let ln_v = if node.x < 0.5 {
            node.x.ln()
        } else {
            (-node.xc).ln_1p()
        };
        (0.5 * (ln_v / p).exp()).max(f64::MIN_POSITIVE)
    };
    let half = |p: f64, q: f64, flip: bool| {
        let c = (-p * std::f64::consts::LN_2).exp() / p;
        let g = |node: Node| {
            let s = near(p, node);
            let w = if q != 1.0 {
                (1.0 - s).powf(q - 1.0)
            } else {
                1.0
            };
            let (v, e) = if flip { f(1.0 - s, s)? } else { f(s, 1.0 - s)? };
            Ok((c * w * v, c * w * e))
        };
        integrate_unit(&g, opts)
    };
    let left = half(px, py, false)?;
    let right = half(py, px, true)?;
    Ok(Raw {
        value: left.value + right.value,
        abs_err: left.abs_err + right.abs_err,
        evals: left.evals + right.evals,
        converged: left.converged && right.converged,
    })
}

/// Lenient weighted integral; `f` receives `(x, 1 − x)` and returns a value
/// with its own absolute error.
pub(crate) fn weighted_raw<F>(px: f64, py: f64, f: &F, opts: &DeOptions) -> Result<Raw>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    if px.min(py) < POWER_MAP_BELOW {
        return power_mapped_raw(px, py, f, opts);
    }
    let g = |node: Node| {
        let w = jacobi_weight(px, py, node);
        let (v, e) = f(node.x, node.xc)?;
        if v == 0.0 {
            return Ok((0.0, w * e));
        }
        Ok((w * v, w * e))
    };
    integrate_unit(&g, opts)
}

/// `∫₀¹ x^{px−1}(1−x)^{py−1} f(x) dx` for `px, py > 0`.
///
/// `f` is called with `x` and `1 − x`; the complement is exact, so factors
/// such as `x(1−x)` keep full relative precision at both ends.
pub fn integrate_01_weighted<F>(px: f64, py: f64, f: F, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    if !(px > 0.0 && py > 0.0) {
        return domain(format!(
            "weight exponents must be positive, got ({px}, {py})"
        ));
    }
    check_tol(tol)?;
    let g = |x: f64, xc: f64| Ok((f(x, xc), 0.0));
    strict(weighted_raw(px, py, &g, &DeOptions::with_tol(tol))?)
}

/// Pivot used for `∫₀^∞ m^{φ−1} e^{−m^k/k}`-type integrands: the mode of the
/// integrand when it exists, never below 1.
pub(crate) fn default_pivot(phi: f64, k: f64) -> f64 {
    if phi > 1.0 {
        (phi - 1.0).powf(1.0 / k).max(1.0)
    } else {
        1.0
    }
}

/// Lenient half-line integral of `m^{φ−1} f(m)` split at `pivot`.
///
/// The head `[0, P]` is mapped to `x = m/P` with weight `x^{φ−1}`; the tail
/// `[P, ∞)` to `x = P/m`, whose Jacobian is folded in logarithmically so
/// that algebraically decaying integrands do not overflow near `x = 0`.
pub(crate) fn halfline_raw<F>(phi: f64, pivot: f64, f: &F, opts: &DeOptions) -> Result<Raw>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let scale = pivot.powf(phi);
    let head_f = |x: f64, _xc: f64| {
        let (v, e) = f(pivot * x)?;
        Ok((scale * v, scale * e))
    };
    let head = weighted_raw(phi, 1.0, &head_f, opts)?;

    let ln_pivot = pivot.ln();
    let tail_f = |node: Node| {
        let m = pivot / node.x;
        if !m.is_finite() {
            return Ok((0.0, 0.0));
        }
        let (v, e) = f(m)?;
        if v == 0.0 && e == 0.0 {
            return Ok((0.0, 0.0));
        }
        // m^{φ+1}/P = dm/dx · m^{φ−1}
        let ln_jac = (phi + 1.0) * m.ln() - ln_pivot;
        let jv = if v == 0.0 {
            0.0
        } else {
            v.signum() * (ln_jac + v.abs().ln()).exp()
        };
        let je = if e == 0.0 {
            0.0
        } else {
            (ln_jac + e.abs().ln()).exp()
        };
        Ok((jv, je))
    };
    let tail = integrate_unit(&tail_f, opts)?;
    Ok(Raw {
        value: head.value + tail.value,
        abs_err: head.abs_err + tail.abs_err,
        evals: head.evals + tail.evals,
        converged: head.converged && tail.converged,
    })
}

/// Lenient half-line integral of `m^{φ−1} f(m)` where `f(m) ~ C m^{−φ−δ}`
/// decays only algebraically.
///
/// The tail `[P, ∞)` is mapped by `m = P y^{−1/δ}`, giving
/// `P^{−δ}/δ ∫₀¹ H(m(y)) dy` with `H(m) = m^{φ+δ} f(m)` bounded. `h`
/// receives `ln m` so callers can evaluate `H` at `m = ∞` by its limit.
pub(crate) fn halfline_power_raw<F, H>(
    phi: f64,
    delta: f64,
    pivot: f64,
    f: &F,
    h: &H,
    opts: &DeOptions,
) -> Result<Raw>
where
    F: Fn(f64) -> Result<(f64, f64)>,
    H: Fn(f64) -> Result<(f64, f64)>,
{
    if !(delta > 0.0) {
        return domain(format!("tail decay exponent must be positive, got {delta}"));
    }
    let scale = pivot.powf(phi);
    let head_f = |x: f64, _xc: f64| {
        let (v, e) = f(pivot * x)?;
        Ok((scale * v, scale * e))
    };
    let head = weighted_raw(phi, 1.0, &head_f, opts)?;
    let ln_pivot = pivot.ln();
    let tail_f = |node: Node| h(ln_pivot - node.x.ln() / delta);
    let tail = integrate_unit(&tail_f, opts)?;
    let c = (-delta * ln_pivot).exp() / delta;
    Ok(Raw {
        value: head.value + c * tail.value,
        abs_err: head.abs_err + c * tail.abs_err,
        evals: head.evals + tail.evals,
        converged: head.converged && tail.converged,
    })
}

/// `∫₀^∞ m^{φ−1} f(m) dm` for integrands decaying at least like a power
/// `m^{−φ−δ}`; the split point is chosen from `φ` and `k`.
pub fn integrate_halfline<F>(phi: f64, f: F, k: KParam, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_halfline_pivot(phi, f, default_pivot(phi, k.get()), tol)
}

/// As [`integrate_halfline`] with an explicit split point.
pub fn integrate_halfline_pivot<F>(phi: f64, f: F, pivot: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(phi > 0.0) {
        return domain(format!("phi must be positive, got {phi}"));
    }
    if !(pivot > 0.0 && pivot.is_finite()) {
        return domain(format!("pivot must be positive and finite, got {pivot}"));
    }
    check_tol(tol)?;
    let g = |m: f64| Ok((f(m), 0.0));
    strict(halfline_raw(phi, pivot, &g, &DeOptions::with_tol(tol))?)
}
