//! Panel-adaptive tanh-sinh rule on sub-intervals of `[0, 1]`.
//!
//! Every node is produced together with its exact complement `1 − x`, so
//! integrands with algebraic singularities at either end can be evaluated
//! without cancellation. Within a panel the step is halved until two
//! successive levels agree; panels whose error dominates are bisected.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes are generated for `|t| ≤ T_MAX`; beyond that the distance to the
/// nearest endpoint drops below ~1e-275.
const T_MAX: f64 = 6.0;
const TABLE_LEVELS: usize = 8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub x: f64,
    /// `1 − x`, accurate even when `x` is within rounding of 1.
    pub xc: f64,
}

#[derive(Debug, Clone, Copy)]
struct Abscissa {
    /// `1 − tanh(π/2·sinh t)`: distance from the endpoint in half-widths.
    y: f64,
    /// `π/2·cosh t·sech²(π/2·sinh t)`
    w: f64,
}

struct Table {
    levels: Vec<Vec<Abscissa>>,
}

fn abscissa(t: f64) -> Abscissa {
    let u = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u).exp();
    let y = 2.0 * e / (1.0 + e);
    let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    Abscissa {
        y,
        w: FRAC_PI_2 * t.cosh() * sech2,
    }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut levels = Vec::with_capacity(TABLE_LEVELS);
        levels.push((0..=T_MAX as usize).map(|j| abscissa(j as f64)).collect());
        for level in 1..TABLE_LEVELS {
            let h = 0.5f64.powi(level as i32);
            let nodes = (0..)
                .map(|j| (2 * j + 1) as f64 * h)
                .take_while(|&t| t <= T_MAX)
                .map(abscissa)
                .collect();
            levels.push(nodes);
        }
        Table { levels }
    })
}

/// Tolerances and effort limits for the unit-interval integrator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_level: usize,
    pub max_level: usize,
    pub max_panels: usize,
}

impl DeOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        DeOptions {
            rel_tol,
            abs_tol: 0.0,
            min_level: 3,
            max_level: 6,
            max_panels: 24,
        }
    }
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions::with_tol(1e-10)
    }
}

/// Raw outcome of an integration; `converged` records whether the
/// requested tolerance was met.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Raw {
    pub value: f64,
    pub abs_err: f64,
    pub evals: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    c: f64,
    d: f64,
    value: f64,
    /// Discretisation error of the rule.
    err: f64,
    /// Integrated error reported by the integrand itself.
    prop: f64,
}

/// Integrates `f` over `[c, d] ⊂ [0, 1]`. The integrand returns a value and
/// an absolute error of that value.
fn panel<F>(f: &F, c: f64, d: f64, target: f64, opts: &DeOptions, evals: &mut u64) -> Result<Panel>
where
    F: Fn(Node) -> Result<(f64, f64)>,
{
    let table = table();
    let r = 0.5 * (d - c);
    let right_gap = 1.0 - d;
    let mut sum = 0.0;
    let mut sum_err = 0.0;
    let mut prev: Option<f64> = None;
    let mut est = 0.0;
    let mut diff = f64::INFINITY;
    let mut h = 1.0;

    let mut eval = |node: Node, w: f64, sum: &mut f64, sum_err: &mut f64| -> Result<()> {
        let (v, e) = f(node)?;
        *evals += 1;
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        *sum += w * v;
        *sum_err += w * e.abs();
        Ok(())
    };

    for level in 0..=opts.max_level.min(TABLE_LEVELS - 1) {
        h = 0.5f64.powi(level as i32);
        for (j, ab) in table.levels[level].iter().enumerate() {
            let w = ab.w * r;
            if level == 0 && j == 0 {
                let node = Node {
                    x: c + r,
                    xc: right_gap + r,
                };
                eval(node, w, &mut sum, &mut sum_err)?;
                continue;
            }
            let dist = r * ab.y;
            if dist == 0.0 || w == 0.0 {
                continue;
            }
            let far = r * (2.0 - ab.y);
            eval(
                Node {
                    x: c + dist,
                    xc: right_gap + far,
                },
                w,
                &mut sum,
                &mut sum_err,
            )?;
            eval(
                Node {
                    x: c + far,
                    xc: right_gap + dist,
                },
                w,
                &mut sum,
                &mut sum_err,
            )?;
        }
        est = h * sum;
        if let Some(p) = prev {
            diff = (est - p).abs();
            let tol = target.max(opts.rel_tol * est.abs());
            if level >= opts.min_level && diff <= tol {
                break;
            }
        }
        prev = Some(est);
    }
    let rounding = 8.0 * f64::EPSILON * est.abs();
    Ok(Panel {
        c,
        d,
        value: est,
        err: diff + rounding,
        prop: h * sum_err,
    })
}

/// Adaptive integration of `f` over `[0, 1]`.
///
/// Only the discretisation error drives bisection; error reported by the
/// integrand is carried into `abs_err` and counts against convergence.
pub(crate) fn integrate_unit<F>(f: &F, opts: &DeOptions) -> Result<Raw>
where
    F: Fn(Node) -> Result<(f64, f64)>,
{
    let mut evals = 0u64;
    let mut panels = vec![panel(f, 0.0, 1.0, opts.abs_tol, opts, &mut evals)?];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let prop: f64 = panels.iter().map(|p| p.prop).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        let done = |converged| Raw {
            value,
            abs_err: err + prop,
            evals,
            converged,
        };
        if err + prop <= tol {
            return Ok(done(true));
        }
        if prop >= tol || err <= 0.25 * tol || panels.len() >= opts.max_panels {
            return Ok(done(false));
        }
        let worst =
            panels.iter().enumerate().fold(
                0,
                |best, (i, p)| if p.err > panels[best].err { i } else { best },
            );
        let Panel { c, d, .. } = panels[worst];
        let mid = 0.5 * (c + d);
        if mid <= c || mid >= d {
            return Ok(done(false));
        }
        let share = 0.25 * tol;
        let left = panel(f, c, mid, share, opts, &mut evals)?;
        let right = panel(f, mid, d, share, opts, &mut evals)?;
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}
