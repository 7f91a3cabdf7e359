//! Randomised, error-aware verification of the inequalities satisfied by
//! the first- and second-kind generalized betas.
//!
//! Every check evaluates one or more links `lhs ≤ rhs`. A link fails only
//! when the violation exceeds both sides' error estimates plus a relative
//! slack, and passes only when `rhs − lhs` exceeds the error estimates;
//! otherwise it is inconclusive.

mod checks;
mod moments;
mod params;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use checks::{
    check, check_cauchy_schwarz, check_lower_exp, check_lower_hyp, check_moment_lower_exp,
    check_moment_upper, check_sandwich, check_second_convex, check_second_lower,
    check_second_lower_hyp, check_second_moments, check_second_upper, check_tangent_lower,
    check_upper_refinement, CheckOptions, MethodChoice, Shift,
};
pub use moments::{moment_over_eta, moment_over_zeta, moment_second_kind, EVAL_BUDGET};
pub use params::{sample_params, FirstDraw, Params, SecondDraw};

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::quadrature::{QuadResult, RngState, MAX_DIM};

/// Registered inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    /// Log-convexity of the first kind in `φ`.
    #[serde(rename = "eq4.1")]
    CauchySchwarz,
    /// Two-sided bound from convexity of ₁F₁,k.
    #[serde(rename = "eq4.5")]
    Sandwich,
    /// Lower bound from the tangent of ₁F₁,k at zero.
    #[serde(rename = "eq4.8")]
    TangentLower,
    /// Upper bound through `π(t) ≤ n^{−n}`.
    #[serde(rename = "eq4.11")]
    UpperRefinement,
    /// `η`-moment of the first kind at `ζ = 0`.
    #[serde(rename = "eq4.16")]
    MomentUpper,
    /// Lower bound through Kummer's transformation.
    #[serde(rename = "eq4.18")]
    LowerExp,
    /// `ζ`-moment of the Kummer lower bound.
    #[serde(rename = "eq4.20")]
    MomentLowerExp,
    /// Lower bound by a single ₁F₁,k factor and its `ζ`-moment.
    #[serde(rename = "eq4.23")]
    LowerHyp,
    /// Log-convexity of the second kind in `φ`.
    #[serde(rename = "eq5.convex")]
    SecondConvex,
    /// Second-kind upper bound.
    #[serde(rename = "eq6.2")]
    SecondUpper,
    /// Second-kind lower bound and its refinement.
    #[serde(rename = "eq6.7")]
    SecondLower,
    /// Second-kind `ζ`-moments.
    #[serde(rename = "eq6.10")]
    SecondMoments,
    /// Second-kind lower bound by ₁F₁,k factors.
    #[serde(rename = "eq6.14")]
    SecondLowerHyp,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        TheoremId::CauchySchwarz,
        TheoremId::Sandwich,
        TheoremId::TangentLower,
        TheoremId::UpperRefinement,
        TheoremId::MomentUpper,
        TheoremId::LowerExp,
        TheoremId::MomentLowerExp,
        TheoremId::LowerHyp,
        TheoremId::SecondConvex,
        TheoremId::SecondUpper,
        TheoremId::SecondLower,
        TheoremId::SecondMoments,
        TheoremId::SecondLowerHyp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::CauchySchwarz => "eq4.1",
            TheoremId::Sandwich => "eq4.5",
            TheoremId::TangentLower => "eq4.8",
            TheoremId::UpperRefinement => "eq4.11",
            TheoremId::MomentUpper => "eq4.16",
            TheoremId::LowerExp => "eq4.18",
            TheoremId::MomentLowerExp => "eq4.20",
            TheoremId::LowerHyp => "eq4.23",
            TheoremId::SecondConvex => "eq5.convex",
            TheoremId::SecondUpper => "eq6.2",
            TheoremId::SecondLower => "eq6.7",
            TheoremId::SecondMoments => "eq6.10",
            TheoremId::SecondLowerHyp => "eq6.14",
        }
    }

    /// One-line statement of what is checked.
    pub fn describe(self) -> &'static str {
        match self {
            TheoremId::CauchySchwarz => "β(φ+ψ)² ≤ β(2φ)β(2ψ) and midpoint convexity, first kind",
            TheoremId::Sandwich => "β0 − (a/b)(ζ^k/η^k)β^{(a+k,b+k)}(φ+ke) ≤ β_ζ ≤ β0 ≤ β_k(φ)",
            TheoremId::TangentLower => "β_k(φ) − (a/b)(η^k/k)β_k(φ−ke) − (a/b)(ζ^k/η^k)β_k(φ+ke) ≤ β_ζ",
            TheoremId::UpperRefinement => "β_ζ/β_k(φ) ≤ ₁F₁,k(a;b;−η^k n^n/k − ζ^k/(η^k n^n))",
            TheoremId::MomentUpper => "∫η^{z−1}β(φ;η)dη ≤ β_k(φ)(n^{−n})^{z/k}Γ_k^{(a,b)}(z)",
            TheoremId::LowerExp => "β_k(φ;η)·₁F₁,k(b−a;b;η^k n^n/k)·e^{−ζ^k/(η^k n^n)} ≤ β_ζ",
            TheoremId::MomentLowerExp => "η^z(n^n/k)^{z/k}Γ_k(z)β_k(φ;η)₁F₁,k(b−a;b;η^k n^n/k) ≤ ∫r^{z−1}β_r dr",
            TheoremId::LowerHyp => "β_k(φ;η)·₁F₁,k(a;b;−ζ^k/(η^k n^n)) ≤ β_ζ, with its ζ-moment",
            TheoremId::SecondConvex => "β(φ+ψ)² ≤ β(2φ)β(2ψ) and midpoint convexity, second kind",
            TheoremId::SecondUpper => "β_ζ/β_k(φ) ≤ ∏e^{−η_i^k/k}₁F₁,k(q_i−p_i;q_i;η_i^k/k+ζ_i^k/η_i^k)",
            TheoremId::SecondLower => "β_k(φ;η)∏e^{−ζ_i^k/η_i^k}₁F₁,k(q_i−p_i;q_i;m_i) ≤ β_ζ, refined when η_i^{2k} ≥ kζ_i^k",
            TheoremId::SecondMoments => "β_k(φ;η)∏η_i^{z_i}k^{−z_i/k}{Γ_k(z_i)₁F₁,k(q_i−p_i;q_i;η_i^k/k) | Γ_k^{(p_i,q_i)}(z_i)} ≤ ζ-moment",
            TheoremId::SecondLowerHyp => "β_k(φ;η)∏₁F₁,k(p_i;q_i;−ζ_i^k/η_i^k) ≤ β_ζ",
        }
    }

    /// Index in [`TheoremId::ALL`], used to derive random substreams.
    pub fn index(self) -> usize {
        TheoremId::ALL
            .iter()
            .position(|&t| t == self)
            .expect("listed")
    }

    pub fn is_second_kind(self) -> bool {
        matches!(
            self,
            TheoremId::SecondConvex
                | TheoremId::SecondUpper
                | TheoremId::SecondLower
                | TheoremId::SecondMoments
                | TheoremId::SecondLowerHyp
        )
    }

    pub fn is_convexity(self) -> bool {
        matches!(self, TheoremId::CauchySchwarz | TheoremId::SecondConvex)
    }

    /// Checks that integrate over an extension parameter and need `z`.
    pub fn has_moments(self) -> bool {
        matches!(
            self,
            TheoremId::MomentUpper
                | TheoremId::MomentLowerExp
                | TheoremId::LowerHyp
                | TheoremId::SecondMoments
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown theorem '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Compares `lhs ≤ rhs`, returning the verdict and the normalized margin
/// `(rhs − lhs)/max(|lhs|, |rhs|)`.
///
/// A pass needs `rhs − lhs` to exceed both error estimates; a fail needs
/// the violation to exceed them plus `slack·max(|lhs|, |rhs|)`. Anything in
/// between is inconclusive, so the slack only ever protects against false
/// failures.
pub fn judge(lhs: &QuadResult, rhs: &QuadResult, slack: f64) -> (Verdict, f64) {
    let (l, r) = (lhs.value, rhs.value);
    if l.is_nan() || r.is_nan() {
        return (Verdict::Inconclusive, f64::NAN);
    }
    if l.is_infinite() || r.is_infinite() {
        return match (l, r) {
            (l, r) if l == r => (Verdict::Inconclusive, 0.0),
            (l, r) if l < r => (Verdict::Pass, 1.0),
            _ => (Verdict::Fail, -1.0),
        };
    }
    let scale = l.abs().max(r.abs());
    let err = lhs.abs_err + rhs.abs_err;
    let diff = r - l;
    let margin = diff / scale.max(1e-300);
    if err.is_nan() {
        (Verdict::Inconclusive, margin)
    } else if diff > err {
        (Verdict::Pass, margin)
    } else if -diff > err + slack * scale {
        (Verdict::Fail, margin)
    } else {
        (Verdict::Inconclusive, margin)
    }
}

/// One `lhs ≤ rhs` comparison inside a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub name: String,
    pub lhs: QuadResult,
    pub rhs: QuadResult,
    pub verdict: Verdict,
    #[serde(serialize_with = "crate::float_serde::float")]
    pub margin: f64,
}

/// Outcome of one check on one parameter set. `lhs`, `rhs` and `margin`
/// repeat the tightest link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCase {
    pub theorem: TheoremId,
    pub trial: usize,
    pub params: Params,
    pub lhs: QuadResult,
    pub rhs: QuadResult,
    pub verdict: Verdict,
    #[serde(serialize_with = "crate::float_serde::float")]
    pub margin: f64,
    pub links: Vec<Link>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl TheoremCase {
    pub(crate) fn from_links(theorem: TheoremId, params: Params, links: Vec<Link>) -> Self {
        let verdict = if links.iter().any(|l| l.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if links.is_empty() || links.iter().any(|l| l.verdict == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        let tight = links
            .iter()
            .filter(|l| verdict != Verdict::Fail || l.verdict == Verdict::Fail)
            .min_by(|a, b| nan_last(a.margin).total_cmp(&nan_last(b.margin)))
            .cloned();
        match tight {
            Some(t) => TheoremCase {
                theorem,
                trial: 0,
                params,
                lhs: t.lhs,
                rhs: t.rhs,
                verdict,
                margin: t.margin,
                links,
                diagnostic: None,
            },
            None => TheoremCase::failed_eval(theorem, params, "no links evaluated".into()),
        }
    }

    pub(crate) fn failed_eval(theorem: TheoremId, params: Params, diagnostic: String) -> Self {
        let none = QuadResult::deterministic(f64::NAN, f64::INFINITY, 0);
        TheoremCase {
            theorem,
            trial: 0,
            params,
            lhs: none,
            rhs: none,
            verdict: Verdict::Inconclusive,
            margin: f64::NAN,
            links: Vec::new(),
            diagnostic: Some(diagnostic),
        }
    }

    pub fn link(&self, name: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.name == name)
    }
}

fn nan_last(m: f64) -> f64 {
    if m.is_nan() {
        f64::INFINITY
    } else {
        m
    }
}

/// Parameter ranges and run settings for [`run_suite`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub theorems: Vec<TheoremId>,
    /// Dimensions drawn uniformly; moment checks always use `n = 2`.
    pub n_values: Vec<usize>,
    pub k_range: (f64, f64),
    pub phi_range: (f64, f64),
    pub eta_range: (f64, f64),
    pub zeta_range: (f64, f64),
    /// Range of `a` (first kind) and `p_i` (second kind).
    pub hyp_a_range: (f64, f64),
    /// Range of `b − a` and `q_i − p_i`.
    pub hyp_gap_range: (f64, f64),
    /// Moment orders, further capped at `0.9·a`.
    pub z_range: (f64, f64),
    /// Relative slack added to the error budget of every link.
    pub slack: f64,
    /// Relative tolerance of deterministic simplex integrals.
    pub tol: f64,
    /// Relative tolerance of the nested moment integrals.
    pub moment_tol: f64,
    pub method: MethodChoice,
    pub shift: Shift,
    /// Swap both sides of every link (mutation control).
    pub flipped: bool,
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 200,
            seed: 42,
            theorems: TheoremId::ALL.to_vec(),
            n_values: vec![2, 3],
            k_range: (0.5, 3.0),
            phi_range: (0.2, 5.0),
            eta_range: (0.2, 3.0),
            zeta_range: (0.0, 3.0),
            hyp_a_range: (0.2, 3.0),
            hyp_gap_range: (0.2, 3.0),
            z_range: (0.1, 3.0),
            slack: 1e-6,
            tol: 1e-9,
            moment_tol: 1e-7,
            method: MethodChoice::Auto,
            shift: Shift::K,
            flipped: false,
            execution: Execution::default(),
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64), min: f64, strict: bool) -> Result<()> {
    let ok_lo = if strict { lo > min } else { lo >= min };
    if !(lo.is_finite() && hi.is_finite() && ok_lo && lo <= hi) {
        let op = if strict { ">" } else { ">=" };
        return Err(Error::Config(format!(
            "{name} range [{lo}, {hi}] must be finite, ordered and {op} {min}"
        )));
    }
    Ok(())
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.slack >= 0.0 && self.slack.is_finite()) {
            return Err(Error::Config(format!(
                "slack must be nonnegative, got {}",
                self.slack
            )));
        }
        for (name, t) in [("tol", self.tol), ("moment_tol", self.moment_tol)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0,1), got {t}")));
            }
        }
        check_range("k", self.k_range, 0.0, true)?;
        check_range("phi", self.phi_range, 0.0, true)?;
        check_range("eta", self.eta_range, 0.0, true)?;
        check_range("zeta", self.zeta_range, 0.0, false)?;
        check_range("a", self.hyp_a_range, 0.0, true)?;
        check_range("b - a", self.hyp_gap_range, 0.0, true)?;
        check_range("z", self.z_range, 0.0, true)?;
        if self.n_values.is_empty() || self.n_values.iter().any(|n| !(2..=MAX_DIM).contains(n)) {
            return Err(Error::Config(format!("n values must lie in 2..={MAX_DIM}")));
        }
        match self.method {
            MethodChoice::Deterministic if self.n_values.iter().any(|&n| n > 4) => {
                return Err(Error::Config(
                    "deterministic evaluation supports n <= 4".into(),
                ));
            }
            MethodChoice::MonteCarlo { samples } if samples < 2 => {
                return Err(Error::Config("Monte Carlo needs at least 2 samples".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            slack: self.slack,
            flipped: self.flipped,
            method: self.method,
            shift: self.shift,
            tol: self.tol,
            moment_tol: self.moment_tol,
            budget: EVAL_BUDGET,
            seed: self.seed,
            stream: 0,
        }
    }
}

/// Aggregate counts for one theorem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub theorem: TheoremId,
    pub trials: usize,
    pub passes: usize,
    pub fails: usize,
    pub inconclusives: usize,
    #[serde(serialize_with = "crate::float_serde::float")]
    pub worst_margin: f64,
    #[serde(serialize_with = "crate::float_serde::float")]
    pub median_margin: f64,
}

impl TheoremSummary {
    pub fn from_cases(theorem: TheoremId, cases: &[TheoremCase]) -> Self {
        let mine: Vec<&TheoremCase> = cases.iter().filter(|c| c.theorem == theorem).collect();
        let count = |v: Verdict| mine.iter().filter(|c| c.verdict == v).count();
        let mut margins: Vec<f64> = mine
            .iter()
            .map(|c| c.margin)
            .filter(|m| !m.is_nan())
            .collect();
        margins.sort_by(f64::total_cmp);
        let median = match margins.len() {
            0 => f64::NAN,
            m if m % 2 == 1 => margins[m / 2],
            m => 0.5 * (margins[m / 2 - 1] + margins[m / 2]),
        };
        TheoremSummary {
            theorem,
            trials: mine.len(),
            passes: count(Verdict::Pass),
            fails: count(Verdict::Fail),
            inconclusives: count(Verdict::Inconclusive),
            worst_margin: margins.first().copied().unwrap_or(f64::NAN),
            median_margin: median,
        }
    }

    pub fn inconclusive_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.inconclusives as f64 / self.trials as f64
        }
    }
}

/// Everything a suite run produced. The global verdict is `fail` when any
/// case failed and `pass` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub summaries: Vec<TheoremSummary>,
    pub verdict: Verdict,
    pub cases: Vec<TheoremCase>,
}

impl SuiteReport {
    pub fn fails(&self) -> usize {
        self.summaries.iter().map(|s| s.fails).sum()
    }

    pub fn inconclusives(&self) -> usize {
        self.summaries.iter().map(|s| s.inconclusives).sum()
    }

    pub fn summary(&self, id: TheoremId) -> Option<&TheoremSummary> {
        self.summaries.iter().find(|s| s.theorem == id)
    }
}

/// Random stream of one trial.
pub fn trial_rng(seed: u64, id: TheoremId, trial: usize) -> RngState {
    RngState::new(seed)
        .fork(id.index() as u64)
        .fork(trial as u64)
}

/// Samples and checks `cfg.trials` parameter sets for every selected
/// theorem. Individual failures are recorded; only an invalid
/// configuration aborts the run.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut jobs = Vec::with_capacity(cfg.theorems.len() * cfg.trials);
    for &id in &cfg.theorems {
        for trial in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, id, trial);
            let params = sample_params(id, cfg, &mut rng)?;
            jobs.push((id, trial, params, rng));
        }
    }
    let base = cfg.check_options();
    let cases = map_indexed(jobs.len(), cfg.execution, |j| {
        let (id, trial, ref params, rng) = jobs[j];
        let opts = CheckOptions {
            seed: rng.seed,
            stream: rng.fork(u64::MAX).stream,
            ..base
        };
        let mut case = check(id, params.clone(), &opts);
        case.trial = trial;
        case
    });
    let summaries = cfg
        .theorems
        .iter()
        .map(|&id| TheoremSummary::from_cases(id, &cases))
        .collect::<Vec<_>>();
    let verdict = if summaries.iter().any(|s| s.fails > 0) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(SuiteReport {
        seed: cfg.seed,
        summaries,
        verdict,
        cases,
    })
}
