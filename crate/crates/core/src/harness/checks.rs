//! The individual inequality checks.
//!
//! Notation inside this file: `A = η^k/k`, `B = ζ^k/η^k` (per coordinate for
//! the second kind), `β_ζ` the generalized beta under test, `β_k(φ;η)` the
//! extended beta with shared denominator `π(t)` and `β_k(φ;η⃗)` the one with
//! per-coordinate denominators.

use serde::Serialize;

use super::moments::{moment_over_eta, moment_over_zeta, moment_second_kind};
use super::{judge, Link, Params, TheoremCase, TheoremId};
use crate::error::{Error, Result};
use crate::multivar::{
    beta_ext_n, beta_ext_n_vec, beta_first, beta_k_n_exact, beta_second, Coupling, EvalMethod,
    FirstKindParams, PhiVec, SecondKindParams,
};
use crate::quadrature::QuadResult;
use crate::scalar::{gamma_hyp1, gamma_k_closed, ln_hyp, HypParams, KParam, SeriesControl};

/// How simplex integrals are evaluated inside checks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodChoice {
    /// Deterministic for `n ≤ 3`, Monte Carlo with 10^5 samples above.
    #[default]
    Auto,
    Deterministic,
    MonteCarlo {
        samples: usize,
    },
}

/// Parameter shift used by the left link of the sandwich bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shift {
    /// `(a + k, b + k)`, from the derivative of ₁F₁,k.
    #[default]
    K,
    /// `(a + 1, b + 1)`.
    Unit,
}

/// Settings shared by all checks of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOptions {
    pub slack: f64,
    pub flipped: bool,
    pub method: MethodChoice,
    pub shift: Shift,
    pub tol: f64,
    pub moment_tol: f64,
    /// Integrand evaluations allowed per moment integral.
    pub budget: u64,
    /// Monte Carlo stream; every integral of a trial uses the same draws.
    pub seed: u64,
    pub stream: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        super::SuiteConfig::default().check_options()
    }
}

impl CheckOptions {
    pub fn flipped(self) -> Self {
        CheckOptions {
            flipped: true,
            ..self
        }
    }

    fn eval_method(&self, n: usize) -> EvalMethod {
        match self.method {
            MethodChoice::Auto if n > 3 => EvalMethod::MonteCarlo {
                samples: EvalMethod::DEFAULT_SAMPLES,
                seed: self.seed,
                stream: self.stream,
            },
            MethodChoice::Auto | MethodChoice::Deterministic => {
                EvalMethod::Deterministic { tol: self.tol }
            }
            MethodChoice::MonteCarlo { samples } => EvalMethod::MonteCarlo {
                samples,
                seed: self.seed,
                stream: self.stream,
            },
        }
    }
}

/// Runs the check registered under `id`.
pub fn check(id: TheoremId, params: Params, opts: &CheckOptions) -> TheoremCase {
    let f = match id {
        TheoremId::CauchySchwarz => cauchy_schwarz,
        TheoremId::Sandwich => sandwich,
        TheoremId::TangentLower => tangent_lower,
        TheoremId::UpperRefinement => upper_refinement,
        TheoremId::MomentUpper => moment_upper,
        TheoremId::LowerExp => lower_exp,
        TheoremId::MomentLowerExp => moment_lower_exp,
        TheoremId::LowerHyp => lower_hyp,
        TheoremId::SecondConvex => second_convex,
        TheoremId::SecondUpper => second_upper,
        TheoremId::SecondLower => second_lower,
        TheoremId::SecondMoments => second_moments,
        TheoremId::SecondLowerHyp => second_lower_hyp,
    };
    let mut links = Links {
        opts,
        list: Vec::new(),
    };
    match f(&params, opts, &mut links) {
        Ok(()) => TheoremCase::from_links(id, params, links.list),
        Err(e) => TheoremCase::failed_eval(id, params, e.to_string()),
    }
}

macro_rules! named_checks {
    ($($name:ident => $id:ident),* $(,)?) => {
        $(
            pub fn $name(params: Params, opts: &CheckOptions) -> TheoremCase {
                check(TheoremId::$id, params, opts)
            }
        )*
    };
}

named_checks! {
    check_cauchy_schwarz => CauchySchwarz,
    check_sandwich => Sandwich,
    check_tangent_lower => TangentLower,
    check_upper_refinement => UpperRefinement,
    check_moment_upper => MomentUpper,
    check_lower_exp => LowerExp,
    check_moment_lower_exp => MomentLowerExp,
    check_lower_hyp => LowerHyp,
    check_second_convex => SecondConvex,
    check_second_upper => SecondUpper,
    check_second_lower => SecondLower,
    check_second_moments => SecondMoments,
    check_second_lower_hyp => SecondLowerHyp,
}

struct Links<'a> {
    opts: &'a CheckOptions,
    list: Vec<Link>,
}

impl Links<'_> {
    /// Records `lhs ≤ rhs`, or its mirror image for the mutation control.
    fn push(&mut self, name: &str, lhs: QuadResult, rhs: QuadResult) {
        let (lhs, rhs) = if self.opts.flipped {
            (rhs, lhs)
        } else {
            (lhs, rhs)
        };
        let (verdict, margin) = judge(&lhs, &rhs, self.opts.slack);
        self.list.push(Link {
            name: name.to_string(),
            lhs,
            rhs,
            verdict,
            margin,
        });
    }
}

/// A missed quadrature tolerance still yields a usable estimate; its wide
/// error bar lets the verdict logic decide.
fn soft(r: Result<QuadResult>) -> Result<QuadResult> {
    match r {
        Err(Error::Quadrature { best, abs_err }) => Ok(QuadResult::deterministic(best, abs_err, 0)),
        other => other,
    }
}

/// `ln ₁F₁,k` and its relative error; `None` stands for the constant 1
/// (the companion function when `a = b`).
fn ln_f(h: Option<HypParams>, l: f64, k: KParam) -> Result<(f64, f64)> {
    match h {
        None => Ok((0.0, 0.0)),
        Some(h) if h.is_degenerate() => Ok((l, 0.0)),
        Some(h) => ln_hyp(
            h.a() / k.get(),
            h.b() / k.get(),
            l,
            SeriesControl::default(),
        ),
    }
}

/// `₁F₁,k(b − a; b; ·)`, or `None` when it is identically 1.
fn companion(h: HypParams) -> Result<Option<HypParams>> {
    if h.is_degenerate() {
        Ok(None)
    } else {
        HypParams::new(h.b() - h.a(), h.b()).map(Some)
    }
}

fn from_ln(ln: f64, rel: f64) -> QuadResult {
    let v = ln.exp();
    QuadResult::deterministic(v, v * (rel + 8.0 * f64::EPSILON * (1.0 + ln.abs())), 0)
}

fn f_value(h: Option<HypParams>, l: f64, k: KParam) -> Result<QuadResult> {
    let (ln, rel) = ln_f(h, l, k)?;
    Ok(from_ln(ln, rel))
}

fn n_pow_n(n: usize) -> f64 {
    (n as f64).powi(n as i32)
}

struct First {
    pv: PhiVec,
    fp: FirstKindParams,
    k: KParam,
    kv: f64,
    n: usize,
    method: EvalMethod,
}

impl First {
    fn new(p: &Params, opts: &CheckOptions) -> Result<Self> {
        let pv = p.phi_vec()?;
        let fp = p.first_params()?;
        let n = pv.n();
        Ok(First {
            k: pv.k(),
            kv: pv.k().get(),
            n,
            method: opts.eval_method(n),
            pv,
            fp,
        })
    }

    /// `A = η^k/k`
    fn a_term(&self) -> f64 {
        self.fp.eta.powf(self.kv) / self.kv
    }

    /// `B = ζ^k/η^k`
    fn b_term(&self) -> f64 {
        if self.fp.zeta == 0.0 {
            0.0
        } else {
            (self.fp.zeta / self.fp.eta).powf(self.kv)
        }
    }

    fn beta(&self, pv: &PhiVec, fp: &FirstKindParams) -> Result<QuadResult> {
        soft(beta_first(pv, fp, self.method))
    }

    fn beta_zeta(&self) -> Result<QuadResult> {
        self.beta(&self.pv, &self.fp)
    }

    fn beta_ext(&self) -> Result<QuadResult> {
        soft(beta_ext_n(&self.pv, self.fp.eta, self.method))
    }

    fn moment_z(&self, p: &Params) -> Result<f64> {
        p.z.first()
            .copied()
            .ok_or_else(|| Error::Config("missing moment order z".into()))
    }
}

fn convexity_links<F>(p: &Params, links: &mut Links, beta: F) -> Result<()>
where
    F: Fn(&PhiVec) -> Result<QuadResult>,
{
    let phi = p.phi_vec()?;
    let psi = p.psi_vec()?;
    let sum = phi.plus(&psi)?;
    let s = beta(&sum)?;
    links.push(
        "log_convexity",
        s.mul(s),
        beta(&phi.scaled(2.0)?)?.mul(beta(&psi.scaled(2.0)?)?),
    );
    let mid = beta(&sum.scaled(0.5)?)?;
    links.push("midpoint", mid, beta(&phi)?.add(beta(&psi)?).scale(0.5));
    Ok(())
}

fn cauchy_schwarz(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    convexity_links(p, links, |v| fk.beta(v, &fk.fp))
}

fn sandwich(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let h = fk.fp.h;
    let bz = fk.beta_zeta()?;
    let fp0 = FirstKindParams { zeta: 0.0, ..fk.fp };
    let b0 = fk.beta(&fk.pv, &fp0)?;
    let c = h.a() / h.b() * fk.b_term();
    let lower = if c == 0.0 {
        b0
    } else {
        let hs = match opts.shift {
            Shift::K => h.shifted(fk.k),
            Shift::Unit => h.shifted_unit(),
        };
        let shifted = fk.beta(&fk.pv.shifted(fk.kv)?, &FirstKindParams { h: hs, ..fp0 })?;
        b0.sub(shifted.scale(c))
    };
    links.push("convex_lower", lower, bz);
    links.push("zeta_monotone", bz, b0);
    links.push("beta_upper", b0, beta_k_n_exact(&fk.pv)?);
    Ok(())
}

fn tangent_lower(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let h = fk.fp.h;
    let r = h.a() / h.b();
    let mut lhs = beta_k_n_exact(&fk.pv)?
        .sub(beta_k_n_exact(&fk.pv.shifted(-fk.kv)?)?.scale(r * fk.a_term()));
    let bt = fk.b_term();
    if bt != 0.0 {
        lhs = lhs.sub(beta_k_n_exact(&fk.pv.shifted(fk.kv)?)?.scale(r * bt));
    }
    links.push("tangent", lhs, fk.beta_zeta()?);
    Ok(())
}

fn upper_refinement(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let h = Some(fk.fp.h);
    let nn = n_pow_n(fk.n);
    let arg = -fk.a_term() * nn - fk.b_term() / nn;
    let f_main = f_value(h, arg, fk.k)?;
    links.push("main", fk.beta_zeta()?, beta_k_n_exact(&fk.pv)?.mul(f_main));
    if (fk.kv - 1.0).abs() < 1e-12 {
        let f_mid = f_value(h, -2.0 * fk.fp.zeta.sqrt(), fk.k)?;
        links.push("am_gm", f_main, f_mid);
        links.push("unit", f_mid, QuadResult::exact(1.0));
    }
    Ok(())
}

/// `(n^n/k)^{z/k}`
fn moment_scale(n: usize, kv: f64, z: f64) -> f64 {
    ((n_pow_n(n) / kv).ln() * z / kv).exp()
}

fn moment_upper(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let z = fk.moment_z(p)?;
    let h = fk.fp.h;
    let lhs = soft(moment_over_eta(&fk.pv, h, z, opts.moment_tol, opts.budget))?;
    let c = (-(fk.n as f64) * (fk.n as f64).ln() * z / fk.kv).exp();
    let rhs = beta_k_n_exact(&fk.pv)?
        .scale(c)
        .mul(soft(gamma_hyp1(z, 0.0, h, fk.k))?);
    links.push("moment", lhs, rhs);
    Ok(())
}

fn lower_exp(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let nn = n_pow_n(fk.n);
    let (ln, rel) = ln_f(companion(fk.fp.h)?, fk.a_term() * nn, fk.k)?;
    let lhs = fk.beta_ext()?.mul(from_ln(ln - fk.b_term() / nn, rel));
    links.push("kummer", lhs, fk.beta_zeta()?);
    Ok(())
}

fn moment_lower_exp(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let z = fk.moment_z(p)?;
    let nn = n_pow_n(fk.n);
    let (ln, rel) = ln_f(companion(fk.fp.h)?, fk.a_term() * nn, fk.k)?;
    let c = fk.fp.eta.powf(z) * moment_scale(fk.n, fk.kv, z) * gamma_k_closed(z, fk.k);
    let lhs = fk.beta_ext()?.mul(from_ln(ln, rel)).scale(c);
    let rhs = soft(moment_over_zeta(
        &fk.pv,
        fk.fp.h,
        fk.fp.eta,
        z,
        opts.moment_tol,
        opts.budget,
    ))?;
    links.push("moment", lhs, rhs);
    Ok(())
}

fn lower_hyp(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let fk = First::new(p, opts)?;
    let h = fk.fp.h;
    let b_ext = fk.beta_ext()?;
    let f = f_value(Some(h), -fk.b_term() / n_pow_n(fk.n), fk.k)?;
    links.push("hyp", b_ext.mul(f), fk.beta_zeta()?);
    if fk.n == 2 {
        if let Some(&z) = p.z.first() {
            let c = fk.fp.eta.powf(z) * moment_scale(fk.n, fk.kv, z);
            let lhs = b_ext.scale(c).mul(soft(gamma_hyp1(z, 0.0, h, fk.k))?);
            let rhs = soft(moment_over_zeta(
                &fk.pv,
                h,
                fk.fp.eta,
                z,
                opts.moment_tol,
                opts.budget,
            ))?;
            links.push("moment", lhs, rhs);
        }
    }
    Ok(())
}

struct Second {
    pv: PhiVec,
    sp: SecondKindParams,
    k: KParam,
    kv: f64,
    method: EvalMethod,
}

impl Second {
    fn new(p: &Params, opts: &CheckOptions) -> Result<Self> {
        let pv = p.phi_vec()?;
        let sp = p.second_params()?;
        if sp.n() != pv.n() {
            return Err(Error::Config(format!(
                "phi has {} entries, second-kind parameters {}",
                pv.n(),
                sp.n()
            )));
        }
        Ok(Second {
            k: pv.k(),
            kv: pv.k().get(),
            method: opts.eval_method(pv.n()),
            pv,
            sp,
        })
    }

    fn n(&self) -> usize {
        self.pv.n()
    }

    fn a_term(&self, i: usize) -> f64 {
        self.sp.eta[i].powf(self.kv) / self.kv
    }

    fn b_term(&self, i: usize) -> f64 {
        if self.sp.zeta[i] == 0.0 {
            0.0
        } else {
            (self.sp.zeta[i] / self.sp.eta[i]).powf(self.kv)
        }
    }

    fn beta(&self, pv: &PhiVec) -> Result<QuadResult> {
        soft(beta_second(pv, &self.sp, self.method))
    }

    fn beta_ext(&self) -> Result<QuadResult> {
        soft(beta_ext_n_vec(
            &self.pv,
            &self.sp.eta,
            Coupling::Coordinate,
            self.method,
        ))
    }

    /// `Σ_i ln ₁F₁,k(q_i − p_i; q_i; arg(i)) + shift(i)` with summed errors.
    fn ln_companions<A, S>(&self, arg: A, shift: S) -> Result<(f64, f64)>
    where
        A: Fn(usize) -> f64,
        S: Fn(usize) -> f64,
    {
        let mut ln = 0.0;
        let mut rel = 0.0;
        for i in 0..self.n() {
            let (l, r) = ln_f(companion(self.sp.hyp(i))?, arg(i), self.k)?;
            ln += l + shift(i);
            rel += r;
        }
        Ok((ln, rel))
    }

    /// `η_i^{z_i} k^{−z_i/k}`
    fn moment_scale(&self, i: usize, z: f64) -> f64 {
        self.sp.eta[i].powf(z) * (-z * self.kv.ln() / self.kv).exp()
    }
}

fn second_convex(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let sk = Second::new(p, opts)?;
    convexity_links(p, links, |v| sk.beta(v))
}

fn second_upper(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let sk = Second::new(p, opts)?;
    let (ln, rel) = sk.ln_companions(|i| sk.a_term(i) + sk.b_term(i), |i| -sk.a_term(i))?;
    links.push(
        "upper",
        sk.beta(&sk.pv)?,
        beta_k_n_exact(&sk.pv)?.mul(from_ln(ln, rel)),
    );
    Ok(())
}

fn second_lower(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let sk = Second::new(p, opts)?;
    let b_ext = sk.beta_ext()?;
    let bz = sk.beta(&sk.pv)?;
    let m = |i: usize| (2.0 * (sk.sp.zeta[i].powf(sk.kv) / sk.kv).sqrt()).max(sk.a_term(i));
    let (ln, rel) = sk.ln_companions(m, |i| -sk.b_term(i))?;
    let plain = from_ln(ln, rel);
    links.push("lower", b_ext.mul(plain), bz);
    let refinable =
        (0..sk.n()).all(|i| sk.sp.eta[i].powf(2.0 * sk.kv) >= sk.kv * sk.sp.zeta[i].powf(sk.kv));
    if refinable {
        let (ln_r, rel_r) = sk.ln_companions(|i| sk.a_term(i) + sk.b_term(i), |i| -sk.b_term(i))?;
        let refined = from_ln(ln_r, rel_r);
        links.push("refined", b_ext.mul(refined), bz);
        links.push("refinement_order", plain, refined);
    }
    Ok(())
}

fn second_moments(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let sk = Second::new(p, opts)?;
    let n = sk.n();
    if p.z.len() != n {
        return Err(Error::Config(format!(
            "expected {n} moment orders, got {}",
            p.z.len()
        )));
    }
    let hs: Vec<HypParams> = (0..n).map(|i| sk.sp.hyp(i)).collect();
    let rhs = soft(moment_second_kind(
        &sk.pv,
        &hs,
        &sk.sp.eta,
        &p.z,
        opts.moment_tol,
        opts.budget,
    ))?;
    let b_ext = sk.beta_ext()?;

    let (ln, rel) = sk.ln_companions(|i| sk.a_term(i), |_| 0.0)?;
    let c: f64 = (0..n)
        .map(|i| sk.moment_scale(i, p.z[i]) * gamma_k_closed(p.z[i], sk.k))
        .product();
    links.push("gamma_companion", b_ext.mul(from_ln(ln, rel)).scale(c), rhs);

    let mut lhs = b_ext;
    for i in 0..n {
        lhs = lhs
            .scale(sk.moment_scale(i, p.z[i]))
            .mul(soft(gamma_hyp1(p.z[i], 0.0, hs[i], sk.k))?);
    }
    links.push("hyp_gamma", lhs, rhs);
    Ok(())
}

fn second_lower_hyp(p: &Params, opts: &CheckOptions, links: &mut Links) -> Result<()> {
    let sk = Second::new(p, opts)?;
    let mut ln = 0.0;
    let mut rel = 0.0;
    for i in 0..sk.n() {
        let (l, r) = ln_f(Some(sk.sp.hyp(i)), -sk.b_term(i), sk.k)?;
        ln += l;
        rel += r;
    }
    links.push(
        "hyp",
        sk.beta_ext()?.mul(from_ln(ln, rel)),
        sk.beta(&sk.pv)?,
    );
    Ok(())
}
