//! The function catalogue behind `kbeta eval`.

use std::collections::BTreeMap;

use kbeta::multivar::{
    beta_ext_n, beta_ext_n_vec, beta_first, beta_k_n, beta_k_n_quad, beta_second, gamma_kc,
    gamma_kc_hyp, Coupling, EvalMethod, FirstKindParams, PhiVec, SecondKindParams,
};
use kbeta::quadrature::sup_pi;
use kbeta::scalar::{self, ExtReading};
use kbeta::{HypParams, KParam, Method, QuadResult, SeriesControl};
use serde::Serialize;

use crate::{usage, CouplingArg, EvalArgs, MethodArg, ReadingArg, Result};

/// A catalogued function and the flags it accepts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionSpec {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub about: &'static str,
}

macro_rules! specs {
    ($($name:literal [$($p:literal),*] $about:literal),* $(,)?) => {
        &[$(FunctionSpec { name: $name, params: &[$($p),*], about: $about }),*]
    };
}

pub const FUNCTIONS: &[FunctionSpec] = specs![
    "poch_k" ["a", "m", "k"] "Pochhammer k-symbol (a)_{m,k}",
    "gamma_k" ["phi", "k"] "Γ_k(φ) by half-line quadrature",
    "beta_k2" ["phi", "psi", "k"] "β_k(φ,ψ) by quadrature",
    "gamma_ext" ["phi", "ext", "k"] "extended Γ_{a,k}(φ), a = ext",
    "beta_ext1" ["phi", "psi", "ext", "k"] "extended β with e^{−a^k/(k m(1−m))}, a = ext",
    "beta_ext2" ["phi", "psi", "ext", "k", "reading"] "extended β with two parameters, ext = a,b",
    "hyp1f1k" ["a", "b", "l", "k"] "₁F₁,k(a;b;l) by its series",
    "hyp1f1k_integral" ["a", "b", "l", "k"] "₁F₁,k(a;b;l) by its Euler integral (b > a)",
    "hyp1f1k_kummer" ["a", "b", "l", "k"] "e^l ₁F₁,k(b−a;b;−l)",
    "hyp1f1k_deriv" ["a", "b", "l", "k"] "d/dl ₁F₁,k(a;b;l)",
    "beta_hyp2" ["phi", "psi", "ext", "a", "b", "k"] "β_{ext,k}^{(a,b)}(φ,ψ)",
    "gamma_hyp1" ["phi", "ext", "a", "b", "k"] "Γ_k^{(a,b)}(φ, ext), finite for φ < a",
    "sup_pi" ["n"] "n^{−n}, the maximum of ∏t_i on the simplex",
    "beta_k_n" ["phi", "k"] "β_k(φ) from log-gammas",
    "beta_k_n_quad" ["phi", "k", "method", "samples", "tol", "seed"] "β_k(φ) by simplex quadrature",
    "beta_ext_n" ["phi", "ext", "k", "method", "samples", "tol", "seed"] "n-variable extended β, scalar ext",
    "beta_ext_n_vec" ["phi", "ext", "k", "coupling", "method", "samples", "tol", "seed"] "n-variable extended β, one ext per coordinate",
    "gamma_kc" ["phi", "c", "k"] "orthant gamma ∏Γ_{c_i,k}(φ_i)",
    "gamma_kc_hyp" ["phi", "c", "a", "b", "k"] "orthant gamma with ₁F₁,k(a_i;b_i;·) kernels",
    "beta_first" ["phi", "a", "b", "eta", "zeta", "k", "method", "samples", "tol", "seed"] "first-kind β_{ζ,k}^{(a,b)}(φ;η)",
    "beta_second" ["phi", "p", "q", "eta", "zeta", "k", "method", "samples", "tol", "seed"] "second-kind β_{ζ,k}^{(p,q)}(φ;η)",
];

/// Result of one evaluation. `abs_err` is absent for functions that do
/// not estimate their error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOutput {
    pub function: String,
    pub params: BTreeMap<&'static str, serde_json::Value>,
    pub value: f64,
    pub abs_err: Option<f64>,
    pub method: Method,
    pub evals: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

/// Flags given on the command line, by name.
struct Bindings<'a> {
    args: &'a EvalArgs,
    vectors: BTreeMap<&'static str, &'a [f64]>,
}

impl<'a> Bindings<'a> {
    fn new(args: &'a EvalArgs) -> Self {
        let mut vectors = BTreeMap::new();
        for (name, v) in [
            ("phi", &args.phi),
            ("a", &args.a),
            ("b", &args.b),
            ("eta", &args.eta),
            ("zeta", &args.zeta),
            ("c", &args.c),
            ("ext", &args.ext),
            ("p", &args.p),
            ("q", &args.q),
        ] {
            if !v.is_empty() {
                vectors.insert(name, v.as_slice());
            }
        }
        Bindings { args, vectors }
    }

    /// Every flag that was set explicitly.
    fn given(&self) -> Vec<&'static str> {
        let a = self.args;
        let mut g: Vec<&'static str> = self.vectors.keys().copied().collect();
        let opt = [
            ("psi", a.psi.is_some()),
            ("k", a.k.is_some()),
            ("l", a.l.is_some()),
            ("m", a.m.is_some()),
            ("n", a.n.is_some()),
            ("method", a.method.is_some()),
            ("samples", a.samples.is_some()),
            ("tol", a.tol.is_some()),
            ("coupling", a.coupling.is_some()),
            ("reading", a.reading.is_some()),
        ];
        g.extend(opt.iter().filter(|(_, set)| *set).map(|(n, _)| *n));
        g
    }

    fn vector(&self, name: &str) -> Result<&'a [f64]> {
        match self.vectors.get(name) {
            Some(v) => Ok(v),
            None => usage(format!("missing --{name}")),
        }
    }

    fn scalar(&self, name: &str) -> Result<f64> {
        match self.vector(name)? {
            [x] => Ok(*x),
            v => usage(format!("--{name} takes a single value, got {}", v.len())),
        }
    }

    fn pair(&self, name: &str) -> Result<(f64, f64)> {
        match self.vector(name)? {
            [x, y] => Ok((*x, *y)),
            v => usage(format!("--{name} takes two values, got {}", v.len())),
        }
    }

    fn psi(&self) -> Result<f64> {
        self.args.psi.map_or_else(|| usage("missing --psi"), Ok)
    }

    fn l(&self) -> Result<f64> {
        self.args.l.map_or_else(|| usage("missing --l"), Ok)
    }

    fn k(&self) -> Result<KParam> {
        Ok(KParam::new(self.args.k.unwrap_or(1.0))?)
    }

    fn hyp(&self) -> Result<HypParams> {
        Ok(HypParams::new(self.scalar("a")?, self.scalar("b")?)?)
    }

    fn phi_vec(&self) -> Result<PhiVec> {
        Ok(PhiVec::new(self.vector("phi")?.to_vec(), self.k()?)?)
    }

    fn method(&self, n: usize) -> Result<EvalMethod> {
        let a = self.args;
        Ok(match (a.method, a.samples, a.tol) {
            (Some(MethodArg::Mc), s, None) => EvalMethod::MonteCarlo {
                samples: s.unwrap_or(EvalMethod::DEFAULT_SAMPLES),
                seed: a.seed,
                stream: 0,
            },
            (Some(MethodArg::Det), None, t) => EvalMethod::Deterministic {
                tol: t.unwrap_or(EvalMethod::DEFAULT_TOL),
            },
            (None, None, Some(t)) => EvalMethod::Deterministic { tol: t },
            (None, None, None) => EvalMethod::default_for(n, a.seed),
            (_, Some(_), _) => return usage("--samples needs --method mc"),
            (_, _, Some(_)) => return usage("--tol applies to --method det only"),
        })
    }

    /// The bindings that `allowed` names, with defaults filled in.
    fn json(&self, allowed: &[&str]) -> BTreeMap<&'static str, serde_json::Value> {
        let a = self.args;
        let mut m = BTreeMap::new();
        m.insert("seed", serde_json::json!(a.seed));
        for (name, v) in &self.vectors {
            m.insert(*name, serde_json::json!(v));
        }
        m.insert("k", serde_json::json!(a.k.unwrap_or(1.0)));
        let scalars = [("psi", a.psi), ("l", a.l), ("tol", a.tol)];
        for (name, v) in scalars {
            if let Some(v) = v {
                m.insert(name, serde_json::json!(v));
            }
        }
        if let Some(v) = a.m {
            m.insert("m", serde_json::json!(v));
        }
        if let Some(v) = a.n {
            m.insert("n", serde_json::json!(v));
        }
        if let Some(v) = a.samples {
            m.insert("samples", serde_json::json!(v));
        }
        m.retain(|k, _| allowed.contains(k));
        m
    }
}

fn plain(value: f64) -> QuadResult {
    QuadResult::deterministic(value, f64::NAN, 0)
}

/// Validates the flags against the catalogue entry and evaluates.
pub fn evaluate(args: &EvalArgs) -> Result<EvalOutput> {
    let Some(spec) = FUNCTIONS.iter().find(|s| s.name == args.function) else {
        return usage(format!(
            "unknown function '{}' (see `kbeta list`)",
            args.function
        ));
    };
    let b = Bindings::new(args);
    for g in b.given() {
        if !spec.params.contains(&g) {
            return usage(format!("--{g} is not a parameter of {}", spec.name));
        }
    }
    let k = b.k()?;
    let ctl = SeriesControl::default();
    let r: QuadResult = match spec.name {
        "poch_k" => {
            let m = args.m.map_or_else(|| usage("missing --m"), Ok)?;
            QuadResult::exact(scalar::poch_k(b.scalar("a")?, m, k)?)
        }
        "gamma_k" => scalar::gamma_k(b.scalar("phi")?, k)?,
        "beta_k2" => scalar::beta_k2(b.scalar("phi")?, b.psi()?, k)?,
        "gamma_ext" => scalar::gamma_ext(b.scalar("phi")?, b.scalar("ext")?, k)?,
        "beta_ext1" => scalar::beta_ext1(b.scalar("phi")?, b.psi()?, b.scalar("ext")?, k)?,
        "beta_ext2" => {
            let (ea, eb) = b.pair("ext")?;
            let reading = match args.reading {
                Some(ReadingArg::AsPrinted) => ExtReading::AsPrinted,
                _ => ExtReading::Consistent,
            };
            scalar::beta_ext2(b.scalar("phi")?, b.psi()?, ea, eb, k, reading)?
        }
        "hyp1f1k" => {
            let r = scalar::hyp1f1k_approx(b.hyp()?, b.l()?, k, ctl)?;
            QuadResult::deterministic(r.value, r.abs_err, 0)
        }
        "hyp1f1k_integral" => plain(scalar::hyp1f1k_integral(b.hyp()?, b.l()?, k)?),
        "hyp1f1k_kummer" => plain(scalar::hyp1f1k_kummer(b.hyp()?, b.l()?, k)?),
        "hyp1f1k_deriv" => plain(scalar::hyp1f1k_deriv(b.hyp()?, b.l()?, k)?),
        "beta_hyp2" => {
            scalar::beta_hyp2(b.scalar("phi")?, b.psi()?, b.scalar("ext")?, b.hyp()?, k)?
        }
        "gamma_hyp1" => scalar::gamma_hyp1(b.scalar("phi")?, b.scalar("ext")?, b.hyp()?, k)?,
        "sup_pi" => {
            let n = args.n.map_or_else(|| usage("missing --n"), Ok)?;
            if n < 2 {
                return usage("--n must be at least 2");
            }
            QuadResult::exact(sup_pi(n))
        }
        "beta_k_n" => QuadResult::exact(beta_k_n(&b.phi_vec()?)?),
        "beta_k_n_quad" => {
            let pv = b.phi_vec()?;
            beta_k_n_quad(&pv, b.method(pv.n())?)?
        }
        "beta_ext_n" => {
            let pv = b.phi_vec()?;
            beta_ext_n(&pv, b.scalar("ext")?, b.method(pv.n())?)?
        }
        "beta_ext_n_vec" => {
            let pv = b.phi_vec()?;
            let coupling = match args.coupling {
                Some(CouplingArg::Coordinate) => Coupling::Coordinate,
                _ => Coupling::Simplex,
            };
            beta_ext_n_vec(&pv, b.vector("ext")?, coupling, b.method(pv.n())?)?
        }
        "gamma_kc" => gamma_kc(&b.phi_vec()?, b.vector("c")?)?,
        "gamma_kc_hyp" => {
            let (ha, hb) = (b.vector("a")?, b.vector("b")?);
            if ha.len() != hb.len() {
                return usage("--a and --b need the same length");
            }
            let hv = ha
                .iter()
                .zip(hb)
                .map(|(&x, &y)| HypParams::new(x, y))
                .collect::<kbeta::Result<Vec<_>>>()?;
            gamma_kc_hyp(&b.phi_vec()?, b.vector("c")?, &hv)?
        }
        "beta_first" => {
            let pv = b.phi_vec()?;
            let zeta = if b.vectors.contains_key("zeta") {
                b.scalar("zeta")?
            } else {
                0.0
            };
            let fp = FirstKindParams::new(b.hyp()?, b.scalar("eta")?, zeta)?;
            beta_first(&pv, &fp, b.method(pv.n())?)?
        }
        "beta_second" => {
            let pv = b.phi_vec()?;
            let eta = b.vector("eta")?.to_vec();
            let zeta = match b.vectors.get("zeta") {
                Some(z) => z.to_vec(),
                None => vec![0.0; eta.len()],
            };
            let sp =
                SecondKindParams::new(b.vector("p")?.to_vec(), b.vector("q")?.to_vec(), eta, zeta)?;
            beta_second(&pv, &sp, b.method(pv.n())?)?
        }
        other => return usage(format!("function '{other}' is listed but not wired")),
    };
    Ok(EvalOutput {
        function: spec.name.to_string(),
        params: b.json(spec.params),
        value: r.value,
        abs_err: if r.abs_err.is_nan() {
            None
        } else {
            Some(r.abs_err)
        },
        method: r.method,
        evals: r.evals,
        stderr: r.stderr,
    })
}
