//! End-to-end acceptance run. Each criterion prints one line; the test
//! fails if any criterion does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use kbeta::harness::TheoremId;
use kbeta::multivar::*;
use kbeta::quadrature::sup_pi;
use kbeta::scalar::*;
use kbeta::{HypParams, KParam, QuadResult, SeriesControl};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

fn k(v: f64) -> KParam {
    KParam::new(v).unwrap()
}

fn hp(a: f64, b: f64) -> HypParams {
    HypParams::new(a, b).unwrap()
}

fn pv(phi: &[f64], kv: f64) -> PhiVec {
    PhiVec::new(phi.to_vec(), k(kv)).unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn agree(x: &QuadResult, y: &QuadResult) -> bool {
    (x.value - y.value).abs() <= x.abs_err + y.abs_err + 1e-13 * x.value.abs().max(y.value.abs())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || {
        format!("took {:.1?}, limit {limit:?}", t.elapsed())
    })
}

fn kbeta(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_kbeta"))
        .args(args)
        .env_remove("KBETA_SEED")
        .output()
        .unwrap();
    (o.status.code(), o.stdout)
}

fn footer(report: &[u8]) -> Value {
    let text = std::str::from_utf8(report).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn scalar_identities() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (phi, psi, kv) = (
            rng.random_range(0.1..6.0),
            rng.random_range(0.1..6.0),
            rng.random_range(0.3..3.0),
        );
        let g = |x: f64| gamma_k(x, k(kv)).unwrap().value;
        let e1 = rel(g(phi + kv), phi * g(phi));
        let e2 = rel(
            beta_k2(phi, psi, k(kv)).unwrap().value,
            g(phi) * g(psi) / g(phi + psi),
        );
        worst = worst.max(e1).max(e2);
    }
    ensure(worst < 1e-10, || format!("worst relative error {worst:e}"))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("500 draws, worst relative error {worst:.1e}"))
}

fn hypergeometric_routes() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let (mut worst, mut worst_d): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let a = rng.random_range(0.2..4.0);
        let h = hp(a, a + rng.random_range(0.2..4.0));
        let kv = rng.random_range(0.5..3.0);
        let l = rng.random_range(-30.0..30.0);
        let s = hyp1f1k(h, l, k(kv), SeriesControl::default()).unwrap();
        let i = hyp1f1k_integral(h, l, k(kv)).unwrap();
        let m = hyp1f1k_kummer(h, l, k(kv)).unwrap();
        worst = worst.max(rel(i, s)).max(rel(m, s));
        // absolute comparison needs O(1) values
        let l = rng.random_range(-10.0..3.0);
        let step = 1e-5;
        let f = |x: f64| hyp1f1k(h, x, k(kv), SeriesControl::default()).unwrap();
        let fd = (f(l + step) - f(l - step)) / (2.0 * step);
        worst_d = worst_d.max((hyp1f1k_deriv(h, l, k(kv)).unwrap() - fd).abs());
    }
    ensure(worst < 1e-9, || format!("routes differ by {worst:e}"))?;
    ensure(worst_d < 1e-7, || format!("derivative off by {worst_d:e}"))?;
    within(t, Duration::from_secs(30))?;
    Ok(format!(
        "200 points, routes within {worst:.1e}, derivative within {worst_d:.1e}"
    ))
}

fn remark_bounds() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut bad = 0;
    for _ in 0..1000 {
        let a = rng.random_range(0.1..5.0);
        let h = hp(a, a + rng.random_range(0.0..5.0));
        let kv = rng.random_range(0.3..3.0);
        let f = |l: f64| hyp1f1k(h, l, k(kv), SeriesControl::default()).unwrap();
        let v = f(rng.random_range(-800.0..=0.0));
        if !(0.0..=1.0).contains(&v) {
            bad += 1;
        }
        let l1 = rng.random_range(-100.0..30.0);
        let l2 = l1 + rng.random_range(0.0..20.0);
        if f(l1) > f(l2) {
            bad += 1;
        }
    }
    ensure(bad == 0, || format!("{bad} violations"))?;
    Ok("1000 bound draws, 1000 monotone pairs, 0 violations".into())
}

fn simplex_supremum() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut gaps = Vec::new();
    for n in 2..=6usize {
        let sup = sup_pi(n);
        ensure((sup - (n as f64).powi(-(n as i32))).abs() < 1e-17, || {
            format!("sup_pi({n}) = {sup}")
        })?;
        let mut best = vec![0.0; n];
        let mut best_pi = 0.0;
        for _ in 0..20_000 {
            let e: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
            let s: f64 = e.iter().sum();
            let p: f64 = e.iter().map(|x| x / s).product();
            ensure(p <= sup * (1.0 + 1e-12), || {
                format!("n={n}: {p} exceeds {sup}")
            })?;
            if p > best_pi {
                best_pi = p;
                best = e.iter().map(|x| x / s).collect();
            }
        }
        // pairwise averaging raises the product and keeps the sum
        for _ in 0..60 {
            for i in 0..n {
                for j in i + 1..n {
                    let m = 0.5 * (best[i] + best[j]);
                    best[i] = m;
                    best[j] = m;
                }
            }
        }
        let p: f64 = best.iter().product();
        ensure(p <= sup * (1.0 + 1e-12) && sup - p < 1e-6, || {
            format!("n={n}: refined {p} vs {sup}")
        })?;
        gaps.push(sup - p);
    }
    within(t, Duration::from_secs(10))?;
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    Ok(format!("n = 2..6, refined gap at most {worst:.1e}"))
}

fn det_vs_mc() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let det = EvalMethod::Deterministic { tol: 1e-10 };
    let (mut worst, mut outside): (f64, Vec<String>) = (0.0, Vec::new());
    // kinds alternate, and n cycles so every (kind, n) pair gets cases
    for case in 0..50u64 {
        let n = 2 + (case / 2 % 2) as usize;
        let kv = rng.random_range(0.5..2.0);
        let phi: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
        let p = pv(&phi, kv);
        let mc = EvalMethod::MonteCarlo {
            samples: 100_000,
            seed: 500 + case,
            stream: 0,
        };
        let (kind, d, m) = if case % 2 == 0 {
            let a = rng.random_range(0.3..2.0);
            let h = hp(a, a + rng.random_range(0.2..2.0));
            let fp =
                FirstKindParams::new(h, rng.random_range(0.3..1.5), rng.random_range(0.0..1.0))
                    .unwrap();
            (
                "first",
                beta_first(&p, &fp, det).unwrap(),
                beta_first(&p, &fp, mc).unwrap(),
            )
        } else {
            let ps: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..2.0)).collect();
            let qs = ps.iter().map(|x| x + rng.random_range(0.2..2.0)).collect();
            let etas = (0..n).map(|_| rng.random_range(0.3..1.5)).collect();
            let zetas = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let sp = SecondKindParams::new(ps, qs, etas, zetas).unwrap();
            (
                "second",
                beta_second(&p, &sp, det).unwrap(),
                beta_second(&p, &sp, mc).unwrap(),
            )
        };
        let budget = 3.0 * m.stderr.unwrap() + d.abs_err;
        let dev = (d.value - m.value).abs();
        if dev > budget {
            let z = (m.value - d.value) / m.stderr.unwrap();
            outside.push(format!(
                "case {case} {kind} n={n}: det {} mc {} z = {z:.2}",
                d.value, m.value
            ));
        }
        worst = worst.max(dev / budget);
    }
    ensure(outside.is_empty(), || {
        format!(
            "{} of 50 outside the budget: {}",
            outside.len(),
            outside.join("; ")
        )
    })?;
    within(t, Duration::from_secs(300))?;
    Ok(format!("50 cases, largest deviation {worst:.2} of budget"))
}

fn full_suite(report: &[u8]) -> Outcome {
    let f = footer(report);
    let fails = f["fails"].as_u64().unwrap();
    ensure(fails == 0, || format!("{fails} fail verdicts"))?;
    for s in f["summaries"].as_array().unwrap() {
        let (inc, trials) = (
            s["inconclusives"].as_f64().unwrap(),
            s["trials"].as_f64().unwrap(),
        );
        ensure(trials == 200.0, || {
            format!("{} ran {trials} trials", s["theorem"])
        })?;
        ensure(inc / trials < 0.05, || {
            format!("{} inconclusive rate {}", s["theorem"], inc / trials)
        })?;
    }
    Ok(format!(
        "{} cases, 0 fails, {} inconclusive",
        f["cases"], f["inconclusives"]
    ))
}

fn mutation_sensitivity() -> Outcome {
    let (code, out) = kbeta(&[
        "verify", "all", "--trials", "50", "--flip", "--format", "json",
    ]);
    ensure(code == Some(1), || {
        format!("flipped run exited with {code:?}")
    })?;
    let f = footer(&out);
    let summaries = f["summaries"].as_array().unwrap();
    ensure(summaries.len() == TheoremId::ALL.len(), || {
        "missing theorems".into()
    })?;
    let mut least = u64::MAX;
    for s in summaries {
        let fails = s["fails"].as_u64().unwrap();
        ensure(fails >= 1, || {
            format!("{} never failed when flipped", s["theorem"])
        })?;
        least = least.min(fails);
    }
    Ok(format!(
        "every flipped inequality fails, at least {least} of 50"
    ))
}

fn collapses() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let det = EvalMethod::Deterministic { tol: 1e-10 };
    for case in 0..20 {
        let n = 2 + case % 2;
        let kv = rng.random_range(0.6..2.0);
        let phi: Vec<f64> = (0..n).map(|_| rng.random_range(0.6..3.0)).collect();
        let p = pv(&phi, kv);
        let eta = rng.random_range(0.3..1.5);
        let a = rng.random_range(0.3..2.5);

        // first kind at a = b and ζ = 0 is the extended beta
        let fp = FirstKindParams::new(hp(a, a), eta, 0.0).unwrap();
        let (l, r) = (
            beta_first(&p, &fp, det).unwrap(),
            beta_ext_n(&p, eta, det).unwrap(),
        );
        ensure(agree(&l, &r), || {
            format!("a = b, case {case}: {} vs {}", l.value, r.value)
        })?;

        // two variables and ζ = 0 give the hypergeometric beta
        let h = hp(a, a + rng.random_range(0.2..2.0));
        let p2 = pv(&phi[..2], kv);
        let fp = FirstKindParams::new(h, eta, 0.0).unwrap();
        let l = beta_first(&p2, &fp, det).unwrap();
        let r = beta_hyp2(phi[0], phi[1], eta, h, k(kv)).unwrap();
        ensure(agree(&l, &r), || {
            format!("n = 2, case {case}: {} vs {}", l.value, r.value)
        })?;

        // second kind with p = q and ζ = 0 is the per-coordinate extended beta
        let ps: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..2.0)).collect();
        let etas: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.5)).collect();
        let sp = SecondKindParams::new(ps.clone(), ps, etas.clone(), vec![0.0; n]).unwrap();
        let l = beta_second(&p, &sp, det).unwrap();
        let r = beta_ext_n_vec(&p, &etas, Coupling::Coordinate, det).unwrap();
        ensure(agree(&l, &r), || {
            format!("p = q, case {case}: {} vs {}", l.value, r.value)
        })?;

        // orthant gamma with equal hypergeometric parameters
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.5)).collect();
        let hv: Vec<HypParams> = (0..n)
            .map(|_| rng.random_range(0.3..2.5))
            .map(|x| hp(x, x))
            .collect();
        let l = gamma_kc_hyp(&p, &c, &hv).unwrap();
        let r = gamma_kc(&p, &c).unwrap();
        ensure(agree(&l, &r), || {
            format!("α = β, case {case}: {} vs {}", l.value, r.value)
        })?;

        // and at c = 0 it factorizes into k-gammas
        let l = gamma_kc(&p, &vec![0.0; n]).unwrap();
        let r = phi
            .iter()
            .map(|&x| gamma_k_closed(x, k(kv)))
            .product::<f64>();
        ensure(rel(l.value, r) <= l.abs_err / r + 1e-13, || {
            format!("c = 0, case {case}: {} vs {r}", l.value)
        })?;
    }
    Ok("5 collapses, 20 cases each".into())
}

fn reproducible(first: &[u8]) -> Outcome {
    let (_, second) = kbeta(&[
        "verify", "all", "--trials", "200", "--seed", "42", "--format", "json",
    ]);
    ensure(first == second.as_slice(), || "reports differ".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

#[test]
fn acceptance() {
    // one shared full run feeds criteria 6 and 9
    let t = Instant::now();
    let (code, report) = kbeta(&[
        "verify", "all", "--trials", "200", "--seed", "42", "--format", "json",
    ]);
    let suite_time = t.elapsed();
    let full: Box<dyn Fn() -> Outcome> = Box::new(|| {
        ensure(code == Some(0), || format!("exit status {code:?}"))?;
        ensure(suite_time < Duration::from_secs(1200), || {
            format!("took {suite_time:.1?}")
        })?;
        full_suite(&report)
    });
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(scalar_identities)),
        (2, Box::new(hypergeometric_routes)),
        (3, Box::new(remark_bounds)),
        (4, Box::new(simplex_supremum)),
        (5, Box::new(det_vs_mc)),
        (6, full),
        (7, Box::new(mutation_sensitivity)),
        (8, Box::new(collapses)),
        (9, Box::new(|| reproducible(&report))),
    ];
    let mut failed = Vec::new();
    for (n, check) in &criteria {
        let t = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("criterion {n}: pass ({msg}, {:.1?})", t.elapsed()),
            Err(msg) => {
                println!("criterion {n}: FAIL ({msg})");
                failed.push(*n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
