//! JSON and table renderings of command results.

use std::io::Write;

use kbeta::harness::{SuiteReport, TheoremId, TheoremSummary, Verdict};
use serde::Serialize;

use crate::eval::{EvalOutput, FUNCTIONS};
use crate::{Format, Result};

fn num(x: f64) -> String {
    if x.is_nan() {
        "-".into()
    } else {
        format!("{x:.6e}")
    }
}

pub fn eval(r: &EvalOutput, format: Format, w: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => writeln!(w, "{}", serde_json::to_string(r)?)?,
        Format::Table => {
            writeln!(w, "function  {}", r.function)?;
            writeln!(w, "value     {}", r.value)?;
            writeln!(w, "abs_err   {}", r.abs_err.map_or("-".into(), num))?;
            if let Some(s) = r.stderr {
                writeln!(w, "stderr    {}", num(s))?;
            }
            let method = serde_json::to_value(r.method)?;
            writeln!(w, "method    {}", method.as_str().unwrap_or("-"))?;
            writeln!(w, "evals     {}", r.evals)?;
        }
    }
    Ok(())
}

/// Aggregate written after the per-case lines.
#[derive(Serialize)]
struct Footer<'a> {
    seed: u64,
    verdict: Verdict,
    cases: usize,
    passes: usize,
    fails: usize,
    inconclusives: usize,
    summaries: &'a [TheoremSummary],
}

pub fn suite(r: &SuiteReport, format: Format, w: &mut dyn Write) -> Result<()> {
    let footer = Footer {
        seed: r.seed,
        verdict: r.verdict,
        cases: r.cases.len(),
        passes: r.summaries.iter().map(|s| s.passes).sum(),
        fails: r.fails(),
        inconclusives: r.inconclusives(),
        summaries: &r.summaries,
    };
    match format {
        Format::Json => {
            for c in &r.cases {
                writeln!(w, "{}", serde_json::to_string(c)?)?;
            }
            writeln!(w, "{}", serde_json::to_string(&footer)?)?;
        }
        Format::Table => {
            writeln!(
                w,
                "{:<11} {:>6} {:>6} {:>6} {:>8} {:>14} {:>14}",
                "theorem", "trials", "pass", "fail", "inconcl", "worst_margin", "median_margin"
            )?;
            for s in &r.summaries {
                writeln!(
                    w,
                    "{:<11} {:>6} {:>6} {:>6} {:>8} {:>14} {:>14}",
                    s.theorem.as_str(),
                    s.trials,
                    s.passes,
                    s.fails,
                    s.inconclusives,
                    num(s.worst_margin),
                    num(s.median_margin)
                )?;
            }
            for c in r.cases.iter().filter(|c| c.verdict != Verdict::Pass) {
                let link = c
                    .links
                    .iter()
                    .filter(|l| l.verdict == c.verdict)
                    .map(|l| l.name.as_str())
                    .collect::<Vec<_>>()
                    .join(",");
                write!(
                    w,
                    "{} trial {}: {} margin {}",
                    c.theorem,
                    c.trial,
                    c.verdict,
                    num(c.margin)
                )?;
                if !link.is_empty() {
                    write!(w, " [{link}]")?;
                }
                if let Some(d) = &c.diagnostic {
                    write!(w, " ({d})")?;
                }
                writeln!(w)?;
            }
            writeln!(
                w,
                "verdict: {} ({} cases, {} fail, {} inconclusive, seed {})",
                footer.verdict, footer.cases, footer.fails, footer.inconclusives, footer.seed
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Entry {
    kind: &'static str,
    name: &'static str,
    params: Vec<&'static str>,
    description: &'static str,
}

fn theorem_params(id: TheoremId) -> Vec<&'static str> {
    let mut p = vec!["phi"];
    if id.is_convexity() {
        p.push("psi");
    }
    if id.is_second_kind() {
        p.extend(["p", "q", "eta", "zeta"]);
    } else {
        p.extend(["a", "b", "eta", "zeta"]);
    }
    if id.has_moments() {
        p.push("z");
    }
    p.push("k");
    p
}

fn entries() -> Vec<Entry> {
    let functions = FUNCTIONS.iter().map(|f| Entry {
        kind: "function",
        name: f.name,
        params: f.params.to_vec(),
        description: f.about,
    });
    let theorems = TheoremId::ALL.iter().map(|&id| Entry {
        kind: "theorem",
        name: id.as_str(),
        params: theorem_params(id),
        description: id.describe(),
    });
    functions.chain(theorems).collect()
}

pub fn list(format: Format, w: &mut dyn Write) -> Result<()> {
    let all = entries();
    match format {
        Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&all)?)?,
        Format::Table => {
            let mut kind = "";
            for e in &all {
                if e.kind != kind {
                    kind = e.kind;
                    writeln!(
                        w,
                        "{}",
                        if kind == "function" {
                            "functions:"
                        } else {
                            "inequalities:"
                        }
                    )?;
                }
                let flags = e
                    .params
                    .iter()
                    .map(|p| format!("--{p}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(w, "  {:<17} {}", e.name, e.description)?;
                writeln!(w, "  {:<17} {}", "", flags)?;
            }
        }
    }
    Ok(())
}
