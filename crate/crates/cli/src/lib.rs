//! Command-line front end: `eval`, `verify` and `list`.
//!
//! [`run`] takes the argument list and two writers and returns the exit
//! status, so the binary is a thin wrapper and tests can drive it in
//! process.

mod eval;
mod render;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kbeta::harness::{run_suite, MethodChoice, Shift, SuiteConfig, TheoremId};
use kbeta::Execution;

pub use eval::{evaluate, EvalOutput, FUNCTIONS};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] kbeta::Error),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(
    name = "kbeta",
    version,
    about = "k-generalized gamma and beta functions: evaluation and inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a catalogued function.
    Eval(EvalArgs),
    /// Run randomized checks of the registered inequalities.
    Verify(VerifyArgs),
    /// List functions and inequalities with their parameters.
    List(ListArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Det,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingArg {
    Simplex,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadingArg {
    Consistent,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftArg {
    K,
    Unit,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Function name, see `kbeta list`.
    pub function: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub zeta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Vec<f64>,
    /// Extension parameter(s) of the extended gammas and betas.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ext: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Vec<f64>,
    /// Argument of ₁F₁,k.
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<f64>,
    /// Number of Pochhammer factors.
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub coupling: Option<CouplingArg>,
    #[arg(long, value_enum)]
    pub reading: Option<ReadingArg>,
    #[arg(long, env = "KBETA_SEED", default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Inequality id (e.g. eq4.5), a comma-separated list, or `all`.
    pub selector: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, env = "KBETA_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Relative slack granted before a violation counts as a failure.
    #[arg(long, allow_hyphen_values = true)]
    pub slack: Option<f64>,
    /// Dimensions to draw from.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Sampling range `lo,hi` (one value fixes it); likewise for the
    /// other range flags.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub zeta: Vec<f64>,
    /// Range of `a` and `p_i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<f64>,
    /// Range of `b − a` and `q_i − p_i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gap: Vec<f64>,
    /// Range of moment orders.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Vec<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub moment_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub shift: Option<ShiftArg>,
    /// Swap both sides of every inequality (mutation control).
    #[arg(long)]
    pub flip: bool,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status. Never panics on malformed input.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().ansi().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_PASS
            };
        }
    };
    match dispatch(&cli.command, stdout) {
        Ok(code) => code,
        // A closed pipe (e.g. `| head`) is not worth a complaint.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_PASS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut dyn Write) -> Result<i32> {
    let out = match cmd {
        Command::Eval(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::List(a) => &a.out,
    };
    let mut file;
    let sink: &mut dyn Write = match &out.output {
        Some(path) => {
            file = io::BufWriter::new(File::create(path)?);
            &mut file
        }
        None => stdout,
    };
    let code = match cmd {
        Command::Eval(a) => {
            let r = evaluate(a)?;
            render::eval(&r, a.out.format, sink)?;
            EXIT_PASS
        }
        Command::Verify(a) => {
            let cfg = suite_config(a)?;
            let report = run_suite(&cfg)?;
            render::suite(&report, a.out.format, sink)?;
            if report.fails() > 0 {
                EXIT_FAIL
            } else {
                EXIT_PASS
            }
        }
        Command::List(a) => {
            render::list(a.out.format, sink)?;
            EXIT_PASS
        }
    };
    sink.flush()?;
    Ok(code)
}

fn range(name: &str, v: &[f64], default: (f64, f64)) -> Result<(f64, f64)> {
    match v {
        [] => Ok(default),
        [x] => Ok((*x, *x)),
        [lo, hi] => Ok((*lo, *hi)),
        _ => usage(format!("--{name} takes one value or a lo,hi pair")),
    }
}

/// Parses `all`, one id or a comma-separated list of ids.
pub fn theorems(selector: &str) -> Result<Vec<TheoremId>> {
    if selector == "all" {
        return Ok(TheoremId::ALL.to_vec());
    }
    let mut ids = Vec::new();
    for s in selector.split(',') {
        let id: TheoremId = s.trim().parse()?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    Ok(ids)
}

/// Suite configuration from the `verify` flags; unset flags keep the
/// library defaults.
pub fn suite_config(a: &VerifyArgs) -> Result<SuiteConfig> {
    let d = SuiteConfig::default();
    // an empty run would pass vacuously
    if a.trials == 0 {
        return usage("--trials must be at least 1");
    }
    let method = match (a.method, a.samples) {
        (Some(MethodArg::Mc), s) => MethodChoice::MonteCarlo {
            samples: s.unwrap_or(100_000),
        },
        (Some(MethodArg::Det), None) => MethodChoice::Deterministic,
        (None, None) => MethodChoice::Auto,
        (_, Some(_)) => return usage("--samples needs --method mc"),
    };
    let cfg = SuiteConfig {
        trials: a.trials,
        seed: a.seed,
        theorems: theorems(&a.selector)?,
        n_values: if a.n.is_empty() {
            d.n_values.clone()
        } else {
            a.n.clone()
        },
        k_range: range("k", &a.k, d.k_range)?,
        phi_range: range("phi", &a.phi, d.phi_range)?,
        eta_range: range("eta", &a.eta, d.eta_range)?,
        zeta_range: range("zeta", &a.zeta, d.zeta_range)?,
        hyp_a_range: range("a", &a.a, d.hyp_a_range)?,
        hyp_gap_range: range("gap", &a.gap, d.hyp_gap_range)?,
        z_range: range("z", &a.z, d.z_range)?,
        slack: a.slack.unwrap_or(d.slack),
        tol: a.tol.unwrap_or(d.tol),
        moment_tol: a.moment_tol.unwrap_or(d.moment_tol),
        method,
        shift: match a.shift {
            Some(ShiftArg::Unit) => Shift::Unit,
            _ => Shift::K,
        },
        flipped: a.flip,
        execution: if a.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    cfg.validate()?;
    Ok(cfg)
}
