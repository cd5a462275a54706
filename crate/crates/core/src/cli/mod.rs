//! `radio-election` command-line driver.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when
//! `verify` finds a failing check.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::bounds::{alpha_sup, cost_c, j_star, optimal_alpha, p_star, theory_bounds, tuned_alpha};
use crate::analytics::constants::lemma_constants;
use crate::analytics::probability::exact_round_success;
use crate::analytics::special::{fourier_amplitude, mellin_check, MellinVariant, DEFAULT_TERMS};
use crate::engine::{run_digests, simulate_round_with, Execution, MetricsSummary, SimConfig, DEFAULT_MAX_ROUNDS};
use crate::protocols::{ElectionParams, ProtocolKind};
use crate::verify::{run_check, Check, VerifyOptions};
use crate::{Error, Result};

use output::{AmplitudeRow, ConstantRow, MellinRow, OptimalRow, RoundProbRow, Sink, TheoryRow};
pub use output::{ExperimentRecord, RunRow, SummaryRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "radio-election",
    version,
    about = "Leader election on single-hop no-CD radio networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate full elections; one summary row per (n, alpha) pair.
    Simulate(SimArgs),
    /// Simulate a grid of algorithms x n x alpha.
    Sweep(SimArgs),
    /// Exact and simulated success probability of isolated rounds.
    RoundProb(RoundProbArgs),
    /// j*, C(p*, alpha) and the expected time/rounds/awake bounds.
    Theory(TheoryArgs),
    /// Harmonic sums against their asymptotic expansions.
    Mellin(MellinArgs),
    /// Recompute the constants behind p1* and p2*.
    Constants(ConstantsArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Algorithm(s): 1 = strong model, 2 = weak model.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub algo: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "1024")]
    pub n: Vec<usize>,
    /// Growth factor(s); defaults to the tuned value of each algorithm.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub k0: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: u64,
    /// Zero the timestamp so identical runs give identical bytes.
    #[arg(long)]
    pub deterministic_output: bool,
    /// Worker threads; 1 runs sequentially. Default: all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also write one CSV row per run to this file.
    #[arg(long)]
    pub runs_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RoundProbArgs {
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub algo: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Round index (or list).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub round: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    pub k0: u64,
    /// Simulated trials per round; 0 skips the simulation.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub algo: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "1024")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Override p* (defaults to the algorithm's constant).
    #[arg(long)]
    pub p_star: Option<f64>,
    /// Report the alpha minimising C(p*, alpha) instead.
    #[arg(long)]
    pub optimal: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    U,
    V,
    Both,
}

#[derive(Debug, Args)]
pub struct MellinArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub variant: VariantArg,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub m: Vec<u64>,
    /// Values of n; default is 32 points log-uniform in [2^10, 2^30].
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub r: u32,
    /// Print the fluctuation amplitudes for m = 1..=60 instead.
    #[arg(long)]
    pub amplitudes: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Restrict to one algorithm; default both.
    #[arg(long)]
    pub algo: Option<u8>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated check names or numbers (1-10).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch<W: Write, E: Write>(command: Command, out: &mut W, err: &mut E) -> Result<i32> {
    match command {
        Command::Simulate(a) | Command::Sweep(a) => simulate(a, out, err),
        Command::RoundProb(a) => round_prob(a, out),
        Command::Theory(a) => theory(a, out),
        Command::Mellin(a) => mellin(a, out),
        Command::Constants(a) => constants(a, out),
        Command::Verify(a) => verify(a, out),
    }
}

fn kinds(algo: &[u8]) -> Result<Vec<ProtocolKind>> {
    algo.iter().map(|&a| ProtocolKind::from_number(a)).collect()
}

fn alphas(given: &[f64], kind: ProtocolKind) -> Vec<f64> {
    if given.is_empty() {
        vec![tuned_alpha(kind)]
    } else {
        given.to_vec()
    }
}

fn execution(threads: Option<usize>) -> Result<Execution> {
    match threads {
        None => Ok(Execution::Parallel),
        Some(0) => Err(Error::Config("--threads must be >= 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(t) => Ok(Execution::Threads(t)),
    }
}

fn timestamp(deterministic: bool) -> u64 {
    if deterministic {
        return 0;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn simulate<W: Write, E: Write>(a: SimArgs, out: &mut W, err: &mut E) -> Result<i32> {
    let kinds = kinds(&a.algo)?;
    let exec = execution(a.threads)?;
    // Validate the whole grid before spending time on any of it.
    let mut grid = Vec::new();
    for &kind in &kinds {
        for &n in &a.n {
            for &alpha in &alphas(&a.alpha, kind) {
                let params = ElectionParams::new(n, alpha, a.k0)?;
                let config = SimConfig::new(params, kind)
                    .trials(a.trials)
                    .seed(a.seed)
                    .max_rounds(a.max_rounds);
                config.validate()?;
                grid.push(config);
            }
        }
    }
    let ts = timestamp(a.deterministic_output);
    let mut sink = Sink::open(a.output.out.as_deref(), a.output.format, out)?;
    let mut runs_sink = match &a.runs_out {
        Some(path) => Some(Sink::open_file(path, Format::Csv)?),
        None => None,
    };
    for config in grid {
        let runs = run_digests(&config, exec)?;
        let summary = MetricsSummary::from_runs(&runs)?;
        let ps = p_star(config.protocol);
        let bounds = theory_bounds(&config.params, config.protocol, ps).ok();
        if bounds.is_none() {
            let _ = writeln!(
                err,
                "note: alpha = {} is outside (1, {:.6}); bounds left empty",
                config.params.alpha,
                alpha_sup(ps)
            );
        }
        let record = ExperimentRecord::new(&config, summary, bounds, ts);
        match a.output.format {
            Format::Csv => sink.row(&SummaryRow::from(&record))?,
            Format::Json => sink.row(&record)?,
        }
        if let Some(rs) = runs_sink.as_mut() {
            for r in &runs {
                rs.row(&RunRow::new(&config, r))?;
            }
        }
    }
    sink.finish()?;
    if let Some(rs) = runs_sink {
        rs.finish()?;
    }
    Ok(EXIT_OK)
}

fn round_prob<W: Write>(a: RoundProbArgs, out: &mut W) -> Result<i32> {
    let exec = execution(a.threads)?;
    let mut sink = Sink::open(a.output.out.as_deref(), a.output.format, out)?;
    for kind in kinds(&a.algo)? {
        for &n in &a.n {
            for &alpha in &alphas(&a.alpha, kind) {
                let params = ElectionParams::new(n, alpha, a.k0)?;
                for &j in &a.round {
                    let exact = exact_round_success(&params, kind, j)?;
                    let sim = if a.trials > 0 {
                        Some(simulate_round_with(&params, kind, j, a.trials, a.seed, exec)?.estimate)
                    } else {
                        None
                    };
                    sink.row(&RoundProbRow::new(&params, kind, &exact, sim))?;
                }
            }
        }
    }
    sink.finish()?;
    Ok(EXIT_OK)
}

fn theory<W: Write>(a: TheoryArgs, out: &mut W) -> Result<i32> {
    let mut sink = Sink::open(a.output.out.as_deref(), a.output.format, out)?;
    for kind in kinds(&a.algo)? {
        let ps = a.p_star.unwrap_or_else(|| p_star(kind));
        if a.optimal {
            let o = optimal_alpha(ps, a.tol)?;
            sink.row(&OptimalRow {
                algo: kind.number(),
                p_star: ps,
                alpha_tilde: o.alpha,
                c_min: o.cost,
                alpha_sup: alpha_sup(ps),
            })?;
            continue;
        }
        for &n in &a.n {
            for &alpha in &alphas(&a.alpha, kind) {
                let params = ElectionParams::new(n, alpha, 1)?;
                let js = j_star(n as u64, alpha)?;
                // Outside (1, alpha_sup) only j* is meaningful.
                let bounds = theory_bounds(&params, kind, ps).ok();
                sink.row(&TheoryRow {
                    algo: kind.number(),
                    n: n as u64,
                    alpha,
                    p_star: ps,
                    j_star: js,
                    alpha_sup: alpha_sup(ps),
                    c_value: cost_c(ps, alpha).ok(),
                    rounds_bound: bounds.as_ref().map(|b| b.expected_rounds_bound),
                    time_bound: bounds.as_ref().map(|b| b.expected_time_bound),
                    leading_time_term: bounds.as_ref().map(|b| b.leading_time_term),
                    awake_bound: bounds.as_ref().map(|b| b.awake_bound),
                })?;
            }
        }
    }
    sink.finish()?;
    Ok(EXIT_OK)
}

fn mellin<W: Write>(a: MellinArgs, out: &mut W) -> Result<i32> {
    let variants = match a.variant {
        VariantArg::U => vec![MellinVariant::U],
        VariantArg::V => vec![MellinVariant::V],
        VariantArg::Both => vec![MellinVariant::U, MellinVariant::V],
    };
    if a.m.contains(&0) || a.r == 0 {
        return Err(Error::Config("m and r must be >= 1".into()));
    }
    let mut sink = Sink::open(a.output.out.as_deref(), a.output.format, out)?;
    if a.amplitudes {
        for m in 1..=60 {
            sink.row(&AmplitudeRow {
                m,
                u_amplitude: fourier_amplitude(MellinVariant::U, m, DEFAULT_TERMS),
                v_amplitude: fourier_amplitude(MellinVariant::V, m, DEFAULT_TERMS),
            })?;
        }
        sink.finish()?;
        return Ok(EXIT_OK);
    }
    let ns: Vec<f64> = if a.n.is_empty() {
        (0..32).map(|i| 2f64.powf(10.0 + 20.0 * i as f64 / 31.0)).collect()
    } else {
        a.n.clone()
    };
    if let Some(bad) = ns.iter().find(|&&n| !(n > 0.0 && n.is_finite())) {
        return Err(Error::Config(format!("n must be positive, got {bad}")));
    }
    for &variant in &variants {
        for &m in &a.m {
            for &n in &ns {
                sink.row(&MellinRow::from(mellin_check(variant, m, n, a.r)))?;
            }
        }
    }
    sink.finish()?;
    Ok(EXIT_OK)
}

fn constants<W: Write>(a: ConstantsArgs, out: &mut W) -> Result<i32> {
    let kinds = match a.algo {
        Some(n) => vec![ProtocolKind::from_number(n)?],
        None => vec![ProtocolKind::Alg1Strong, ProtocolKind::Alg2Weak],
    };
    let mut sink = Sink::open(a.output.out.as_deref(), a.output.format, out)?;
    for kind in kinds {
        for e in lemma_constants(kind).entries {
            sink.row(&ConstantRow::new(kind, &e))?;
        }
    }
    sink.finish()?;
    Ok(EXIT_OK)
}

fn verify<W: Write>(a: VerifyArgs, out: &mut W) -> Result<i32> {
    let checks: Vec<Check> = if a.only.is_empty() {
        Check::ALL.to_vec()
    } else {
        a.only.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let opts = VerifyOptions {
        execution: execution(a.threads)?,
    };
    let mut failed = Vec::new();
    for check in checks {
        let result = run_check(check, &opts);
        write!(out, "{result}").map_err(io_err)?;
        out.flush().map_err(io_err)?;
        if !result.pass {
            failed.push(check.to_string());
        }
    }
    if failed.is_empty() {
        writeln!(out, "all checks passed").map_err(io_err)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "failed: {}", failed.join(", ")).map_err(io_err)?;
        Ok(EXIT_VERIFY)
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("output: {e}"))
}
