//! Row types and the CSV / newline-delimited JSON writer.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Format;
use crate::analytics::bounds::{p_star, TheoryBounds};
use crate::analytics::constants::{ConstantEntry, Tolerance};
use crate::analytics::probability::AnalyticReport;
use crate::analytics::special::{MellinReport, MellinVariant};
use crate::engine::{MetricsSummary, RunDigest, SimConfig};
use crate::protocols::{ElectionParams, ProtocolKind};
use crate::stats::BinomialEstimate;
use crate::{Error, Result};

pub(super) enum Sink<'a> {
    Csv(Box<csv::Writer<Box<dyn Write + 'a>>>),
    Json(Box<dyn Write + 'a>),
}

impl<'a> Sink<'a> {
    /// Writes to `path` when given, otherwise to `fallback`.
    pub(super) fn open<W: Write>(path: Option<&Path>, format: Format, fallback: &'a mut W) -> Result<Self> {
        let inner: Box<dyn Write + 'a> = match path {
            Some(p) => Box::new(BufWriter::new(create(p)?)),
            None => Box::new(fallback),
        };
        Ok(Self::wrap(inner, format))
    }

    pub(super) fn open_file(path: &Path, format: Format) -> Result<Sink<'static>> {
        Ok(Sink::wrap(Box::new(BufWriter::new(create(path)?)), format))
    }

    fn wrap(inner: Box<dyn Write + 'a>, format: Format) -> Self {
        match format {
            Format::Csv => Sink::Csv(Box::new(csv::Writer::from_writer(inner))),
            Format::Json => Sink::Json(inner),
        }
    }

    pub(super) fn row<T: Serialize>(&mut self, row: &T) -> Result<()> {
        match self {
            Sink::Csv(w) => w.serialize(row).map_err(io_err),
            Sink::Json(w) => {
                serde_json::to_writer(&mut *w, row).map_err(io_err)?;
                w.write_all(b"\n").map_err(io_err)
            }
        }
    }

    pub(super) fn finish(self) -> Result<()> {
        match self {
            Sink::Csv(mut w) => w.flush().map_err(io_err),
            Sink::Json(mut w) => w.flush().map_err(io_err),
        }
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("output: {e}"))
}

/// One simulated configuration with its summary and bounds, as written to
/// the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: u64,
    pub alpha: f64,
    pub k0: u64,
    pub algo: u8,
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub trials: u64,
    pub max_rounds: u64,
    pub p_star_used: f64,
    pub summary: MetricsSummary,
    /// Absent when alpha lies outside the convergent range.
    pub theory: Option<TheoryBounds>,
    /// Seconds since the epoch; 0 under `--deterministic-output`.
    pub timestamp: u64,
    pub tool_version: String,
}

impl ExperimentRecord {
    pub fn new(config: &SimConfig, summary: MetricsSummary, theory: Option<TheoryBounds>, timestamp: u64) -> Self {
        ExperimentRecord {
            n: config.params.n as u64,
            alpha: config.params.alpha,
            k0: config.params.k0,
            algo: config.protocol.number(),
            protocol: config.protocol,
            seed: config.seed,
            trials: config.trials,
            max_rounds: config.max_rounds,
            p_star_used: p_star(config.protocol),
            summary,
            theory,
            timestamp,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Fixed-order CSV summary row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: u64,
    pub alpha: f64,
    pub k0: u64,
    pub algo: u8,
    pub trials: u64,
    pub seed: u64,
    pub mean_rounds: Option<f64>,
    pub mean_slots: Option<f64>,
    pub mean_max_awake: Option<f64>,
    pub p_star_used: f64,
    pub j_star: Option<u64>,
    pub rounds_bound: Option<f64>,
    pub time_bound: Option<f64>,
    pub nonterminated: u64,
    pub timestamp: u64,
}

impl From<&ExperimentRecord> for SummaryRow {
    fn from(r: &ExperimentRecord) -> Self {
        SummaryRow {
            n: r.n,
            alpha: r.alpha,
            k0: r.k0,
            algo: r.algo,
            trials: r.trials,
            seed: r.seed,
            mean_rounds: r.summary.mean_rounds(),
            mean_slots: r.summary.mean_slots(),
            mean_max_awake: r.summary.mean_max_awake(),
            p_star_used: r.p_star_used,
            j_star: crate::analytics::bounds::j_star(r.n, r.alpha).ok(),
            rounds_bound: r.theory.as_ref().map(|t| t.expected_rounds_bound),
            time_bound: r.theory.as_ref().map(|t| t.expected_time_bound),
            nonterminated: r.summary.nonterminated,
            timestamp: r.timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub n: u64,
    pub alpha: f64,
    pub algo: u8,
    pub trial: u64,
    pub rounds_used: u64,
    pub total_slots: u64,
    pub max_awake: u64,
    pub mean_awake: f64,
    pub leader: Option<usize>,
    pub terminated: bool,
    pub unanimous: bool,
}

impl RunRow {
    pub fn new(config: &SimConfig, r: &RunDigest) -> Self {
        RunRow {
            n: config.params.n as u64,
            alpha: config.params.alpha,
            algo: config.protocol.number(),
            trial: r.trial,
            rounds_used: r.rounds_used,
            total_slots: r.total_slots,
            max_awake: r.max_awake,
            mean_awake: r.mean_awake,
            leader: r.leader,
            terminated: r.terminated,
            unanimous: r.unanimous,
        }
    }
}

#[derive(Debug, Serialize)]
pub(super) struct RoundProbRow {
    algo: u8,
    n: u64,
    alpha: f64,
    k0: u64,
    round: Option<u64>,
    inner_len: u64,
    /// Probability that exactly one inner slot succeeds.
    exact_p: f64,
    s: f64,
    t: f64,
    /// Probability that the round elects a leader.
    election_p: f64,
    sim_trials: Option<u64>,
    sim_freq: Option<f64>,
    /// `sim_freq -+ 3 sigma`.
    sim_lo: Option<f64>,
    sim_hi: Option<f64>,
}

impl RoundProbRow {
    pub(super) fn new(
        params: &ElectionParams,
        kind: ProtocolKind,
        exact: &AnalyticReport,
        sim: Option<BinomialEstimate>,
    ) -> Self {
        let (s, t) = match kind {
            ProtocolKind::Alg1Strong => (exact.s_j, exact.t_j),
            ProtocolKind::Alg2Weak => (exact.s_prime_j, exact.t_prime_j),
        };
        let ci = sim.map(|e| e.interval(3.0));
        RoundProbRow {
            algo: kind.number(),
            n: params.n as u64,
            alpha: params.alpha,
            k0: params.k0,
            round: exact.round,
            inner_len: exact.inner_len,
            exact_p: exact.success(),
            s,
            t,
            election_p: exact.election(),
            sim_trials: sim.map(|e| e.trials),
            sim_freq: sim.map(|e| e.frequency()),
            sim_lo: ci.map(|c| c.0),
            sim_hi: ci.map(|c| c.1),
        }
    }
}

#[derive(Debug, Serialize)]
pub(super) struct TheoryRow {
    pub algo: u8,
    pub n: u64,
    pub alpha: f64,
    pub p_star: f64,
    pub j_star: u64,
    pub alpha_sup: f64,
    pub c_value: Option<f64>,
    pub rounds_bound: Option<f64>,
    pub time_bound: Option<f64>,
    pub leading_time_term: Option<f64>,
    pub awake_bound: Option<f64>,
}

#[derive(Debug, Serialize)]
pub(super) struct OptimalRow {
    pub algo: u8,
    pub p_star: f64,
    pub alpha_tilde: f64,
    pub c_min: f64,
    pub alpha_sup: f64,
}

#[derive(Debug, Serialize)]
pub(super) struct AmplitudeRow {
    pub m: u64,
    pub u_amplitude: f64,
    pub v_amplitude: f64,
}

#[derive(Debug, Serialize)]
pub(super) struct MellinRow {
    variant: MellinVariant,
    m: u64,
    n: f64,
    r: u32,
    direct_sum: f64,
    asymptote: f64,
    amplitude_bound: f64,
    fluctuation_bound: f64,
    error_terms: f64,
    residual: f64,
    within_bound: bool,
}

impl From<MellinReport> for MellinRow {
    fn from(r: MellinReport) -> Self {
        MellinRow {
            within_bound: r.within_bound(),
            variant: r.variant,
            m: r.m,
            n: r.n,
            r: r.r,
            direct_sum: r.direct_sum,
            asymptote: r.asymptote,
            amplitude_bound: r.amplitude_bound,
            fluctuation_bound: r.fluctuation_bound,
            error_terms: r.error_terms,
            residual: r.residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub(super) struct ConstantRow {
    algo: u8,
    name: String,
    computed: f64,
    reported: f64,
    deviation: f64,
    relative_deviation: f64,
    tolerance: String,
    pass: bool,
    truncation_index: Option<u64>,
}

impl ConstantRow {
    pub(super) fn new(kind: ProtocolKind, e: &ConstantEntry) -> Self {
        ConstantRow {
            algo: kind.number(),
            name: e.name.clone(),
            computed: e.computed,
            reported: e.reported,
            deviation: e.deviation(),
            relative_deviation: e.relative_deviation(),
            tolerance: match e.tolerance {
                Tolerance::Absolute(t) => format!("abs {t}"),
                Tolerance::Relative(t) => format!("rel {t}"),
                Tolerance::None => "info".into(),
            },
            pass: e.pass(),
            truncation_index: e.truncation_index,
        }
    }
}
