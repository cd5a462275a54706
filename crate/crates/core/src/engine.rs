//! Seeded synchronous simulation of whole elections and of isolated rounds.
//!
//! Every random draw comes from [`crate::rng`], keyed by
//! `(seed, trial, station, round, slot)`, so a trial's result does not
//! depend on which thread runs it or in which order trials are scheduled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_status, observe, ChannelStatus, SlotAction};
use crate::protocols::{
    apply_observation, round_outcome, station_act, ElectionParams, Phase, ProtocolKind, RoundOutcome, RoundSchedule,
    StationState,
};
use crate::rng::TrialKey;
use crate::stats::{BinomialEstimate, EmpiricalCdf, SampleStats};
use crate::{Error, Result};

pub const DEFAULT_MAX_ROUNDS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ElectionParams,
    pub protocol: ProtocolKind,
    pub trials: u64,
    pub seed: u64,
    pub max_rounds: u64,
}

impl SimConfig {
    pub fn new(params: ElectionParams, protocol: ProtocolKind) -> Self {
        SimConfig {
            params,
            protocol,
            trials: 1000,
            seed: 0,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.max_rounds < 1 {
            return Err(Error::Config("max_rounds must be >= 1".into()));
        }
        Ok(())
    }
}

/// How trials are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool.
    #[default]
    Parallel,
    Threads(usize),
}

/// Measurements of one simulated election.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub trial: u64,
    pub rounds_used: u64,
    /// Inner plus deterministic slots over all executed rounds.
    pub total_slots: u64,
    pub awake_slots: Vec<u32>,
    pub max_awake: u64,
    pub leader: Option<usize>,
    pub terminated: bool,
    /// Every station knows a leader has been elected.
    pub unanimous: bool,
}

impl RunMetrics {
    pub fn mean_awake(&self) -> f64 {
        self.awake_slots.iter().map(|&a| a as f64).sum::<f64>() / self.awake_slots.len() as f64
    }

    /// Compact record used for aggregation.
    pub fn digest(&self) -> RunDigest {
        RunDigest {
            trial: self.trial,
            rounds_used: self.rounds_used,
            total_slots: self.total_slots,
            max_awake: self.max_awake,
            mean_awake: self.mean_awake(),
            leader: self.leader,
            terminated: self.terminated,
            unanimous: self.unanimous,
        }
    }
}

/// [`RunMetrics`] without the per-station vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDigest {
    pub trial: u64,
    pub rounds_used: u64,
    pub total_slots: u64,
    pub max_awake: u64,
    pub mean_awake: f64,
    pub leader: Option<usize>,
    pub terminated: bool,
    pub unanimous: bool,
}

/// Scratch buffers reused across rounds of one trial.
struct Arena {
    states: Vec<StationState>,
    actions: Vec<SlotAction>,
    awake: Vec<u32>,
}

impl Arena {
    fn new(n: usize) -> Self {
        Arena {
            states: vec![StationState::default(); n],
            actions: vec![SlotAction::Sleep; n],
            awake: vec![0; n],
        }
    }

    /// Runs one slot: every station acts, the channel resolves, every awake
    /// station updates.
    #[inline]
    fn slot(&mut self, kind: ProtocolKind, phase: Phase, key: crate::rng::SlotKey) {
        let model = kind.model();
        let mut first_tx = None;
        let mut collided = false;
        for (i, (state, action)) in self.states.iter().zip(self.actions.iter_mut()).enumerate() {
            let a = station_act(kind, state, phase, key.station(i));
            if let Some(p) = a.transmitted() {
                if first_tx.is_some() {
                    collided = true;
                } else {
                    first_tx = Some(p);
                }
            }
            *action = a;
        }
        let status = match first_tx {
            Some(p) if !collided => ChannelStatus::Single(p),
            _ => ChannelStatus::Null,
        };
        debug_assert_eq!(status, channel_status(&self.actions));
        for ((state, &action), awake) in self.states.iter_mut().zip(&self.actions).zip(&mut self.awake) {
            if action.is_awake() {
                *awake += 1;
                apply_observation(kind, state, phase, action, observe(model, action, status));
            }
        }
    }

    /// Plays one full round with fresh per-round memory.
    fn round(&mut self, kind: ProtocolKind, schedule: &RoundSchedule, trial: TrialKey) -> Result<RoundOutcome> {
        self.states.iter_mut().for_each(StationState::start_round);
        for (slot, k) in schedule.inner_slots().enumerate() {
            self.slot(kind, Phase::Inner(k), trial.slot(schedule.round, slot as u64));
        }
        for d in 1..=schedule.deterministic_slots {
            let slot = schedule.inner_len + d - 1;
            self.slot(kind, Phase::Det(d as u8), trial.slot(schedule.round, slot));
        }
        round_outcome(&self.states)
    }
}

/// Simulates rounds `1, 2, ...` until a leader is elected or `max_rounds`
/// is reached.
pub fn run_once(config: &SimConfig, trial: u64) -> Result<RunMetrics> {
    config.validate()?;
    let kind = config.protocol;
    let key = TrialKey::new(config.seed, trial);
    let mut arena = Arena::new(config.params.n);
    let mut total_slots = 0;
    let mut leader = None;
    let mut rounds_used = 0;
    for round in 1..=config.max_rounds {
        let schedule = RoundSchedule::new(&config.params, kind, round)?;
        rounds_used = round;
        total_slots += schedule.total_slots();
        if let RoundOutcome::Elected(i) = arena.round(kind, &schedule, key)? {
            leader = Some(i);
            break;
        }
    }
    let max_awake = arena.awake.iter().copied().max().unwrap_or(0) as u64;
    let unanimous = leader.is_some() && arena.states.iter().all(|s| s.leader_known);
    Ok(RunMetrics {
        trial,
        rounds_used,
        total_slots,
        awake_slots: arena.awake,
        max_awake,
        leader,
        terminated: leader.is_some(),
        unanimous,
    })
}

fn map_trials<T, F>(trials: u64, execution: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    match execution {
        Execution::Sequential => (0..trials).map(f).collect(),
        Execution::Parallel => (0..trials).into_par_iter().map(f).collect(),
        Execution::Threads(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| (0..trials).into_par_iter().map(f).collect())
        }
    }
}

/// Aggregated metrics over a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub trials: u64,
    pub terminated: u64,
    pub nonterminated: u64,
    /// Terminated runs where some station missed the announcement.
    pub non_unanimous: u64,
    /// Statistics over terminated runs only.
    pub rounds: Option<SampleStats>,
    pub total_slots: Option<SampleStats>,
    pub max_awake: Option<SampleStats>,
    pub mean_awake: Option<SampleStats>,
    /// Mean awake slots per station per round.
    pub awake_per_round: Option<SampleStats>,
    /// CDF of rounds used; non-terminated runs count as censored mass.
    pub rounds_cdf: EmpiricalCdf,
}

impl MetricsSummary {
    /// Summarises runs in trial-index order, whatever order they come in.
    pub fn from_runs(runs: &[RunDigest]) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        let mut sorted: Vec<&RunDigest> = runs.iter().collect();
        sorted.sort_by_key(|r| r.trial);
        let done: Vec<&RunDigest> = sorted.iter().copied().filter(|r| r.terminated).collect();
        let stat =
            |f: &dyn Fn(&RunDigest) -> f64| SampleStats::from_values(&done.iter().map(|r| f(r)).collect::<Vec<_>>());
        Ok(MetricsSummary {
            trials: runs.len() as u64,
            terminated: done.len() as u64,
            nonterminated: (runs.len() - done.len()) as u64,
            non_unanimous: done.iter().filter(|r| !r.unanimous).count() as u64,
            rounds: stat(&|r| r.rounds_used as f64),
            total_slots: stat(&|r| r.total_slots as f64),
            max_awake: stat(&|r| r.max_awake as f64),
            mean_awake: stat(&|r| r.mean_awake),
            awake_per_round: stat(&|r| r.mean_awake / r.rounds_used as f64),
            rounds_cdf: EmpiricalCdf::new(sorted.iter().map(|r| r.terminated.then_some(r.rounds_used))),
        })
    }

    pub fn mean_rounds(&self) -> Option<f64> {
        self.rounds.as_ref().map(|s| s.mean)
    }

    pub fn mean_slots(&self) -> Option<f64> {
        self.total_slots.as_ref().map(|s| s.mean)
    }

    pub fn mean_max_awake(&self) -> Option<f64> {
        self.max_awake.as_ref().map(|s| s.mean)
    }
}

/// Runs trials `0 .. trials` and returns their digests in trial order.
pub fn run_digests(config: &SimConfig, execution: Execution) -> Result<Vec<RunDigest>> {
    config.validate()?;
    map_trials(config.trials, execution, |t| run_once(config, t).map(|m| m.digest()))
}

pub fn run_trials(config: &SimConfig) -> Result<MetricsSummary> {
    run_trials_with(config, Execution::Parallel)
}

pub fn run_trials_with(config: &SimConfig, execution: Execution) -> Result<MetricsSummary> {
    MetricsSummary::from_runs(&run_digests(config, execution)?)
}

/// Monte-Carlo estimate of the success probability of round `j` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundEstimate {
    pub round: u64,
    pub inner_len: u64,
    pub estimate: BinomialEstimate,
}

/// Simulates round `j` in isolation (fresh stations) `trials` times.
pub fn simulate_round(
    params: &ElectionParams,
    protocol: ProtocolKind,
    j: u64,
    trials: u64,
    seed: u64,
) -> Result<RoundEstimate> {
    simulate_round_with(params, protocol, j, trials, seed, Execution::Parallel)
}

pub fn simulate_round_with(
    params: &ElectionParams,
    protocol: ProtocolKind,
    j: u64,
    trials: u64,
    seed: u64,
    execution: Execution,
) -> Result<RoundEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if j < 1 {
        return Err(Error::Domain("round index starts at 1".into()));
    }
    let schedule = RoundSchedule::new(params, protocol, j)?;
    let wins = map_trials(trials, execution, |t| {
        let mut arena = Arena::new(params.n);
        let outcome = arena.round(protocol, &schedule, TrialKey::new(seed, t))?;
        Ok(matches!(outcome, RoundOutcome::Elected(_)) as u64)
    })?;
    Ok(RoundEstimate {
        round: j,
        inner_len: schedule.inner_len,
        estimate: BinomialEstimate::new(wins.iter().sum(), trials)?,
    })
}
