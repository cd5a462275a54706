//! Per-station state machines of the two election protocols.
//!
//! Both protocols run rounds `j = 1, 2, ...`. Round `j` has `ceil(alpha^j)`
//! probabilistic inner slots, indexed `k = k0 .. k0 + ceil(alpha^j) - 1`,
//! in which a station wakes with probability `2^-k`, followed by a short
//! deterministic phase in which every station is awake.
//!
//! * [`ProtocolKind::Alg1Strong`]: an awake station transmits and listens at
//!   once. A station that was the unique transmitter of some inner slot is a
//!   *candidate*; candidates transmit in the single deterministic slot and a
//!   unique candidate is elected.
//! * [`ProtocolKind::Alg2Weak`]: an awake station either transmits `<k>`
//!   (initiator) or listens. A listener that hears `<k>` records it
//!   (witness). In deterministic slot 1 witnesses forward their record; if
//!   that slot is `Single`, the initiator of `<k>` hears it and announces
//!   itself in deterministic slot 2.
//!
//! Station indices are never consulted here: stations are anonymous.

use serde::{Deserialize, Serialize};

use crate::channel::{ModelKind, Observation, Payload, SlotAction};
use crate::rng::SlotDraws;
use crate::{Error, Result};

/// Token sent in the last deterministic slot. Never a valid slot index.
pub const CONFIRMATION: Payload = 0;

/// Guard subtracted before taking a ceiling of a real power.
pub const CEIL_GUARD: f64 = 1.0 / (1u64 << 40) as f64;

/// Largest inner-loop length the engine will schedule.
pub const MAX_INNER_LEN: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    Alg1Strong,
    Alg2Weak,
}

impl ProtocolKind {
    pub fn model(self) -> ModelKind {
        match self {
            ProtocolKind::Alg1Strong => ModelKind::Strong,
            ProtocolKind::Alg2Weak => ModelKind::Weak,
        }
    }

    /// Slots per round in which every station is awake.
    pub fn deterministic_slots(self) -> u64 {
        match self {
            ProtocolKind::Alg1Strong => 1,
            ProtocolKind::Alg2Weak => 2,
        }
    }

    /// `1` or `2`, as used on the command line.
    pub fn number(self) -> u8 {
        match self {
            ProtocolKind::Alg1Strong => 1,
            ProtocolKind::Alg2Weak => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(ProtocolKind::Alg1Strong),
            2 => Ok(ProtocolKind::Alg2Weak),
            _ => Err(Error::Config(format!("unknown algorithm {n}, expected 1 or 2"))),
        }
    }
}

/// Parameters shared by both protocols.
///
/// `k0 > 1` starts every inner loop at `k = k0`, which trims the expected
/// awake time per round to `1 + eps` deterministic-plus-inner slots with
/// `eps = 2^-(k0-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectionParams {
    pub n: usize,
    pub alpha: f64,
    pub k0: u64,
}

impl ElectionParams {
    pub fn new(n: usize, alpha: f64, k0: u64) -> Result<Self> {
        let params = ElectionParams { n, alpha, k0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!("need n >= 2 stations, got {}", self.n)));
        }
        if !self.alpha.is_finite() || self.alpha <= 1.0 {
            return Err(Error::Domain(format!("alpha must be > 1, got {}", self.alpha)));
        }
        if self.k0 < 1 {
            return Err(Error::Domain("k0 must be >= 1".into()));
        }
        Ok(())
    }

    /// `eps = 2^-(k0-1)` in the awake-time refinement.
    pub fn epsilon(&self) -> f64 {
        0.5f64.powi((self.k0 - 1).min(1100) as i32)
    }
}

/// `ceil(alpha^j)`, taken after subtracting [`CEIL_GUARD`] so that powers
/// landing a rounding error above an integer do not round up.
pub fn inner_len(j: u64, alpha: f64) -> Result<u64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::Domain(format!("alpha must be > 1, got {alpha}")));
    }
    if j < 1 {
        return Err(Error::Domain("round index starts at 1".into()));
    }
    let power = alpha.powf(j as f64);
    let len = (power - CEIL_GUARD).ceil().max(1.0);
    if !len.is_finite() || len > MAX_INNER_LEN as f64 {
        return Err(Error::Overflow {
            len,
            cap: MAX_INNER_LEN,
        });
    }
    Ok(len as u64)
}

/// Slot layout of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundSchedule {
    pub round: u64,
    pub inner_len: u64,
    pub deterministic_slots: u64,
    pub k0: u64,
}

impl RoundSchedule {
    pub fn new(params: &ElectionParams, kind: ProtocolKind, round: u64) -> Result<Self> {
        Ok(RoundSchedule {
            round,
            inner_len: inner_len(round, params.alpha)?,
            deterministic_slots: kind.deterministic_slots(),
            k0: params.k0,
        })
    }

    /// Values of `k` visited by the inner loop.
    pub fn inner_slots(&self) -> std::ops::Range<u64> {
        self.k0..self.k0 + self.inner_len
    }

    pub fn total_slots(&self) -> u64 {
        self.inner_len + self.deterministic_slots
    }
}

/// Position within a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Inner slot with wake probability `2^-k`.
    Inner(u64),
    /// Deterministic slot, numbered from 1.
    Det(u8),
}

/// Memory of one station.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StationState {
    /// Alg1: unique transmitter of some inner slot this round.
    pub candidate: bool,
    /// Alg2: inner slots this round in which the station transmitted.
    pub transmitted_slots: Vec<u64>,
    /// Alg2: most recent `<k>` heard on a `Single` inner slot.
    pub witness_record: Option<u64>,
    /// Alg2: heard its own `<k>` forwarded in deterministic slot 1.
    pub pending_leader: bool,
    pub leader_known: bool,
    pub is_leader: bool,
}

impl StationState {
    /// Clears per-round memory. Leadership flags persist.
    pub fn start_round(&mut self) {
        self.candidate = false;
        self.transmitted_slots.clear();
        self.witness_record = None;
        self.pending_leader = false;
    }
}

#[inline]
fn wake_probability(k: u64) -> f64 {
    if k > 1100 {
        0.0
    } else {
        0.5f64.powi(k as i32)
    }
}

/// The action a station takes in the given phase.
#[inline]
pub fn station_act(kind: ProtocolKind, state: &StationState, phase: Phase, draws: SlotDraws) -> SlotAction {
    match (kind, phase) {
        (ProtocolKind::Alg1Strong, Phase::Inner(k)) => {
            if draws.wake < wake_probability(k) {
                SlotAction::TransmitListen(k)
            } else {
                SlotAction::Sleep
            }
        }
        (ProtocolKind::Alg1Strong, Phase::Det(_)) => {
            if state.candidate {
                SlotAction::TransmitListen(CONFIRMATION)
            } else {
                SlotAction::Listen
            }
        }
        (ProtocolKind::Alg2Weak, Phase::Inner(k)) => {
            if draws.wake >= wake_probability(k) {
                SlotAction::Sleep
            } else if draws.role < 0.5 {
                SlotAction::Transmit(k)
            } else {
                SlotAction::Listen
            }
        }
        (ProtocolKind::Alg2Weak, Phase::Det(1)) => match state.witness_record {
            Some(k) => SlotAction::Transmit(k),
            None => SlotAction::Listen,
        },
        (ProtocolKind::Alg2Weak, Phase::Det(_)) => {
            if state.pending_leader {
                SlotAction::Transmit(CONFIRMATION)
            } else {
                SlotAction::Listen
            }
        }
    }
}

/// Applies the result of a slot to a station's memory in place.
#[inline]
pub fn apply_observation(
    kind: ProtocolKind,
    state: &mut StationState,
    phase: Phase,
    own: SlotAction,
    observed: Observation,
) {
    match (kind, phase) {
        (ProtocolKind::Alg1Strong, Phase::Inner(_)) => {
            if let (SlotAction::TransmitListen(p), Observation::Heard(q)) = (own, observed) {
                if p == q {
                    state.candidate = true;
                }
            }
        }
        (ProtocolKind::Alg1Strong, Phase::Det(_)) => {
            if let Observation::Heard(_) = observed {
                state.leader_known = true;
                // A candidate hearing its own message was the only candidate.
                if matches!(own, SlotAction::TransmitListen(_)) && state.candidate {
                    state.is_leader = true;
                }
            }
        }
        (ProtocolKind::Alg2Weak, Phase::Inner(k)) => match (own, observed) {
            (SlotAction::Transmit(_), _) => state.transmitted_slots.push(k),
            (SlotAction::Listen, Observation::Heard(m)) => state.witness_record = Some(m),
            _ => {}
        },
        (ProtocolKind::Alg2Weak, Phase::Det(1)) => {
            if let (SlotAction::Listen, Observation::Heard(m)) = (own, observed) {
                if state.transmitted_slots.contains(&m) {
                    state.pending_leader = true;
                }
            }
        }
        (ProtocolKind::Alg2Weak, Phase::Det(_)) => match (own, observed) {
            (SlotAction::Listen, Observation::Heard(CONFIRMATION)) => state.leader_known = true,
            // The pending leader gets no feedback on its confirmation, but it
            // is the only pending station whenever slot 1 was Single, so the
            // confirmation is necessarily Single too.
            (SlotAction::Transmit(CONFIRMATION), _) if state.pending_leader => {
                state.is_leader = true;
                state.leader_known = true;
            }
            _ => {}
        },
    }
}

/// Pure form of [`apply_observation`].
pub fn station_update(
    kind: ProtocolKind,
    state: &StationState,
    phase: Phase,
    own: SlotAction,
    observed: Observation,
) -> StationState {
    let mut next = state.clone();
    apply_observation(kind, &mut next, phase, own, observed);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundOutcome {
    Elected(usize),
    Continue,
}

/// Decides a round once its deterministic phase has run.
pub fn round_outcome(states: &[StationState]) -> Result<RoundOutcome> {
    let mut leaders = states.iter().enumerate().filter(|(_, s)| s.is_leader).map(|(i, _)| i);
    match (leaders.next(), leaders.next()) {
        (None, _) => Ok(RoundOutcome::Continue),
        (Some(i), None) => Ok(RoundOutcome::Elected(i)),
        (Some(first), Some(second)) => Err(Error::Integrity { first, second }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::resolve_slot;

    fn draw(wake: f64, role: f64) -> SlotDraws {
        SlotDraws { wake, role }
    }

    #[test]
    fn inner_len_examples() {
        assert_eq!(inner_len(1, 1.5).unwrap(), 2);
        assert_eq!(inner_len(3, 2.0).unwrap(), 8);
        // 1.0767^10 = 2.09385754..., computed at 40 digits.
        assert_eq!(inner_len(10, 1.0767).unwrap(), 3);
        assert!(inner_len(1, 1.0).is_err());
        assert!(inner_len(1, 0.5).is_err());
    }

    #[test]
    fn inner_len_guard_absorbs_rounding_noise() {
        // 1.1^2 is 1.2100000000000002 in binary64; the guard only matters
        // when a power sits just above an integer.
        assert_eq!(inner_len(2, 1.1).unwrap(), 2);
        assert_eq!(inner_len(2, 10.0).unwrap(), 100);
        assert_eq!(inner_len(1, 1.0 + 1e-13).unwrap(), 1);
        assert!(inner_len(2000, 2.0).is_err());
    }

    #[test]
    fn inner_len_nondecreasing() {
        for &alpha in &[1.0404, 1.0767, 1.1, 1.5, 2.0] {
            let mut prev = 1;
            for j in 1..200 {
                let Ok(l) = inner_len(j, alpha) else { break };
                assert!(l >= prev && l >= 1);
                prev = l;
            }
        }
    }

    #[test]
    fn alg1_candidate_transmits_in_det_slot() {
        let st = StationState {
            candidate: true,
            ..Default::default()
        };
        let a = station_act(ProtocolKind::Alg1Strong, &st, Phase::Det(1), draw(0.0, 0.0));
        assert_eq!(a, SlotAction::TransmitListen(CONFIRMATION));
        let idle = StationState::default();
        let a = station_act(ProtocolKind::Alg1Strong, &idle, Phase::Det(1), draw(0.0, 0.0));
        assert_eq!(a, SlotAction::Listen);
    }

    #[test]
    fn alg1_sleeps_when_draw_above_threshold() {
        let st = StationState::default();
        for k in 1..10 {
            let p = 0.5f64.powi(k as i32);
            assert_eq!(
                station_act(ProtocolKind::Alg1Strong, &st, Phase::Inner(k), draw(p, 0.0)),
                SlotAction::Sleep
            );
            assert_eq!(
                station_act(ProtocolKind::Alg1Strong, &st, Phase::Inner(k), draw(p * 0.999, 0.0)),
                SlotAction::TransmitListen(k)
            );
        }
    }

    #[test]
    fn alg2_roles() {
        let st = StationState::default();
        let k = 3;
        let a = station_act(ProtocolKind::Alg2Weak, &st, Phase::Inner(k), draw(0.1, 0.2));
        assert_eq!(a, SlotAction::Transmit(3));
        let a = station_act(ProtocolKind::Alg2Weak, &st, Phase::Inner(k), draw(0.1, 0.7));
        assert_eq!(a, SlotAction::Listen);
        let a = station_act(ProtocolKind::Alg2Weak, &st, Phase::Inner(k), draw(0.125, 0.2));
        assert_eq!(a, SlotAction::Sleep);
    }

    #[test]
    fn alg2_witness_forwards_record() {
        let st = StationState {
            witness_record: Some(3),
            ..Default::default()
        };
        let a = station_act(ProtocolKind::Alg2Weak, &st, Phase::Det(1), draw(0.9, 0.9));
        assert_eq!(a, SlotAction::Transmit(3));
        let a = station_act(ProtocolKind::Alg2Weak, &st, Phase::Det(2), draw(0.9, 0.9));
        assert_eq!(a, SlotAction::Listen);
    }

    #[test]
    fn alg1_unique_transmitter_becomes_candidate() {
        let st = StationState::default();
        let next = station_update(
            ProtocolKind::Alg1Strong,
            &st,
            Phase::Inner(2),
            SlotAction::TransmitListen(2),
            Observation::Heard(2),
        );
        assert!(next.candidate);
    }

    #[test]
    fn sleeper_learns_nothing() {
        let st = StationState {
            witness_record: Some(1),
            transmitted_slots: vec![1],
            ..Default::default()
        };
        for kind in [ProtocolKind::Alg1Strong, ProtocolKind::Alg2Weak] {
            let next = station_update(kind, &st, Phase::Inner(2), SlotAction::Sleep, Observation::Nothing);
            assert_eq!(next, st);
        }
    }

    #[test]
    fn alg2_listener_records_most_recent_witness_value() {
        let st = StationState::default();
        let st = station_update(
            ProtocolKind::Alg2Weak,
            &st,
            Phase::Inner(4),
            SlotAction::Listen,
            Observation::Heard(4),
        );
        assert_eq!(st.witness_record, Some(4));
        let st = station_update(
            ProtocolKind::Alg2Weak,
            &st,
            Phase::Inner(6),
            SlotAction::Listen,
            Observation::Noise,
        );
        assert_eq!(st.witness_record, Some(4));
        let st = station_update(
            ProtocolKind::Alg2Weak,
            &st,
            Phase::Inner(7),
            SlotAction::Listen,
            Observation::Heard(7),
        );
        assert_eq!(st.witness_record, Some(7));
    }

    #[test]
    fn alg2_transmitter_logs_slot() {
        let st = StationState::default();
        let st = station_update(
            ProtocolKind::Alg2Weak,
            &st,
            Phase::Inner(5),
            SlotAction::Transmit(5),
            Observation::Nothing,
        );
        assert_eq!(st.transmitted_slots, vec![5]);
    }

    #[test]
    fn round_outcome_cases() {
        let mut states = vec![StationState::default(); 3];
        assert_eq!(round_outcome(&states).unwrap(), RoundOutcome::Continue);
        states[1].is_leader = true;
        states[1].leader_known = true;
        assert_eq!(round_outcome(&states).unwrap(), RoundOutcome::Elected(1));
        states[2].is_leader = true;
        assert_eq!(
            round_outcome(&states).unwrap_err(),
            Error::Integrity { first: 1, second: 2 }
        );
    }

    /// Drives the deterministic phase by hand through the channel.
    fn run_det_phase(kind: ProtocolKind, states: &mut [StationState]) -> Vec<crate::channel::ChannelStatus> {
        let mut statuses = Vec::new();
        for d in 1..=kind.deterministic_slots() as u8 {
            let actions: Vec<_> = states
                .iter()
                .map(|s| station_act(kind, s, Phase::Det(d), draw(0.99, 0.99)))
                .collect();
            let out = resolve_slot(kind.model(), &actions).unwrap();
            for ((s, a), o) in states.iter_mut().zip(&actions).zip(&out.observations) {
                apply_observation(kind, s, Phase::Det(d), *a, *o);
            }
            statuses.push(out.status);
        }
        statuses
    }

    #[test]
    fn alg1_single_candidate_is_elected_unanimously() {
        let mut states = vec![StationState::default(); 4];
        states[2].candidate = true;
        run_det_phase(ProtocolKind::Alg1Strong, &mut states);
        assert_eq!(round_outcome(&states).unwrap(), RoundOutcome::Elected(2));
        assert!(states.iter().all(|s| s.leader_known));
    }

    #[test]
    fn alg1_no_candidate_continues() {
        let mut states = vec![StationState::default(); 4];
        run_det_phase(ProtocolKind::Alg1Strong, &mut states);
        assert_eq!(round_outcome(&states).unwrap(), RoundOutcome::Continue);
        assert!(states.iter().all(|s| !s.leader_known));
    }

    #[test]
    fn alg2_two_witnesses_continue() {
        // Slot 3 had one initiator (station 0) heard by two witnesses: the
        // forwarding slot collides, so nobody confirms.
        let mut states = vec![StationState::default(); 4];
        states[0].transmitted_slots = vec![3];
        states[1].witness_record = Some(3);
        states[2].witness_record = Some(3);
        let statuses = run_det_phase(ProtocolKind::Alg2Weak, &mut states);
        assert_eq!(statuses[0], crate::channel::ChannelStatus::Null);
        assert_eq!(statuses[1], crate::channel::ChannelStatus::Null);
        assert_eq!(round_outcome(&states).unwrap(), RoundOutcome::Continue);
    }

    #[test]
    fn alg2_single_witness_elects_initiator() {
        let mut states = vec![StationState::default(); 4];
        states[0].transmitted_slots = vec![3];
        states[1].witness_record = Some(3);
        let statuses = run_det_phase(ProtocolKind::Alg2Weak, &mut states);
        assert_eq!(statuses[0], crate::channel::ChannelStatus::Single(3));
        assert_eq!(statuses[1], crate::channel::ChannelStatus::Single(CONFIRMATION));
        assert_eq!(round_outcome(&states).unwrap(), RoundOutcome::Elected(0));
        assert!(states.iter().all(|s| s.leader_known));
    }

    #[test]
    fn params_validation() {
        assert!(ElectionParams::new(1, 1.5, 1).is_err());
        assert!(ElectionParams::new(2, 1.0, 1).is_err());
        assert!(ElectionParams::new(2, f64::NAN, 1).is_err());
        assert!(ElectionParams::new(2, 1.5, 0).is_err());
        let p = ElectionParams::new(2, 1.5, 3).unwrap();
        assert_eq!(p.epsilon(), 0.25);
    }
}
