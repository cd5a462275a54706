//! Single shared radio channel without collision detection.
//!
//! In every slot the channel is either `Single` (exactly one transmitter,
//! whose message every listener receives) or `Null` (nobody, or two or more
//! stations, transmitted; listeners hear noise and cannot tell which).
//!
//! Under the strong model an awake station may transmit and listen in the
//! same slot. Under the weak model it must pick one; a transmitter then gets
//! no feedback at all.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Message carried by a transmission. Protocols only ever send a slot index
/// or a fixed token, so an integer is enough.
pub type Payload = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Transmit and listen may be combined in one slot.
    Strong,
    /// Transmit and listen are mutually exclusive.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotAction {
    Sleep,
    Listen,
    Transmit(Payload),
    /// Only valid under [`ModelKind::Strong`].
    TransmitListen(Payload),
}

impl SlotAction {
    pub fn is_awake(self) -> bool {
        !matches!(self, SlotAction::Sleep)
    }

    /// Payload of a transmitting action.
    pub fn transmitted(self) -> Option<Payload> {
        match self {
            SlotAction::Transmit(p) | SlotAction::TransmitListen(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_listening(self) -> bool {
        matches!(self, SlotAction::Listen | SlotAction::TransmitListen(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelStatus {
    Single(Payload),
    Null,
}

/// What one station perceives at the end of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observation {
    Heard(Payload),
    Noise,
    /// Sleeping, or transmitting under the weak model.
    Nothing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotOutcome {
    pub status: ChannelStatus,
    /// One entry per station, in the order of the action vector.
    pub observations: Vec<Observation>,
}

/// Channel status implied by a set of actions. Does not validate the model.
pub fn channel_status<'a, I>(actions: I) -> ChannelStatus
where
    I: IntoIterator<Item = &'a SlotAction>,
{
    let mut single = None;
    for payload in actions.into_iter().filter_map(|a| a.transmitted()) {
        if single.is_some() {
            return ChannelStatus::Null;
        }
        single = Some(payload);
    }
    match single {
        Some(p) => ChannelStatus::Single(p),
        None => ChannelStatus::Null,
    }
}

/// Observation of a single station given its own action and the slot status.
#[inline]
pub fn observe(model: ModelKind, action: SlotAction, status: ChannelStatus) -> Observation {
    let listens = match (model, action) {
        (_, SlotAction::Sleep) => false,
        (_, SlotAction::Listen) => true,
        (ModelKind::Strong, SlotAction::TransmitListen(_)) => true,
        // Weak-model transmitters are deaf to the channel.
        (ModelKind::Weak, _) => false,
        (ModelKind::Strong, SlotAction::Transmit(_)) => false,
    };
    if !listens {
        return Observation::Nothing;
    }
    match status {
        ChannelStatus::Single(p) => Observation::Heard(p),
        ChannelStatus::Null => Observation::Noise,
    }
}

/// Arbitrates one synchronous slot.
pub fn resolve_slot(model: ModelKind, actions: &[SlotAction]) -> Result<SlotOutcome> {
    if model == ModelKind::Weak {
        if let Some(station) = actions.iter().position(|a| matches!(a, SlotAction::TransmitListen(_))) {
            return Err(Error::ModelViolation { station });
        }
    }
    let status = channel_status(actions);
    let observations = actions.iter().map(|&a| observe(model, a, status)).collect();
    Ok(SlotOutcome { status, observations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use SlotAction::*;

    #[test]
    fn all_asleep_is_null() {
        let out = resolve_slot(ModelKind::Strong, &[Sleep, Sleep]).unwrap();
        assert_eq!(out.status, ChannelStatus::Null);
        assert_eq!(out.observations, vec![Observation::Nothing; 2]);
    }

    #[test]
    fn strong_single_transmitter_hears_itself() {
        let out = resolve_slot(ModelKind::Strong, &[TransmitListen(3), Listen]).unwrap();
        assert_eq!(out.status, ChannelStatus::Single(3));
        assert_eq!(out.observations, vec![Observation::Heard(3); 2]);
    }

    #[test]
    fn weak_collision_gives_noise_to_listener_only() {
        let out = resolve_slot(ModelKind::Weak, &[Transmit(1), Transmit(1), Listen]).unwrap();
        assert_eq!(out.status, ChannelStatus::Null);
        assert_eq!(
            out.observations,
            vec![Observation::Nothing, Observation::Nothing, Observation::Noise]
        );
    }

    #[test]
    fn weak_rejects_transmit_listen() {
        let err = resolve_slot(ModelKind::Weak, &[Listen, TransmitListen(2)]).unwrap_err();
        assert_eq!(err, Error::ModelViolation { station: 1 });
    }

    #[test]
    fn strong_plain_transmit_gets_no_feedback() {
        let out = resolve_slot(ModelKind::Strong, &[Transmit(5), Listen]).unwrap();
        assert_eq!(out.status, ChannelStatus::Single(5));
        assert_eq!(out.observations[0], Observation::Nothing);
    }

    fn action(model: ModelKind) -> impl Strategy<Value = SlotAction> {
        let base = prop_oneof![Just(Sleep), Just(Listen), (0u64..4).prop_map(Transmit),];
        match model {
            ModelKind::Weak => base.boxed(),
            ModelKind::Strong => prop_oneof![base, (0u64..4).prop_map(TransmitListen)].boxed(),
        }
    }

    fn scenario() -> impl Strategy<Value = (ModelKind, Vec<SlotAction>)> {
        prop_oneof![Just(ModelKind::Strong), Just(ModelKind::Weak)]
            .prop_flat_map(|m| (Just(m), prop::collection::vec(action(m), 0..8)))
    }

    proptest! {
        #[test]
        fn single_iff_exactly_one_transmitter((model, actions) in scenario()) {
            let out = resolve_slot(model, &actions).unwrap();
            let tx: Vec<_> = actions.iter().filter_map(|a| a.transmitted()).collect();
            match out.status {
                ChannelStatus::Single(p) => prop_assert!(tx.len() == 1 && tx[0] == p),
                ChannelStatus::Null => prop_assert!(tx.len() != 1),
            }
            prop_assert_eq!(out.observations.len(), actions.len());
            prop_assert_eq!(resolve_slot(model, &actions).unwrap(), out.clone());

            let expected_listen = match out.status {
                ChannelStatus::Single(p) => Observation::Heard(p),
                ChannelStatus::Null => Observation::Noise,
            };
            for (a, o) in actions.iter().zip(&out.observations) {
                match a {
                    Sleep => prop_assert_eq!(*o, Observation::Nothing),
                    Listen | TransmitListen(_) => prop_assert_eq!(*o, expected_listen),
                    Transmit(_) => prop_assert_eq!(*o, Observation::Nothing),
                }
            }
        }
    }
}
