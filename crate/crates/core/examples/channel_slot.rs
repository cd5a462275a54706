//! One slot of the shared channel under both models: who hears what.

use radio_election::channel::{resolve_slot, ModelKind, SlotAction};

fn show(model: ModelKind, actions: &[SlotAction]) {
    match resolve_slot(model, actions) {
        Ok(outcome) => {
            println!("{model:?} {actions:?}");
            println!("  status {:?}", outcome.status);
            for (i, obs) in outcome.observations.iter().enumerate() {
                println!("  station {i}: {obs:?}");
            }
        }
        Err(e) => println!("{model:?} {actions:?}\n  rejected: {e}"),
    }
}

fn main() {
    use SlotAction::*;
    // A lone transmitter is heard; with two, everyone hears noise, which
    // without collision detection looks exactly like silence.
    show(ModelKind::Strong, &[TransmitListen(3), Listen, Sleep]);
    show(ModelKind::Strong, &[TransmitListen(3), TransmitListen(4), Listen]);
    show(ModelKind::Strong, &[Listen, Listen]);
    // Weak model: transmitters get no feedback at all.
    show(ModelKind::Weak, &[Transmit(5), Listen, Listen]);
    show(ModelKind::Weak, &[TransmitListen(1), Listen]);
}
