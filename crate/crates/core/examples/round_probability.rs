//! Exact success probability of single rounds next to simulation.
//!
//! The closed form counts rounds with exactly one successful inner slot;
//! the simulation measures actual elections, which also succeed when one
//! station is the unique transmitter of several slots. The simulated
//! frequency therefore sits at or slightly above the formula.

use radio_election::analytics::exact_round_success;
use radio_election::engine::simulate_round;
use radio_election::protocols::{ElectionParams, ProtocolKind};

fn main() -> radio_election::Result<()> {
    let params = ElectionParams::new(100, 1.1, 1)?;
    println!("n = 100, alpha = 1.1");
    println!(
        "{:<11} {:>3} {:>4} {:>10} {:>10} {:>9}",
        "protocol", "j", "L_j", "exact", "simulated", "+-3sigma"
    );
    for kind in [ProtocolKind::Alg1Strong, ProtocolKind::Alg2Weak] {
        for j in [6, 20, 25, 30, 35, 40] {
            let exact = exact_round_success(&params, kind, j)?;
            let sim = simulate_round(&params, kind, j, 20_000, 1)?;
            println!(
                "{:<11} {:>3} {:>4} {:>10.6} {:>10.6} {:>9.6}",
                format!("{kind:?}"),
                j,
                exact.inner_len,
                exact.success(),
                sim.estimate.frequency(),
                3.0 * sim.estimate.sigma()
            );
        }
    }
    Ok(())
}
