//! Bounds on rounds, slots and awake time, and the alpha that minimises
//! the slot bound.

use radio_election::analytics::{alpha_sup, optimal_alpha, p_star, theory_bounds, tuned_alpha};
use radio_election::protocols::{ElectionParams, ProtocolKind};

fn main() -> radio_election::Result<()> {
    for kind in [ProtocolKind::Alg1Strong, ProtocolKind::Alg2Weak] {
        let p = p_star(kind);
        let o = optimal_alpha(p, 1e-12)?;
        println!(
            "{kind:?}: p* = {p}, alpha in (1, {:.5}), optimal alpha {:.6} with C = {:.4}",
            alpha_sup(p),
            o.alpha,
            o.cost
        );
        println!(
            "  {:>8} {:>4} {:>9} {:>11} {:>11} {:>9}",
            "log2 n", "j*", "rounds", "slots", "C log2 n", "awake"
        );
        for e in [8u32, 16, 24, 32, 48, 62] {
            let params = ElectionParams::new(1usize << e, tuned_alpha(kind), 1)?;
            let b = theory_bounds(&params, kind, p)?;
            println!(
                "  {:>8} {:>4} {:>9.2} {:>11.1} {:>11.1} {:>9.2}",
                e, b.j_star, b.expected_rounds_bound, b.expected_time_bound, b.leading_time_term, b.awake_bound
            );
        }
    }
    Ok(())
}
