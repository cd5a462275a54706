//! Simulates full elections for both protocols and prints the averages next
//! to the theoretical bounds.
//!
//!     cargo run --release --example simulate_election -- [n] [trials]

use std::time::Instant;

use radio_election::analytics::{p_star, theory_bounds, tuned_alpha};
use radio_election::engine::{run_trials, SimConfig};
use radio_election::protocols::{ElectionParams, ProtocolKind};

fn main() -> radio_election::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1024, |s| s.parse().expect("n"));
    let trials: u64 = args.next().map_or(1000, |s| s.parse().expect("trials"));

    for kind in [ProtocolKind::Alg1Strong, ProtocolKind::Alg2Weak] {
        let params = ElectionParams::new(n, tuned_alpha(kind), 1)?;
        let start = Instant::now();
        let summary = run_trials(&SimConfig::new(params, kind).trials(trials).seed(7))?;
        let elapsed = start.elapsed();
        let bounds = theory_bounds(&params, kind, p_star(kind))?;
        println!(
            "{kind:?}  n={n}  alpha={}  trials={trials}  ({elapsed:.2?})",
            params.alpha
        );
        println!(
            "  rounds    {:>8.2}   bound j*+1/p* = {:.2}",
            summary.mean_rounds().unwrap_or(f64::NAN),
            bounds.expected_rounds_bound
        );
        println!(
            "  slots     {:>8.1}   bound (double sum) = {:.1}",
            summary.mean_slots().unwrap_or(f64::NAN),
            bounds.expected_time_bound
        );
        println!("  max awake {:>8.2}", summary.mean_max_awake().unwrap_or(f64::NAN));
        println!(
            "  unterminated {}, non-unanimous {}",
            summary.nonterminated, summary.non_unanimous
        );
    }
    Ok(())
}
