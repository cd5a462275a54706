//! Number of rounds versus j* + Geometric(p*), with a 99% DKW band.
//!
//!     cargo run --release --example dominance -- [n] [trials]

use radio_election::analytics::dominance::shifted_geometric_cdf;
use radio_election::analytics::{dominance_check, j_star, P1_STAR};
use radio_election::engine::{run_trials, SimConfig};
use radio_election::protocols::{ElectionParams, ProtocolKind};

fn main() -> radio_election::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(4096, |s| s.parse().expect("n"));
    let trials: u64 = args.next().map_or(2000, |s| s.parse().expect("trials"));
    let alpha = 1.0767;
    let params = ElectionParams::new(n, alpha, 1)?;
    let summary = run_trials(&SimConfig::new(params, ProtocolKind::Alg1Strong).trials(trials).seed(4))?;
    let js = j_star(n as u64, alpha)?;
    let cdf = &summary.rounds_cdf;
    println!("n = {n}, alpha = {alpha}, j* = {js}, {trials} runs");
    println!("{:>4} {:>9} {:>9}", "k", "empirical", "reference");
    for (k, f) in cdf.points().into_iter().filter(|(k, _)| k % 4 == 0) {
        println!("{k:>4} {f:>9.4} {:>9.4}", shifted_geometric_cdf(k, js, P1_STAR));
    }
    let report = dominance_check(cdf, js, P1_STAR, 0.99)?;
    println!(
        "dominance {}: worst gap + band = {:+.4} at k = {} (band {:.4})",
        if report.pass { "holds" } else { "violated" },
        report.margin,
        report.worst_k,
        report.band
    );
    Ok(())
}
