//! # radio-election
//!
//! Simulator and analytic toolkit for two energy-efficient randomized
//! leader-election protocols on a single-hop radio network whose shared
//! channel has no collision detection.
//!
//! * [`channel`] arbitrates one synchronous slot under the strong or weak
//!   no-CD model.
//! * [`protocols`] holds the per-station state machines for the strong-model
//!   protocol (candidates) and the weak-model protocol (initiators and
//!   witnesses).
//! * [`engine`] runs seeded, counter-based simulations of whole elections or
//!   isolated rounds and aggregates the metrics.
//! * [`analytics`] computes per-round success probabilities, the time and
//!   energy bounds, the harmonic-sum machinery behind them and the
//!   stochastic-dominance check.
//! * [`verify`] bundles the end-to-end checks used by `radio-election verify`
//!   and the acceptance tests.
//! * [`cli`] is the command-line driver.
//!
//! ## Running the examples
//!
//! ```bash
//! cargo run --release --example simulate_election
//! cargo run --release --example theory_table
//! ```

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod engine;
mod error;
pub mod protocols;
pub mod rng;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
