//! Exact and asymptotic side: per-round probabilities, theory bounds,
//! harmonic sums and their fluctuations, the derived constants, and the
//! stochastic-dominance check.

pub mod bounds;
pub mod constants;
pub mod dominance;
pub mod probability;
pub mod special;

pub use bounds::{
    alpha_sup, cost_c, j_star, optimal_alpha, p_star, theory_bounds, tuned_alpha, OptimalAlpha, TheoryBounds, P1_STAR,
    P2_STAR,
};
pub use constants::{lemma_constants, ConstantEntry, ConstantsReport, Tolerance};
pub use dominance::{dominance_check, DominanceReport};
pub use probability::{exact_round_success, q_pair, rho, AnalyticReport};
pub use special::{fourier_amplitude, gamma_abs, mellin_check, MellinReport, MellinVariant};
