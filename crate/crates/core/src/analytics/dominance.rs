//! Statistical check that the number of rounds is stochastically dominated
//! by `j* + Geometric(p*)`: the empirical CDF must stay above the reference
//! CDF up to a Dvoretzky-Kiefer-Wolfowitz band.

use serde::{Deserialize, Serialize};

use crate::stats::EmpiricalCdf;
use crate::{Error, Result};

/// Minimum number of terminated runs the check accepts.
pub const MIN_OBSERVED: u64 = 1000;

/// `P(j* + G <= k)` with `G` geometric on `{1, 2, ...}`.
pub fn shifted_geometric_cdf(k: u64, j_star: u64, p_star: f64) -> f64 {
    if k <= j_star {
        0.0
    } else {
        -(((k - j_star) as f64) * (-p_star).ln_1p()).exp_m1()
    }
}

/// Half-width `sqrt(ln(2 / (1 - confidence)) / (2 N))` of the DKW band.
pub fn dkw_band(samples: u64, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * samples as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub pass: bool,
    /// `min_k F_emp(k) - F_ref(k) + band`; negative means failure.
    pub margin: f64,
    pub band: f64,
    pub worst_k: u64,
    pub observed: u64,
    pub total: u64,
}

pub fn dominance_check(cdf: &EmpiricalCdf, j_star: u64, p_star: f64, confidence: f64) -> Result<DominanceReport> {
    if !(p_star > 0.0 && p_star < 1.0) || !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < p* < 1 and 0 < confidence < 1, got {p_star}, {confidence}"
        )));
    }
    if cdf.observed() < MIN_OBSERVED {
        return Err(Error::InsufficientSamples {
            needed: MIN_OBSERVED,
            got: cdf.observed(),
        });
    }
    let band = dkw_band(cdf.total(), confidence);
    // Past this k the reference is within 1e-12 of 1 and the empirical CDF
    // is flat, so the gap no longer changes.
    let tail = ((1e-12f64).ln() / (-p_star).ln_1p()).ceil() as u64;
    let k_max = cdf.max_value().max(j_star) + tail;
    // For k <= j* the reference is 0 and the condition holds trivially.
    let (worst_k, gap) = (j_star + 1..=k_max)
        .map(|k| (k, cdf.cdf(k) - shifted_geometric_cdf(k, j_star, p_star)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("k range is nonempty");
    let margin = gap + band;
    Ok(DominanceReport {
        pass: margin >= 0.0,
        margin,
        band,
        worst_k,
        observed: cdf.observed(),
        total: cdf.total(),
    })
}
