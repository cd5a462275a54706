//! Small statistics helpers: sample summaries, binomial estimates and
//! empirical CDFs over integer-valued samples.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Standard-normal quantile for one-sided 99% confidence.
pub const Z_ONE_SIDED_99: f64 = 2.326_347_874_040_841;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance; 0 for a single sample.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

impl SampleStats {
    /// Summarises `values` in the order given. Returns `None` when empty.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance = if count > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(SampleStats {
            count,
            mean,
            variance,
            min: sorted[0],
            max: sorted[count - 1],
            p05: quantile_sorted(&sorted, 0.05),
            p50: quantile_sorted(&sorted, 0.50),
            p95: quantile_sorted(&sorted, 0.95),
        })
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Linear-interpolation quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Success count out of a number of Bernoulli trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        Ok(BinomialEstimate { successes, trials })
    }

    pub fn frequency(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Standard error of the frequency, evaluated at success probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Plug-in standard error.
    pub fn sigma(&self) -> f64 {
        self.sigma_at(self.frequency())
    }

    /// Normal-approximation interval `freq +- z * sigma`, clamped to [0, 1].
    pub fn interval(&self, z: f64) -> (f64, f64) {
        let f = self.frequency();
        let h = z * self.sigma();
        ((f - h).max(0.0), (f + h).min(1.0))
    }

    /// One-sided lower confidence bound `freq - z * sigma`.
    pub fn lower_bound(&self, z: f64) -> f64 {
        self.frequency() - z * self.sigma()
    }
}

/// Empirical CDF of positive integer samples, with mass for samples that
/// never terminated held separately.
///
/// `cdf(k)` is `#{x <= k} / total`, where `total` counts censored samples
/// too; the CDF therefore tops out at `1 - censored/total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    /// `counts[i]` is the number of samples equal to `i + 1`.
    counts: Vec<u64>,
    censored: u64,
    total: u64,
}

impl EmpiricalCdf {
    pub fn new<I: IntoIterator<Item = Option<u64>>>(samples: I) -> Self {
        let mut counts: Vec<u64> = Vec::new();
        let mut censored = 0;
        let mut total = 0;
        for s in samples {
            total += 1;
            match s {
                Some(v) if v >= 1 => {
                    let i = (v - 1) as usize;
                    if counts.len() <= i {
                        counts.resize(i + 1, 0);
                    }
                    counts[i] += 1;
                }
                _ => censored += 1,
            }
        }
        EmpiricalCdf {
            counts,
            censored,
            total,
        }
    }

    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        Self::new(values.into_iter().map(Some))
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn censored(&self) -> u64 {
        self.censored
    }

    pub fn observed(&self) -> u64 {
        self.total - self.censored
    }

    /// Largest observed value.
    pub fn max_value(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn cdf(&self, k: u64) -> f64 {
        if self.total == 0 || k == 0 {
            return 0.0;
        }
        let upto = (k as usize).min(self.counts.len());
        self.counts[..upto].iter().sum::<u64>() as f64 / self.total as f64
    }

    /// `(k, cdf(k))` for `k = 1 ..= max_value()`.
    pub fn points(&self) -> Vec<(u64, f64)> {
        let mut acc = 0;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, c)| {
                acc += c;
                ((i + 1) as u64, acc as f64 / self.total as f64)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sample_stats_basic() {
        let s = SampleStats::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!((s.min, s.max, s.p50), (1.0, 4.0, 2.5));
        assert!(SampleStats::from_values(&[]).is_none());
        let one = SampleStats::from_values(&[7.0]).unwrap();
        assert_eq!((one.variance, one.p05, one.p95), (0.0, 7.0, 7.0));
    }

    #[test]
    fn binomial_requires_trials() {
        assert!(BinomialEstimate::new(0, 0).is_err());
        let b = BinomialEstimate::new(25, 100).unwrap();
        assert_eq!(b.frequency(), 0.25);
        assert!((b.sigma() - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cdf_with_censoring() {
        let cdf = EmpiricalCdf::new([Some(1), Some(3), Some(3), None]);
        assert_eq!(cdf.cdf(0), 0.0);
        assert_eq!(cdf.cdf(1), 0.25);
        assert_eq!(cdf.cdf(2), 0.25);
        assert_eq!(cdf.cdf(3), 0.75);
        assert_eq!(cdf.cdf(100), 0.75);
        assert_eq!(cdf.censored(), 1);
        assert_eq!(cdf.points(), vec![(1, 0.25), (2, 0.25), (3, 0.75)]);
    }

    proptest! {
        #[test]
        fn cdf_nondecreasing_and_bounded(values in prop::collection::vec(prop::option::weighted(0.9, 1u64..50), 1..200)) {
            let cdf = EmpiricalCdf::new(values.clone());
            let mut prev = 0.0;
            for k in 0..60 {
                let c = cdf.cdf(k);
                prop_assert!(c >= prev && c <= 1.0);
                prev = c;
            }
            let censored = values.iter().filter(|v| v.is_none()).count() as f64;
            prop_assert!((prev - (1.0 - censored / values.len() as f64)).abs() < 1e-12);
        }
    }
}
