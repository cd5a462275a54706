//! Exact per-round success probabilities.
//!
//! For the strong-model protocol, slot `k` "succeeds" when exactly one
//! station wakes, probability `rho(k, n) = n 2^-k (1 - 2^-k)^(n-1)`. For the
//! weak-model protocol it succeeds when exactly one station transmits and
//! exactly one listens, probability
//! `q(k, n) = C(n,2) / (2 * 4^k) * (1 - 2^-k)^(n-2)`.
//!
//! Slots are independent, so the probability that exactly one slot of the
//! round succeeds is `sum_k r_k prod_{i != k} (1 - r_i)`, evaluated here as
//! `(sum_k r_k / (1 - r_k)) * prod_i (1 - r_i)`.
//!
//! That event is what the closed forms describe; it is not the election
//! event itself. The strong protocol elects iff exactly one *station* is a
//! candidate, which also covers a station alone in several slots, so the
//! election probability sits slightly above `p_j`. The weak protocol elects
//! iff exactly one station is a witness; a slot with one initiator and two
//! listeners creates two witnesses and spoils the round, which the
//! formula ignores, so there `p'_j` overstates the election probability.
//! [`election_probability`] gives the exact election probabilities.

use serde::{Deserialize, Serialize};

use crate::protocols::{inner_len, ElectionParams, ProtocolKind};
use crate::{Error, Result};

/// Largest inner-loop length [`exact_round_success`] will evaluate.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// `(1 - 2^-k)^e`, accurate for large `k`.
fn survive(k: u64, exponent: f64) -> f64 {
    let x = 0.5f64.powi(k.min(1100) as i32);
    (exponent * (-x).ln_1p()).exp()
}

fn check_slot(k: u64, n: u64) -> Result<()> {
    if k < 1 {
        return Err(Error::Domain(format!("slot index must be >= 1, got {k}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2 stations, got {n}")));
    }
    Ok(())
}

/// Probability that exactly one of `n` stations wakes in slot `i`.
pub fn rho(i: u64, n: u64) -> Result<f64> {
    check_slot(i, n)?;
    Ok(n as f64 * 0.5f64.powi(i.min(1100) as i32) * survive(i, (n - 1) as f64))
}

/// Probability of exactly one initiator and exactly one listener in slot `k`.
pub fn q_pair(k: u64, n: u64) -> Result<f64> {
    check_slot(k, n)?;
    let pairs = n as f64 * (n - 1) as f64 / 2.0;
    Ok(0.5 * pairs * 0.25f64.powi(k.min(600) as i32) * survive(k, (n - 2) as f64))
}

/// `(sum_k r_k / (1 - r_k), prod_k (1 - r_k))` over the given per-slot
/// success probabilities.
pub fn success_factors(slot_probs: &[f64]) -> (f64, f64) {
    slot_probs
        .iter()
        .fold((0.0, 1.0), |(t, s), &r| (t + r / (1.0 - r), s * (1.0 - r)))
}

/// Exact per-round quantities for one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub protocol: ProtocolKind,
    pub n: u64,
    pub round: Option<u64>,
    pub k0: u64,
    pub inner_len: u64,
    pub rho_values: Vec<f64>,
    pub q_values: Vec<f64>,
    pub s_j: f64,
    pub t_j: f64,
    pub p_j: f64,
    pub s_prime_j: f64,
    pub t_prime_j: f64,
    pub p_prime_j: f64,
    /// Exact probability that the strong protocol elects in this round.
    pub election_p: f64,
    /// Exact probability that the weak protocol elects in this round.
    pub election_p_prime: f64,
}

impl AnalyticReport {
    /// Round success probability of the report's protocol.
    pub fn success(&self) -> f64 {
        match self.protocol {
            ProtocolKind::Alg1Strong => self.p_j,
            ProtocolKind::Alg2Weak => self.p_prime_j,
        }
    }

    /// Exact election probability of the report's protocol.
    pub fn election(&self) -> f64 {
        match self.protocol {
            ProtocolKind::Alg1Strong => self.election_p,
            ProtocolKind::Alg2Weak => self.election_p_prime,
        }
    }
}

/// Exact probability that a round with inner slots `k0 .. k0+len-1` elects
/// a leader.
///
/// Call a station *marked* in a slot when it becomes a candidate (strong)
/// or a witness (weak) there; the round elects iff exactly one station is
/// ever marked. Slots are independent, so with `B_k` = P(nobody marked in
/// slot k) and `A_k` = P(nobody but station i marked in slot k),
/// `P = n (prod A_k - prod B_k)`. In both protocols `A_k - B_k = r_k / n`
/// with `r_k` the per-slot formula (`rho` resp. `q_pair`), and
///
/// * strong: `B_k = 1 - rho_k`;
/// * weak: `B_k = 1 - n (p/2) ((1 - p/2)^(n-1) - (1 - p)^(n-1))`, `p = 2^-k`:
///   no SINGLE slot with at least one listener.
pub fn election_probability(n: u64, protocol: ProtocolKind, len: u64, k0: u64) -> Result<f64> {
    if len > ENUMERATION_CAP {
        return Err(Error::Overflow {
            len: len as f64,
            cap: ENUMERATION_CAP,
        });
    }
    let nf = n as f64;
    let (mut ln_b, mut ln_ratio) = (0.0, 0.0);
    for k in k0..k0 + len {
        let (r, b) = match protocol {
            ProtocolKind::Alg1Strong => {
                let r = rho(k, n)?;
                (r, 1.0 - r)
            }
            ProtocolKind::Alg2Weak => {
                let half = 0.5f64.powi(k.min(1100) as i32 + 1);
                let heard = nf * half * (survive(k + 1, nf - 1.0) - survive(k, nf - 1.0));
                (q_pair(k, n)?, 1.0 - heard)
            }
        };
        ln_b += b.ln();
        ln_ratio += (r / nf / b).ln_1p();
    }
    // prod B (prod(A/B) - 1), avoiding the cancellation in prod A - prod B.
    Ok((nf * ln_b.exp() * ln_ratio.exp_m1()).clamp(0.0, 1.0))
}

/// Per-round report for an explicit inner length (slots `k0 .. k0+len-1`).
pub fn round_success_for_len(n: u64, protocol: ProtocolKind, len: u64, k0: u64) -> Result<AnalyticReport> {
    round_success_with(n, protocol, len, k0, rho, q_pair)
}

/// Same as [`round_success_for_len`] with caller-supplied slot formulas.
pub fn round_success_with<R, Q>(
    n: u64,
    protocol: ProtocolKind,
    len: u64,
    k0: u64,
    rho_fn: R,
    q_fn: Q,
) -> Result<AnalyticReport>
where
    R: Fn(u64, u64) -> Result<f64>,
    Q: Fn(u64, u64) -> Result<f64>,
{
    if len > ENUMERATION_CAP {
        return Err(Error::Overflow {
            len: len as f64,
            cap: ENUMERATION_CAP,
        });
    }
    if len == 0 || k0 == 0 {
        return Err(Error::Domain("inner length and k0 must be >= 1".into()));
    }
    let ks = k0..k0 + len;
    let rho_values = ks.clone().map(|k| rho_fn(k, n)).collect::<Result<Vec<_>>>()?;
    let q_values = ks.map(|k| q_fn(k, n)).collect::<Result<Vec<_>>>()?;
    let (t_j, s_j) = success_factors(&rho_values);
    let (t_prime_j, s_prime_j) = success_factors(&q_values);
    let election_p = election_probability(n, ProtocolKind::Alg1Strong, len, k0)?;
    let election_p_prime = election_probability(n, ProtocolKind::Alg2Weak, len, k0)?;
    Ok(AnalyticReport {
        protocol,
        n,
        round: None,
        k0,
        inner_len: len,
        rho_values,
        q_values,
        s_j,
        t_j,
        p_j: t_j * s_j,
        s_prime_j,
        t_prime_j,
        p_prime_j: t_prime_j * s_prime_j,
        election_p,
        election_p_prime,
    })
}

/// Exact per-round report for round `j` of the given parameters.
pub fn exact_round_success(params: &ElectionParams, protocol: ProtocolKind, j: u64) -> Result<AnalyticReport> {
    params.validate()?;
    let len = inner_len(j, params.alpha)?;
    let mut report = round_success_for_len(params.n as u64, protocol, len, params.k0)?;
    report.round = Some(j);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(1, 2).unwrap(), 0.5);
        // (4/4) * (3/4)^3 = 27/64
        assert!((rho(2, 4).unwrap() - 27.0 / 64.0).abs() < 1e-15);
        assert!(rho(0, 4).is_err());
        assert!(rho(1, 1).is_err());
    }

    #[test]
    fn rho_vanishes_beyond_mode() {
        let n = 100;
        let mut prev = rho(7, n).unwrap();
        for i in 8..80 {
            let r = rho(i, n).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 1e-20);
    }

    #[test]
    fn q_pair_examples() {
        assert!((q_pair(1, 2).unwrap() - 1.0 / 8.0).abs() < 1e-15);
        // (1/2) * 3 / 4 * (1/2)^1 = 3/16
        assert!((q_pair(1, 3).unwrap() - 3.0 / 16.0).abs() < 1e-15);
        assert!(q_pair(40, 2).unwrap() < 1e-24);
    }

    #[test]
    fn small_rounds() {
        let r = round_success_for_len(2, ProtocolKind::Alg1Strong, 1, 1).unwrap();
        assert!((r.p_j - 0.5).abs() < 1e-15);
        let r = round_success_for_len(2, ProtocolKind::Alg2Weak, 1, 1).unwrap();
        assert!((r.p_prime_j - 0.125).abs() < 1e-15);
        assert_eq!(r.success(), r.p_prime_j);
    }

    /// Exact probability, over all 2^(n L) wake patterns, that exactly one
    /// slot has exactly one awake station.
    fn enumerate_alg1(n: usize, len: usize, k0: u32) -> BigRational {
        let cells = n * len;
        let mut total = BigRational::zero();
        for mask in 0u64..(1 << cells) {
            let mut weight = BigRational::one();
            let mut singles = 0;
            for slot in 0..len {
                let p = rat(1, 1i64 << (k0 as usize + slot));
                let mut awake = 0;
                for st in 0..n {
                    if mask >> (slot * n + st) & 1 == 1 {
                        awake += 1;
                        weight *= &p;
                    } else {
                        weight *= BigRational::one() - &p;
                    }
                }
                singles += (awake == 1) as usize;
            }
            if singles == 1 {
                total += weight;
            }
        }
        total
    }

    #[test]
    fn alg1_matches_rational_enumeration() {
        let exact = enumerate_alg1(3, 2, 1).to_f64().unwrap();
        let r = round_success_for_len(3, ProtocolKind::Alg1Strong, 2, 1).unwrap();
        assert!((r.p_j - exact).abs() < 1e-12, "{} vs {}", r.p_j, exact);
        let exact = enumerate_alg1(2, 3, 2).to_f64().unwrap();
        let r = round_success_for_len(2, ProtocolKind::Alg1Strong, 3, 2).unwrap();
        assert!((r.p_j - exact).abs() < 1e-12);
    }

    #[test]
    fn election_probability_against_formula() {
        // n = 2: the marked-station event and the one-slot event coincide
        // for a single slot.
        let r = round_success_for_len(2, ProtocolKind::Alg1Strong, 1, 1).unwrap();
        assert!((r.election_p - 0.5).abs() < 1e-15);
        assert!((r.election_p_prime - 0.125).abs() < 1e-15);
        // Long rounds: strong elects more often than the formula says, weak
        // less often.
        let r = round_success_for_len(100, ProtocolKind::Alg1Strong, 18, 1).unwrap();
        assert!(r.election_p > r.p_j);
        assert!(r.election_p_prime < r.p_prime_j);
        // Reference values from a 40-digit evaluation of the plain products.
        assert!((r.election_p - 0.372_197_920_085_205_76).abs() < 1e-12);
        assert!((r.election_p_prime - 0.198_303_660_670_160_97).abs() < 1e-12);
    }

    #[test]
    fn overflow_guard() {
        assert!(matches!(
            round_success_for_len(10, ProtocolKind::Alg1Strong, ENUMERATION_CAP + 1, 1),
            Err(Error::Overflow { .. })
        ));
        let p = ElectionParams::new(10, 2.0, 1).unwrap();
        assert!(exact_round_success(&p, ProtocolKind::Alg1Strong, 30).is_err());
        assert!(exact_round_success(&p, ProtocolKind::Alg1Strong, 19).is_ok());
    }

    proptest! {
        #[test]
        fn report_invariants(n in 2u64..5000, len in 1u64..60, k0 in 1u64..4) {
            let r = round_success_for_len(n, ProtocolKind::Alg1Strong, len, k0).unwrap();
            for v in r.rho_values.iter().chain(&r.q_values).chain([&r.s_j, &r.p_j, &r.s_prime_j, &r.p_prime_j]) {
                prop_assert!((0.0..=1.0).contains(v));
            }
            prop_assert!((r.p_j - r.t_j * r.s_j).abs() <= 1e-10 * r.p_j.max(f64::MIN_POSITIVE));
            prop_assert!((r.p_prime_j - r.t_prime_j * r.s_prime_j).abs() <= 1e-10 * r.p_prime_j.max(f64::MIN_POSITIVE));
            // Direct product form agrees with the stable form.
            let direct: f64 = (0..r.rho_values.len()).map(|k| {
                r.rho_values[k] * r.rho_values.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| 1.0 - x).product::<f64>()
            }).sum();
            prop_assert!((direct - r.p_j).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.election_p) && (0.0..=1.0).contains(&r.election_p_prime));
        }

        #[test]
        fn s_nonincreasing_in_round(n in 2usize..10_000, alpha in 1.01f64..2.0) {
            let params = ElectionParams::new(n, alpha, 1).unwrap();
            let mut prev = 1.0;
            for j in 1..20 {
                let r = exact_round_success(&params, ProtocolKind::Alg1Strong, j).unwrap();
                prop_assert!(r.s_j <= prev + 1e-15);
                prev = r.s_j;
            }
        }
    }
}
