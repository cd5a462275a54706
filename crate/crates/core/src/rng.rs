//! Counter-based random draws.
//!
//! Every variate used by a simulation is a pure function of
//! `(seed, trial, station, round, slot)`. Trials can therefore run in any
//! order, on any number of threads, and still reproduce bit-for-bit.
//!
//! Keys are folded with the SplitMix64 finaliser; the final per-station step
//! is exactly SplitMix64's output function over a Weyl sequence, which is
//! what makes consecutive station indices statistically independent.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn fold(key: u64, value: u64) -> u64 {
    mix64(key ^ mix64(value.wrapping_add(GOLDEN)))
}

/// Uniform variates for one station in one slot.
///
/// `wake` comes from the high 53 bits of the station's hash and `role` from
/// the low 11 bits, so the two are independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDraws {
    pub wake: f64,
    pub role: f64,
}

impl SlotDraws {
    #[inline]
    fn from_bits(h: u64) -> Self {
        SlotDraws {
            wake: (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64),
            role: (h & 0x7ff) as f64 * (1.0 / 2048.0),
        }
    }
}

/// Key for one `(seed, trial)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialKey(u64);

impl TrialKey {
    pub fn new(seed: u64, trial: u64) -> Self {
        TrialKey(fold(mix64(seed ^ 0x5261_6469_6f45_6c65), trial))
    }

    pub fn slot(self, round: u64, slot: u64) -> SlotKey {
        SlotKey(fold(fold(self.0, round), slot))
    }
}

/// Key for one `(seed, trial, round, slot)`; hand out per-station draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotKey(u64);

impl SlotKey {
    #[inline]
    pub fn station(self, station: usize) -> SlotDraws {
        let h = mix64(
            self.0
                .wrapping_add((station as u64).wrapping_add(1).wrapping_mul(GOLDEN)),
        );
        SlotDraws::from_bits(h)
    }
}

/// Convenience: the draws of one station in one slot.
pub fn draws(seed: u64, trial: u64, station: usize, round: u64, slot: u64) -> SlotDraws {
    TrialKey::new(seed, trial).slot(round, slot).station(station)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure() {
        assert_eq!(draws(7, 3, 11, 2, 5), draws(7, 3, 11, 2, 5));
        assert_ne!(draws(7, 3, 11, 2, 5), draws(7, 3, 12, 2, 5));
        assert_ne!(draws(7, 3, 11, 2, 5), draws(8, 3, 11, 2, 5));
        assert_ne!(draws(7, 3, 11, 2, 5), draws(7, 3, 11, 3, 5));
        assert_ne!(draws(7, 3, 11, 2, 5), draws(7, 4, 11, 2, 5));
    }

    #[test]
    fn variates_in_unit_interval() {
        let key = TrialKey::new(1, 0).slot(1, 0);
        for s in 0..10_000 {
            let d = key.station(s);
            assert!((0.0..1.0).contains(&d.wake));
            assert!((0.0..1.0).contains(&d.role));
        }
    }

    #[test]
    fn wake_thresholds_have_expected_frequency() {
        // P(wake < 2^-k) = 2^-k; checked at 5 sigma over 2^20 draws per k.
        let n = 1 << 20;
        for k in 1..=6 {
            let p = 0.5f64.powi(k);
            let key = TrialKey::new(42, 9).slot(3, k as u64);
            let hits = (0..n).filter(|&s| key.station(s).wake < p).count() as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((hits - n as f64 * p).abs() < 5.0 * sigma, "k={k} hits={hits}");
        }
        let key = TrialKey::new(42, 9).slot(4, 0);
        let heads = (0..n).filter(|&s| key.station(s).role < 0.5).count() as f64;
        assert!((heads - n as f64 / 2.0).abs() < 5.0 * (n as f64 / 4.0).sqrt());
    }

    #[test]
    fn wake_and_role_are_uncorrelated() {
        let n = 1 << 18;
        let key = TrialKey::new(5, 1).slot(2, 1);
        let both = (0..n)
            .filter(|&s| {
                let d = key.station(s);
                d.wake < 0.5 && d.role < 0.5
            })
            .count() as f64;
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        assert!((both - n as f64 * 0.25).abs() < 5.0 * sigma);
    }
}
