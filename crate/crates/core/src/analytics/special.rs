//! Harmonic sums `sum_k (n/2^k)^m exp(-n m / 2^k)` and the Fourier
//! fluctuations of their asymptotic expansions.
//!
//! The fluctuation coefficients involve `Gamma(m + 2 i l pi / ln 2)` with
//! integer `m`, whose modulus has the exact closed form
//! `|Gamma(m + iy)| = sqrt(pi y / sinh(pi y)) * prod_{t=1}^{m-1} sqrt(t^2 + y^2)`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

/// `2 pi / ln 2`, the spacing of the imaginary poles.
pub const CHI: f64 = 2.0 * PI / LN_2;

/// Default number of Fourier terms per side.
pub const DEFAULT_TERMS: u32 = 16;

/// Stated bound on the U-form fluctuation amplitude over all `m`.
pub const U_AMPLITUDE_BOUND: f64 = 0.024234;
/// Stated bound on the V-form fluctuation amplitude over all `m`.
pub const V_AMPLITUDE_BOUND: f64 = 9.0054e-5;

pub fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|t| (t as f64).ln()).sum()
}

fn ln_sinh(x: f64) -> f64 {
    if x < 1.0 {
        x.sinh().ln()
    } else {
        x + (-(-2.0 * x).exp()).ln_1p() - LN_2
    }
}

/// `ln |Gamma(m + iy)|` for integer `m >= 1`.
pub fn ln_gamma_abs(m: u64, y: f64) -> f64 {
    assert!(m >= 1, "gamma_abs needs m >= 1");
    let y = y.abs();
    if y == 0.0 {
        return ln_factorial(m - 1);
    }
    let base = 0.5 * ((PI * y).ln() - ln_sinh(PI * y));
    base + (1..m).map(|t| 0.5 * ((t * t) as f64 + y * y).ln()).sum::<f64>()
}

/// `|Gamma(m + iy)|` for integer `m >= 1`.
pub fn gamma_abs(m: u64, y: f64) -> f64 {
    ln_gamma_abs(m, y).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MellinVariant {
    /// `sum_k (n/2^k)^m exp(-n m/2^k)`.
    U,
    /// `sum_k 4^-m (n^2/4^k)^m exp(-n m/2^k)`.
    V,
}

/// Sum of the moduli of the non-constant Fourier coefficients,
/// `0 < |l| <= terms`.
///
/// * U: `2^m |Gamma(m + i l CHI)| / (m^(m-1) ln 2)`
/// * V: `|Gamma(2m + i l CHI)| / (4^m m^(2m-1) ln 2)`
pub fn fourier_amplitude(variant: MellinVariant, m: u64, terms: u32) -> f64 {
    assert!(m >= 1, "fourier_amplitude needs m >= 1");
    let mf = m as f64;
    let one_side: f64 = (1..=terms)
        .map(|l| {
            let y = l as f64 * CHI;
            let ln_term = match variant {
                MellinVariant::U => mf * LN_2 + ln_gamma_abs(m, y) - (mf - 1.0) * mf.ln(),
                MellinVariant::V => ln_gamma_abs(2 * m, y) - mf * 4f64.ln() - (2.0 * mf - 1.0) * mf.ln(),
            };
            ln_term.exp()
        })
        .sum();
    2.0 * one_side / LN_2
}

/// Constant term of the asymptotic expansion as stated for each form:
/// `m!/(m^(m+1) ln 2)` (U) and `(2m-1)!/(4^m m^(2m+1) ln 2)` (V).
pub fn asymptote(variant: MellinVariant, m: u64) -> f64 {
    let mf = m as f64;
    let ln = match variant {
        MellinVariant::U => ln_factorial(m) - (mf + 1.0) * mf.ln(),
        MellinVariant::V => ln_factorial(2 * m - 1) - mf * 4f64.ln() - (2.0 * mf + 1.0) * mf.ln(),
    };
    ln.exp() / LN_2
}

/// Direct evaluation of the truncated sum `k = 1 ..= r`.
pub fn harmonic_sum(variant: MellinVariant, m: u64, n: f64, r: u32) -> f64 {
    let mf = m as f64;
    (1..=r)
        .map(|k| {
            let x = n / 2f64.powi(k as i32);
            let ln_term = match variant {
                MellinVariant::U => mf * x.ln() - mf * x,
                MellinVariant::V => 2.0 * mf * x.ln() - mf * x - mf * 4f64.ln(),
            };
            ln_term.exp()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinReport {
    pub variant: MellinVariant,
    pub m: u64,
    pub n: f64,
    pub r: u32,
    pub direct_sum: f64,
    pub asymptote: f64,
    /// `fourier_amplitude(variant, m, DEFAULT_TERMS)`.
    pub amplitude_bound: f64,
    /// Amplitude scaled as it enters the sum: `/(m 2^m)` (U), `/m^2` (V).
    pub fluctuation_bound: f64,
    /// `2^m/n^m + n^m/2^(r m)`, the truncation error terms with unit constants.
    pub error_terms: f64,
    pub signed_residual: f64,
    pub residual: f64,
}

impl MellinReport {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.fluctuation_bound + self.error_terms
    }
}

pub fn mellin_check(variant: MellinVariant, m: u64, n: f64, r: u32) -> MellinReport {
    assert!(m >= 1 && r >= 1, "mellin_check needs m >= 1 and r >= 1");
    let mf = m as f64;
    let direct_sum = harmonic_sum(variant, m, n, r);
    let asymptote = asymptote(variant, m);
    let amplitude_bound = fourier_amplitude(variant, m, DEFAULT_TERMS);
    let fluctuation_bound = match variant {
        MellinVariant::U => amplitude_bound / (mf * 2f64.powi(m as i32)),
        MellinVariant::V => amplitude_bound / (mf * mf),
    };
    let error_terms = (mf * (2.0 / n).ln()).exp() + (mf * (n.ln() - r as f64 * LN_2)).exp();
    let signed_residual = direct_sum - asymptote;
    MellinReport {
        variant,
        m,
        n,
        r,
        direct_sum,
        asymptote,
        amplitude_bound,
        fluctuation_bound,
        error_terms,
        signed_residual,
        residual: signed_residual.abs(),
    }
}
