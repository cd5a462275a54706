//! Round-count, running-time and awake-time bounds.

use serde::{Deserialize, Serialize};

use crate::protocols::{ElectionParams, ProtocolKind, CEIL_GUARD};
use crate::{Error, Result};

/// Per-round success lower bound of the strong-model protocol past `j*`.
pub const P1_STAR: f64 = 0.14846;
/// Per-round success lower bound of the weak-model protocol past `j*`.
pub const P2_STAR: f64 = 0.07929;

/// Tuned growth factors minimising [`cost_c`] at `P1_STAR` and `P2_STAR`.
pub const ALPHA1_TUNED: f64 = 1.0767;
pub const ALPHA2_TUNED: f64 = 1.0404;

pub fn p_star(protocol: ProtocolKind) -> f64 {
    match protocol {
        ProtocolKind::Alg1Strong => P1_STAR,
        ProtocolKind::Alg2Weak => P2_STAR,
    }
}

pub fn tuned_alpha(protocol: ProtocolKind) -> f64 {
    match protocol {
        ProtocolKind::Alg1Strong => ALPHA1_TUNED,
        ProtocolKind::Alg2Weak => ALPHA2_TUNED,
    }
}

/// Awake-time coefficient in front of `log_alpha log2 n` claimed for each
/// protocol. For the weak protocol this is a reference value only; the
/// engine measures the actual per-round constant.
pub fn awake_coefficient(protocol: ProtocolKind) -> f64 {
    match protocol {
        ProtocolKind::Alg1Strong => 2.0,
        ProtocolKind::Alg2Weak => 2.5,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::Domain(format!("alpha must be > 1, got {alpha}")));
    }
    Ok(())
}

/// `log_alpha(log2 n)`, the real number behind `j*`.
pub fn log_alpha_log2(n: u64, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2 stations, got {n}")));
    }
    check_alpha(alpha)?;
    Ok((n as f64).log2().ln() / alpha.ln())
}

/// `j* = ceil(log_alpha log2 n)` with the same ceiling guard as the
/// inner-loop length.
pub fn j_star(n: u64, alpha: f64) -> Result<u64> {
    let x = log_alpha_log2(n, alpha)?;
    Ok((x - CEIL_GUARD).ceil().max(0.0) as u64)
}

/// Largest `alpha` for which the expected-time sum converges: `1/(1 - p)`.
pub fn alpha_sup(p_star: f64) -> f64 {
    1.0 / (1.0 - p_star)
}

/// `C(x, y) = x y^3 / ((y - 1)(1 - y(1 - x)))`.
pub fn cost_c(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x must lie in (0, 1), got {x}")));
    }
    if y.is_nan() || y <= 1.0 || y * (1.0 - x) >= 1.0 {
        return Err(Error::Boundary {
            alpha: y,
            sup: alpha_sup(x),
        });
    }
    Ok(x * y.powi(3) / ((y - 1.0) * (1.0 - y * (1.0 - x))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalAlpha {
    pub alpha: f64,
    pub cost: f64,
}

/// Minimises `C(p_star, .)` over `(1, 1/(1 - p_star))` by golden-section
/// search, after checking on a sample grid that the function is unimodal.
pub fn optimal_alpha(p_star: f64, tol: f64) -> Result<OptimalAlpha> {
    if !(p_star > 0.0 && p_star < 1.0) {
        return Err(Error::Domain(format!("p_star must lie in (0, 1), got {p_star}")));
    }
    let sup = alpha_sup(p_star);
    let width = sup - 1.0;
    let f = |y: f64| cost_c(p_star, y).unwrap_or(f64::INFINITY);

    // C blows up at both ends, so trim a relative sliver off each.
    let (lo, hi) = (1.0 + width * 1e-9, sup - width * 1e-9);
    let samples: Vec<f64> = (0..=512).map(|i| f(lo + (hi - lo) * i as f64 / 512.0)).collect();
    let argmin = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let descending = samples[..=argmin].windows(2).all(|w| w[1] <= w[0]);
    let ascending = samples[argmin..].windows(2).all(|w| w[1] >= w[0]);
    if !(descending && ascending) {
        return Err(Error::Domain(format!(
            "C({p_star}, .) is not unimodal on the sample grid"
        )));
    }

    let step = (hi - lo) / 512.0;
    let mut a = (lo + step * argmin.saturating_sub(1) as f64).max(lo);
    let mut b = (lo + step * (argmin + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol.max(f64::EPSILON) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let alpha = 0.5 * (a + b);
    Ok(OptimalAlpha { alpha, cost: f(alpha) })
}

/// Expected-time bound `sum_{k>=1} sum_{j=1}^{j*+k} (1 + alpha^j) p (1-p)^(k-1)`.
///
/// The inner sum has the closed form `J + alpha (alpha^J - 1)/(alpha - 1)`.
/// Summation stops once a geometric bound on the remaining tail falls below
/// `1e-12` of the running total.
pub fn expected_time_sum(j_star: u64, alpha: f64, p_star: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let ratio = alpha * (1.0 - p_star);
    if ratio >= 1.0 {
        return Err(Error::Boundary {
            alpha,
            sup: alpha_sup(p_star),
        });
    }
    let inner = |big_j: u64| big_j as f64 + alpha * (alpha.powf(big_j as f64) - 1.0) / (alpha - 1.0);
    let mut total = 0.0;
    let mut geom = p_star;
    for k in 1u64.. {
        let term = inner(j_star + k) * geom;
        total += term;
        geom *= 1.0 - p_star;
        // inner(J+1)/inner(J) decreases towards alpha, so the current term
        // ratio bounds all later ones.
        let r = (1.0 - p_star) * inner(j_star + k + 1) / inner(j_star + k);
        if r < 1.0 && term * r / (1.0 - r) < 1e-12 * total {
            break;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryBounds {
    pub protocol: ProtocolKind,
    pub n: u64,
    pub alpha: f64,
    pub p_star: f64,
    pub j_star: u64,
    pub alpha_sup: f64,
    pub c_value: f64,
    /// `j* + 1/p*`.
    pub expected_rounds_bound: f64,
    /// Double sum bounding the expected number of inner-loop slots.
    pub expected_time_bound: f64,
    /// `C(p*, alpha) log2 n`, the leading term of the time bound.
    pub leading_time_term: f64,
    pub awake_coeff: f64,
    /// `awake_coeff * log_alpha log2 n`.
    pub awake_bound: f64,
}

pub fn theory_bounds(params: &ElectionParams, protocol: ProtocolKind, p_star: f64) -> Result<TheoryBounds> {
    params.validate()?;
    let n = params.n as u64;
    let alpha = params.alpha;
    let sup = alpha_sup(p_star);
    if alpha >= sup {
        return Err(Error::Boundary { alpha, sup });
    }
    let js = j_star(n, alpha)?;
    let c_value = cost_c(p_star, alpha)?;
    let awake_coeff = awake_coefficient(protocol);
    Ok(TheoryBounds {
        protocol,
        n,
        alpha,
        p_star,
        j_star: js,
        alpha_sup: sup,
        c_value,
        expected_rounds_bound: js as f64 + 1.0 / p_star,
        expected_time_bound: expected_time_sum(js, alpha, p_star)?,
        leading_time_term: c_value * (n as f64).log2(),
        awake_coeff,
        awake_bound: awake_coeff * log_alpha_log2(n, alpha)?,
    })
}
