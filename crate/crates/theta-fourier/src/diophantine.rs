//! Continued-fraction classification of real coefficients.
//!
//! The regularity of `∂₁ + c∂₂ + q` with real c hinges on how well c is
//! approximated by rationals. From finite-precision input only finite
//! evidence is available: the expansion runs until the requested depth,
//! the convergent denominators outgrow what an f64 can support, or the
//! remainder drops below the rational-detection tolerance.

use serde::Serialize;

use crate::{Error, Result};

/// Remainder below this terminates the expansion as an exact rational.
pub const RATIONAL_TOL: f64 = 1e-14;

/// Convergents with q beyond this bound are dominated by f64 rounding of
/// the input and are not emitted (q² ~ 1/ε is where the noise takes over,
/// kept well clear of).
pub const RELIABLE_DENOMINATOR_CAP: i128 = 1 << 22;

/// Denominators below this are skipped by the exponent statistic; tiny-q
/// convergents produce spuriously large exponents for every real.
pub const EXPONENT_Q_FLOOR: i128 = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DiophKind {
    /// Expansion terminated: α = p/q to within [`RATIONAL_TOL`].
    Rational { p: i128, q: i128 },
    /// Partial quotients eventually periodic over the reliable range.
    QuadraticIrrationalEvidence { period: usize },
    /// Every observed approximation exponent stayed ≤ k_max.
    NonLiouvilleEvidence { k_max: f64 },
    /// Some convergent approximated α to order beyond k_max.
    LiouvilleSuspect,
}

/// Finite Diophantine evidence for a real number.
#[derive(Debug, Clone, Serialize)]
pub struct DiophantineClass {
    pub kind: DiophKind,
    pub partial_quotients: Vec<i64>,
    /// (p_m, q_m) satisfying p_m = a_m p_{m−1} + p_{m−2} exactly.
    pub convergents: Vec<(i128, i128)>,
    /// max over convergents (q ≥ [`EXPONENT_Q_FLOOR`]) of
    /// log|α − p/q| / (−log q), with |α − p/q| estimated as 1/(q_m q_{m+1}).
    pub best_exponent: f64,
}

impl DiophantineClass {
    pub fn is_rational(&self) -> bool {
        matches!(self.kind, DiophKind::Rational { .. })
    }

    /// Rational inputs are excluded; quadratic evidence counts (quadratic
    /// irrationals are badly approximable).
    pub fn is_non_liouville_evidence(&self) -> bool {
        matches!(
            self.kind,
            DiophKind::QuadraticIrrationalEvidence { .. } | DiophKind::NonLiouvilleEvidence { .. }
        )
    }
}

/// Continued-fraction expansion of α to at most `depth` partial quotients,
/// exponent statistic against `k_max`. Requires depth ≥ 5 and finite α.
pub fn classify_real(alpha: f64, depth: usize, k_max: f64) -> Result<DiophantineClass> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput("cannot classify a non-finite real".into()));
    }
    if depth < 5 {
        return Err(Error::InvalidInput(format!("depth must be >= 5, got {depth}")));
    }

    let mut quotients: Vec<i64> = Vec::new();
    let mut convergents: Vec<(i128, i128)> = Vec::new();
    let (mut p_prev, mut p_prev2) = (1i128, 0i128);
    let (mut q_prev, mut q_prev2) = (0i128, 1i128);
    let mut x = alpha;
    let mut terminated_rational = false;

    for _ in 0..depth {
        let mut a = x.floor();
        let mut frac = x - a;
        // a remainder within tolerance of 1 means the quotient rounds up
        if frac > 1.0 - RATIONAL_TOL {
            a += 1.0;
            frac = x - a;
        }
        if a.abs() > i64::MAX as f64 / 4.0 {
            break; // remainder was pure noise
        }
        let ai = a as i64;
        let p = match (ai as i128).checked_mul(p_prev).and_then(|v| v.checked_add(p_prev2)) {
            Some(v) => v,
            None => break,
        };
        let q = match (ai as i128).checked_mul(q_prev).and_then(|v| v.checked_add(q_prev2)) {
            Some(v) => v,
            None => break,
        };
        quotients.push(ai);
        convergents.push((p, q));
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;

        if frac.abs() < RATIONAL_TOL {
            terminated_rational = true;
            break;
        }
        if q > RELIABLE_DENOMINATOR_CAP {
            break;
        }
        x = 1.0 / frac;
    }

    let best_exponent = best_exponent(&convergents);

    let kind = if terminated_rational {
        let &(p, q) = convergents.last().expect("at least one convergent");
        DiophKind::Rational { p, q }
    } else if let Some(period) = periodic_tail(&quotients) {
        DiophKind::QuadraticIrrationalEvidence { period }
    } else if best_exponent <= k_max {
        DiophKind::NonLiouvilleEvidence { k_max }
    } else {
        DiophKind::LiouvilleSuspect
    };

    Ok(DiophantineClass {
        kind,
        partial_quotients: quotients,
        convergents,
        best_exponent,
    })
}

/// |α − p_m/q_m| ≈ 1/(q_m q_{m+1}), so the observed exponent at m is
/// 1 + log q_{m+1}/log q_m. Robust against the cancellation that direct
/// subtraction suffers once q_m² outgrows the f64 mantissa.
fn best_exponent(convergents: &[(i128, i128)]) -> f64 {
    let mut best = 0.0f64;
    for w in convergents.windows(2) {
        let q = w[0].1;
        let q_next = w[1].1;
        if q < EXPONENT_Q_FLOOR {
            continue;
        }
        let lq = (q as f64).ln();
        let e = 1.0 + (q_next as f64).ln() / lq;
        best = best.max(e);
    }
    best
}

/// Looks for an eventually periodic quotient pattern: preamble ≤ 3,
/// period ≤ 6, at least three full repetitions and twelve matched terms.
fn periodic_tail(quotients: &[i64]) -> Option<usize> {
    for start in 0..=3usize {
        for period in 1..=6usize {
            if quotients.len() < start + period {
                continue;
            }
            let tail = &quotients[start..];
            let matched = tail.len().saturating_sub(period);
            if matched < period.max(4) * 3 {
                continue;
            }
            if tail
                .iter()
                .zip(tail.iter().skip(period))
                .all(|(a, b)| a == b)
            {
                return Some(period);
            }
        }
    }
    None
}
