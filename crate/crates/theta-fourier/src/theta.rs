//! The ambient (θ,T)-periodic structure: multipliers, period, log branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Smallest admissible |θ_j|. Below this the exponential weights degenerate.
pub const MIN_THETA_MODULUS: f64 = 1e-300;

/// Relative tolerance for the exp∘log consistency invariant.
pub const LOG_CONSISTENCY_TOL: f64 = 1e-12;

/// Multiplier vector θ ∈ (C∖{0})ⁿ, period T > 0, and a fixed logarithm
/// branch per component: log(θ_j) = Log(θ_j) + 2πi·k_j with Log the
/// principal value, Arg ∈ (−π, π].
///
/// Immutable after construction; cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpec {
    theta: Vec<Complex64>,
    period: f64,
    log_branch: Vec<i64>,
}

impl ThetaSpec {
    /// Principal-branch spec (all branch offsets zero).
    pub fn new(theta: Vec<Complex64>, period: f64) -> Result<Self> {
        let branch = vec![0; theta.len()];
        Self::with_branch(theta, period, branch)
    }

    pub fn with_branch(theta: Vec<Complex64>, period: f64, log_branch: Vec<i64>) -> Result<Self> {
        let n = theta.len();
        if n == 0 || n > 2 {
            return Err(Error::InvalidTheta(format!(
                "dimension must be 1 or 2, got {n}"
            )));
        }
        if log_branch.len() != n {
            return Err(Error::InvalidTheta(format!(
                "branch vector length {} does not match dimension {n}",
                log_branch.len()
            )));
        }
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::InvalidTheta(format!("period must be positive, got {period}")));
        }
        for (j, t) in theta.iter().enumerate() {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::InvalidTheta(format!("theta[{j}] is not finite")));
            }
            if t.norm() < MIN_THETA_MODULUS {
                return Err(Error::InvalidTheta(format!(
                    "theta[{j}] modulus {} below {MIN_THETA_MODULUS}",
                    t.norm()
                )));
            }
        }
        let spec = ThetaSpec {
            theta,
            period,
            log_branch,
        };
        // exp∘log must reproduce θ; guards against degenerate moduli.
        for (j, (&t, l)) in spec.theta.iter().zip(spec.log_theta()).enumerate() {
            let back = l.exp();
            if (back - t).norm() > LOG_CONSISTENCY_TOL * t.norm() {
                return Err(Error::InvalidTheta(format!(
                    "exp(log theta[{j}])) = {back} does not reproduce {t}"
                )));
            }
        }
        Ok(spec)
    }

    /// Convenience: scalar (n = 1) structure.
    pub fn scalar(theta: Complex64, period: f64) -> Result<Self> {
        Self::new(vec![theta], period)
    }

    /// Convenience: the ordinary 2π-periodic structure in dimension n.
    pub fn unit(n: usize, period: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(1.0, 0.0); n], period)
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn theta(&self) -> &[Complex64] {
        &self.theta
    }

    pub fn log_branch(&self) -> &[i64] {
        &self.log_branch
    }

    /// Branch-adjusted logarithms log(θ_j) = ln|θ_j| + i(Arg θ_j + 2π k_j).
    pub fn log_theta(&self) -> Vec<Complex64> {
        self.theta
            .iter()
            .zip(&self.log_branch)
            .map(|(t, &k)| Complex64::new(t.norm().ln(), t.arg() + 2.0 * PI * k as f64))
            .collect()
    }

    /// Same θ with branch offsets incremented by `k`. θ itself never changes.
    pub fn shift_log_branch(&self, k: &[i64]) -> Result<Self> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "branch shift length {} vs dimension {}",
                k.len(),
                self.dim()
            )));
        }
        let branch = self
            .log_branch
            .iter()
            .zip(k)
            .map(|(&b, &dk)| b + dk)
            .collect();
        Self::with_branch(self.theta.clone(), self.period, branch)
    }

    /// ∏_j θ_j^{m_j} for integer exponents. Branch-independent because
    /// e^{2πi·k·m} = 1, so only the principal argument enters.
    pub fn theta_int_pow(&self, m: &[i64]) -> Complex64 {
        debug_assert_eq!(m.len(), self.dim());
        let principal: f64 = self
            .theta
            .iter()
            .zip(m)
            .map(|(t, &mj)| t.arg() * mj as f64)
            .sum();
        let modulus: f64 = self
            .theta
            .iter()
            .zip(m)
            .map(|(t, &mj)| t.norm().ln() * mj as f64)
            .sum();
        Complex64::from_polar(modulus.exp(), principal)
    }

    /// Structure with multipliers θ_j^{s} for s = ±1, with branch chosen so
    /// that log(θ_j^s) = s·log(θ_j) exactly. Used by the dilation rule.
    pub fn power_sign(&self, sign: i64, period: f64) -> Result<Self> {
        debug_assert!(sign == 1 || sign == -1);
        if sign == 1 {
            return Self::with_branch(self.theta.clone(), period, self.log_branch.clone());
        }
        let theta_new: Vec<Complex64> = self.theta.iter().map(|t| Complex64::new(1.0, 0.0) / t).collect();
        let logs = self.log_theta();
        let branch: Vec<i64> = theta_new
            .iter()
            .zip(&logs)
            .map(|(t, l)| {
                let target_im = -l.im;
                ((target_im - t.arg()) / (2.0 * PI)).round() as i64
            })
            .collect();
        Self::with_branch(theta_new, period, branch)
    }

    /// True when every |θ_j| = 1 and the θ structure is plain 2π-style
    /// periodicity under the stored branch (log θ = 0 exactly).
    pub fn is_trivial(&self) -> bool {
        self.log_theta().iter().all(|l| l.norm() < 1e-15)
    }
}

/// Wire format: `{"theta": [[re,im],...], "T": real, "log_branch": [int,...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaSpecWire {
    theta: Vec<[f64; 2]>,
    #[serde(rename = "T")]
    period: f64,
    log_branch: Vec<i64>,
}

impl Serialize for ThetaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ThetaSpecWire {
            theta: self.theta.iter().map(|t| [t.re, t.im]).collect(),
            period: self.period,
            log_branch: self.log_branch.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ThetaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ThetaSpecWire::deserialize(d)?;
        ThetaSpec::with_branch(
            wire.theta
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
            wire.period,
            wire.log_branch,
        )
        .map_err(serde::de::Error::custom)
    }
}
