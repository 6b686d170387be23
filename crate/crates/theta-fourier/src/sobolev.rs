//! H^s norms, coefficient-decay classification, and the weighted Sobolev
//! embedding bound.

use serde::Serialize;

use crate::coeffs::CoeffTable;
use crate::fourier::analyze;
use crate::grid::SampledField;
use crate::util::{bracket, kahan_sum, ls_slope};
use crate::{Error, Result};

/// Fitted decay order above which a table counts as rapidly decaying.
pub const RAPID_ORDER_THRESHOLD: f64 = 10.0;

/// Coefficient floor: shells entirely below this count as numerically zero.
pub const COEFF_FLOOR: f64 = 1e-13;

/// ‖f‖_{H^s_{θ,T}} = (Σ ⟨ξ⟩^{2s} |f̂(ξ)|²)^{1/2} over the table's box,
/// with ⟨ξ⟩ = (1 + ‖ξ‖²)^{1/2}.
pub fn hs_norm(table: &CoeffTable, s: f64) -> f64 {
    kahan_sum(
        table
            .iter()
            .map(|(xi, v)| bracket(&xi).powf(2.0 * s) * v.norm_sqr()),
    )
    .sqrt()
}

/// Decay fit over sup-norm shells of the coefficient box.
///
/// The fitted order comes from least squares on log(max-shell-coefficient)
/// against log(shell radius). A classification from a finite box is
/// evidence, never proof, of the asymptotic statement; `finite_data_only`
/// records that.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    /// Estimated N in |f̂(ξ)| ≲ ⟨ξ⟩^{−N} (non-negative slope convention).
    pub fitted_order: f64,
    pub is_rapid: bool,
    /// (sup-norm shell radius, max |coefficient| on the shell).
    pub per_shell_max: Vec<(usize, f64)>,
    /// Always true: rapid decay is asymptotic and undecidable from a box.
    pub finite_data_only: bool,
}

pub fn decay_classify(table: &CoeffTable) -> Result<DecayReport> {
    let cutoff = table.cutoff();
    if cutoff < 8 {
        return Err(Error::InvalidInput(format!(
            "decay classification requires cutoff >= 8, got {cutoff}"
        )));
    }
    let mut per_shell_max = vec![(0usize, 0.0f64); cutoff + 1];
    for (r, slot) in per_shell_max.iter_mut().enumerate() {
        slot.0 = r;
    }
    for (xi, v) in table.iter() {
        let r = xi.iter().map(|&k| k.unsigned_abs() as usize).max().unwrap_or(0);
        let m = v.norm();
        if m > per_shell_max[r].1 {
            per_shell_max[r].1 = m;
        }
    }

    // Fit only shells with radius >= 1 and signal above the floor.
    let pts: Vec<(f64, f64)> = per_shell_max
        .iter()
        .skip(1)
        .filter(|&&(_, m)| m > COEFF_FLOOR)
        .map(|&(r, m)| ((r as f64).ln(), m.ln()))
        .collect();
    let fitted_order = if pts.len() < 2 {
        // everything beyond radius 0 is at the floor: treat as infinitely steep
        f64::INFINITY
    } else {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        -ls_slope(&xs, &ys)
    };

    let outer_floor = per_shell_max
        .iter()
        .skip(cutoff / 2)
        .all(|&(_, m)| m < COEFF_FLOOR);
    let is_rapid = fitted_order > RAPID_ORDER_THRESHOLD || outer_floor;
    Ok(DecayReport {
        fitted_order,
        is_rapid,
        per_shell_max,
        finite_data_only: true,
    })
}

/// Outcome of the pointwise embedding bound
/// |f(x)| ≤ C·‖f‖_{H^s}·∏|θ_j|^{x_j/T} with C = (Σ_box ⟨ξ⟩^{−2s})^{1/2}.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    /// max over nodes of |f(x)| / (‖f‖_{H^s}·weight(x)).
    pub max_ratio: f64,
    /// The truncated-box constant C.
    pub bound_constant: f64,
    pub hs_norm: f64,
    pub holds: bool,
}

/// Checks the embedding bound at every grid node. Requires s > n/2.
/// The constant uses the same cutoff box as the analysis, which restricts
/// the ideal inequality to exactly the modes a band-limited field can carry.
pub fn embedding_check(f: &SampledField, s: f64) -> Result<EmbeddingReport> {
    let n = f.grid().dim() as f64;
    if s.is_nan() || s <= n / 2.0 {
        return Err(Error::InvalidInput(format!(
            "embedding requires s > n/2 = {}, got {s}",
            n / 2.0
        )));
    }
    let cutoff = f.grid().samples() / 2 - 1;
    let table = analyze(f, cutoff)?;
    let norm = hs_norm(&table, s);

    let mut constant_sq = 0.0;
    for (xi, _) in table.iter() {
        constant_sq += bracket(&xi).powf(-2.0 * s);
    }
    let bound_constant = constant_sq.sqrt();

    if norm == 0.0 {
        return Ok(EmbeddingReport {
            max_ratio: 0.0,
            bound_constant,
            hs_norm: 0.0,
            holds: true,
        });
    }

    let spec = f.theta_spec();
    let logs = spec.log_theta();
    let grid = f.grid();
    let samples = grid.samples() as f64;
    let mut max_ratio = 0.0f64;
    for (idx, v) in f.values().iter().enumerate() {
        let m = grid.coords(idx);
        let mut growth = 0.0;
        for (j, l) in logs.iter().enumerate().take(grid.dim()) {
            growth += l.re * (m[j] as f64 / samples);
        }
        let ratio = v.norm() / (norm * growth.exp());
        max_ratio = max_ratio.max(ratio);
    }
    Ok(EmbeddingReport {
        max_ratio,
        bound_constant,
        hs_norm: norm,
        holds: max_ratio <= bound_constant * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::synthesize;
    use crate::grid::GridSpec;
    use crate::theta::ThetaSpec;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hs_norm_singletons() {
        let spec = ThetaSpec::unit(1, 1.0).unwrap();
        for s in [-1.0, 0.0, 0.5, 2.0] {
            let t = CoeffTable::single_mode(spec.clone(), 4, &[0], c(1.0, 0.0)).unwrap();
            assert!((hs_norm(&t, s) - 1.0).abs() < 1e-15, "s={s}");
        }
        // {ξ₀→1}: norm = ⟨ξ₀⟩^s
        let t = CoeffTable::single_mode(spec.clone(), 4, &[3], c(1.0, 0.0)).unwrap();
        for s in [1.0, 2.5] {
            assert!((hs_norm(&t, s) - 10.0f64.sqrt().powf(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn h0_equals_l2() {
        let spec = ThetaSpec::scalar(c(2.0, 0.3), 1.0).unwrap();
        let mut t = CoeffTable::zeros(spec, 5).unwrap();
        for xi in -5i64..=5 {
            t.set(&[xi], c(0.1 * xi as f64, 0.3)).unwrap();
        }
        assert!((hs_norm(&t, 0.0) - t.l2_norm()).abs() < 1e-13);
    }

    #[test]
    fn hs_monotone_in_s() {
        let spec = ThetaSpec::unit(2, 1.0).unwrap();
        let mut t = CoeffTable::zeros(spec, 3).unwrap();
        for xi1 in -3i64..=3 {
            for xi2 in -3i64..=3 {
                t.set(&[xi1, xi2], c(1.0 / (1.0 + (xi1 * xi1 + xi2 * xi2) as f64), 0.0))
                    .unwrap();
            }
        }
        let mut prev = hs_norm(&t, -2.0);
        for s in [-1.0, 0.0, 1.0, 2.0, 3.0] {
            let cur = hs_norm(&t, s);
            assert!(cur >= prev - 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn decay_constructed_inverse_square() {
        // f̂(ξ) = ⟨ξ⟩^{-2}: fitted order ≈ 2 (within 0.3)
        let spec = ThetaSpec::unit(1, 1.0).unwrap();
        let mut t = CoeffTable::zeros(spec, 16).unwrap();
        for xi in -16i64..=16 {
            t.set(&[xi], c(1.0 / (1.0 + (xi * xi) as f64).sqrt().powi(2), 0.0))
                .unwrap();
        }
        let r = decay_classify(&t).unwrap();
        assert!((r.fitted_order - 2.0).abs() < 0.3, "order = {}", r.fitted_order);
        assert!(!r.is_rapid);
        assert!(r.finite_data_only);
    }

    #[test]
    fn decay_flat_table() {
        let spec = ThetaSpec::unit(1, 1.0).unwrap();
        let mut t = CoeffTable::zeros(spec, 8).unwrap();
        for xi in -8i64..=8 {
            t.set(&[xi], c(1.0, 0.0)).unwrap();
        }
        let r = decay_classify(&t).unwrap();
        assert!(r.fitted_order.abs() < 0.05);
        assert!(!r.is_rapid);
    }

    #[test]
    fn decay_smooth_field_is_rapid() {
        // coefficients of a synthesized smooth (low-band) field
        let spec = ThetaSpec::scalar(c(1.3, 0.2), 2.0).unwrap();
        let mut t = CoeffTable::zeros(spec.clone(), 3).unwrap();
        t.set(&[0], c(1.0, 0.0)).unwrap();
        t.set(&[1], c(0.5, 0.2)).unwrap();
        t.set(&[-2], c(0.1, -0.1)).unwrap();
        let f = synthesize(&t, GridSpec::new(1, 64).unwrap()).unwrap();
        let table = analyze(&f, 16).unwrap();
        let r = decay_classify(&table).unwrap();
        assert!(r.is_rapid);
    }

    #[test]
    fn decay_requires_enough_shells() {
        let spec = ThetaSpec::unit(1, 1.0).unwrap();
        let t = CoeffTable::zeros(spec, 4).unwrap();
        assert!(decay_classify(&t).is_err());
    }

    #[test]
    fn embedding_sine() {
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(spec, 64, |x| c(x[0].sin(), 0.0)).unwrap();
        let r = embedding_check(&f, 1.0).unwrap();
        assert!(r.holds);
        assert!(r.max_ratio <= r.bound_constant);
    }

    #[test]
    fn embedding_weight_cancels_growth() {
        // {0→1}, θ=2, T=1, s=1: |2^x| = weight·‖f‖, so the ratio is ≡ 1
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let t = CoeffTable::single_mode(spec, 4, &[0], c(1.0, 0.0)).unwrap();
        let f = synthesize(&t, GridSpec::new(1, 64).unwrap()).unwrap();
        let r = embedding_check(&f, 1.0).unwrap();
        assert!(r.holds);
        assert!((r.max_ratio - 1.0).abs() < 1e-10);
        // constant-in-x ratio: check a few nodes directly
        let norm = r.hs_norm;
        for idx in [0usize, 13, 40] {
            let x = f.grid().node(idx, 1.0)[0];
            let ratio = f.value(idx).norm() / (norm * 2.0f64.powf(x));
            assert!((ratio - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn embedding_zero_field() {
        let spec = ThetaSpec::unit(2, 1.0).unwrap();
        let f = SampledField::from_fn(spec, 16, |_| c(0.0, 0.0)).unwrap();
        let r = embedding_check(&f, 1.5).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn embedding_rejects_low_s() {
        let spec = ThetaSpec::unit(2, 1.0).unwrap();
        let f = SampledField::from_fn(spec, 16, |_| c(1.0, 0.0)).unwrap();
        assert!(embedding_check(&f, 1.0).is_err());
        assert!(embedding_check(&f, 1.5).is_ok());
    }
}
