//! Coefficients of the nonuniform exponential basis, synthesis, and the
//! symmetry/inequality toolkit.
//!
//! f̂(ξ) is the classical Fourier coefficient of the conjugated field Ω f,
//! computed by FFT of the conjugated samples (spectrally accurate because
//! Ω f is smooth and 2π-periodic). Synthesis evaluates
//! f(x) = Σ_ξ f̂(ξ) e^{i(2π/T)x·(ξ − i log(θ)/2π)} at the grid nodes.

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::CoeffTable;
use crate::fft::fft_nd;
use crate::grid::{GridSpec, SampledField};
use crate::transform::{k_constants, lp_norm, omega_forward, plain_lp_norm};
use crate::{Error, Result};

/// Squared-energy fraction of the outermost coefficient shell; above this
/// the cutoff is considered to be clipping real signal.
pub const ALIASING_TAIL_TOL: f64 = 1e-10;

/// Side information from an analysis pass.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumInfo {
    /// Energy fraction carried by the shell max_j|ξ_j| = Ξ.
    pub tail_fraction: f64,
    /// True when `tail_fraction` exceeds [`ALIASING_TAIL_TOL`].
    pub aliasing_warning: bool,
}

fn nyquist_cutoff_check(samples: usize, cutoff: usize) -> Result<()> {
    let limit = samples / 2 - 1;
    if cutoff == 0 {
        return Err(Error::InvalidInput("cutoff must be positive".into()));
    }
    if cutoff > limit {
        return Err(Error::CutoffBeyondNyquist {
            cutoff,
            limit,
            samples,
        });
    }
    Ok(())
}

/// Fourier coefficients for all |ξ_j| ≤ Ξ, Ξ ≤ N/2 − 1.
pub fn analyze(f: &SampledField, cutoff: usize) -> Result<CoeffTable> {
    analyze_with_info(f, cutoff).map(|(t, _)| t)
}

/// Like [`analyze`], also reporting the outer-shell energy fraction so
/// callers can flag aliasing.
pub fn analyze_with_info(f: &SampledField, cutoff: usize) -> Result<(CoeffTable, SpectrumInfo)> {
    let grid = f.grid();
    nyquist_cutoff_check(grid.samples(), cutoff)?;
    let conj = omega_forward(f)?;
    let mut spectrum = conj.values().to_vec();
    fft_nd(&mut spectrum, grid.dim(), grid.samples(), false);
    let scale = 1.0 / grid.len() as f64;
    let n = grid.samples() as i64;

    let mut table = CoeffTable::zeros(f.theta_spec().clone(), cutoff)?;
    let c = cutoff as i64;
    match grid.dim() {
        1 => {
            for xi in -c..=c {
                let k = xi.rem_euclid(n) as usize;
                table.set(&[xi], spectrum[k] * scale)?;
            }
        }
        _ => {
            for xi1 in -c..=c {
                let k1 = xi1.rem_euclid(n) as usize;
                for xi2 in -c..=c {
                    let k2 = xi2.rem_euclid(n) as usize;
                    table.set(&[xi1, xi2], spectrum[k1 * grid.samples() + k2] * scale)?;
                }
            }
        }
    }
    let tail = table.outer_shell_fraction();
    Ok((
        table,
        SpectrumInfo {
            tail_fraction: tail,
            aliasing_warning: tail > ALIASING_TAIL_TOL,
        },
    ))
}

/// Evaluate the table's finite series at the nodes of `grid`. Exact
/// left-inverse of [`analyze`] for band-limited fields. Modes beyond the
/// grid's Nyquist range wrap, which matches pointwise evaluation of the
/// underlying function at the nodes.
pub fn synthesize(table: &CoeffTable, grid: GridSpec) -> Result<SampledField> {
    if grid.dim() != table.dim() {
        return Err(Error::DimensionMismatch(format!(
            "grid dimension {} vs table dimension {}",
            grid.dim(),
            table.dim()
        )));
    }
    let n = grid.samples();
    let mut bins = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (xi, v) in table.iter() {
        let k: Vec<usize> = xi.iter().map(|&q| q.rem_euclid(n as i64) as usize).collect();
        let idx = match grid.dim() {
            1 => k[0],
            _ => k[0] * n + k[1],
        };
        bins[idx] += v;
    }
    fft_nd(&mut bins, grid.dim(), n, true);

    // restore the weight e^{x·log θ/T} node by node
    let spec = table.theta_spec();
    let logs = spec.log_theta();
    let values: Vec<Complex64> = bins
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let m = grid.coords(idx);
            let mut e = Complex64::new(0.0, 0.0);
            for (j, l) in logs.iter().enumerate() {
                e += l * (m[j] as f64 / n as f64);
            }
            e.exp() * v
        })
        .collect();
    SampledField::from_values(spec.clone(), grid, values)
}

/// Coefficient rule for ∂_{x_j}: multiply each entry by
/// (2π/T)·i·(ξ_j − i·log(θ_j)/2π).
pub fn derivative_coeffs(table: &CoeffTable, axis: usize) -> CoeffTable {
    let spec = table.theta_spec();
    let log_j = spec.log_theta()[axis];
    let factor = 2.0 * std::f64::consts::PI / spec.period();
    table.map_modes(|xi, v| {
        let mode = Complex64::new(xi[axis] as f64, 0.0) - Complex64::new(0.0, 1.0) * log_j
            / (2.0 * std::f64::consts::PI);
        v * Complex64::new(0.0, factor) * mode
    })
}

/// The three index/phase symmetries on tables.
#[derive(Debug, Clone)]
pub enum SymmetryOp {
    /// Multiply by e^{i(2π/T)x·ξ₀}: entries shift by ξ₀.
    Modulate(Vec<i64>),
    /// Translate the function by a: entry ξ picks up
    /// e^{i(2π/T)a·(ξ − i log(θ)/2π)}.
    Translate(Vec<f64>),
    /// Dilate x ↦ kx: entry ξ comes from sign(k)·ξ; the output lives in
    /// the (θ^{sign k}, T/|k|) structure.
    Dilate(i64),
}

/// Result of a symmetry application; `dropped` counts modulated entries
/// shifted off the cutoff box.
#[derive(Debug, Clone)]
pub struct SymmetryResult {
    pub table: CoeffTable,
    pub dropped: usize,
}

impl SymmetryResult {
    pub fn truncated(&self) -> bool {
        self.dropped > 0
    }
}

pub fn apply_symmetry(table: &CoeffTable, op: &SymmetryOp) -> Result<SymmetryResult> {
    match op {
        SymmetryOp::Modulate(xi0) => {
            if xi0.len() != table.dim() {
                return Err(Error::DimensionMismatch("modulation index dimension".into()));
            }
            let mut out = CoeffTable::zeros(table.theta_spec().clone(), table.cutoff())?;
            let mut dropped = 0usize;
            for (xi, v) in table.iter() {
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let target: Vec<i64> = xi.iter().zip(xi0).map(|(&a, &b)| a + b).collect();
                if out.contains(&target) {
                    out.set(&target, v)?;
                } else {
                    dropped += 1;
                }
            }
            Ok(SymmetryResult { table: out, dropped })
        }
        SymmetryOp::Translate(a) => {
            if a.len() != table.dim() {
                return Err(Error::DimensionMismatch("translation vector dimension".into()));
            }
            let spec = table.theta_spec();
            let logs = spec.log_theta();
            let factor = 2.0 * std::f64::consts::PI / spec.period();
            let out = table.map_modes(|xi, v| {
                let mut phase = Complex64::new(0.0, 0.0);
                for j in 0..xi.len() {
                    let mode = Complex64::new(xi[j] as f64, 0.0)
                        - Complex64::new(0.0, 1.0) * logs[j] / (2.0 * std::f64::consts::PI);
                    phase += Complex64::new(0.0, factor * a[j]) * mode;
                }
                v * phase.exp()
            });
            Ok(SymmetryResult { table: out, dropped: 0 })
        }
        SymmetryOp::Dilate(k) => {
            if *k == 0 {
                return Err(Error::InvalidInput("dilation factor must be nonzero".into()));
            }
            let sign = k.signum();
            let spec = table.theta_spec();
            let new_spec = spec.power_sign(sign, spec.period() / k.unsigned_abs() as f64)?;
            let mut out = CoeffTable::zeros(new_spec, table.cutoff())?;
            for (xi, _) in table.iter() {
                let src: Vec<i64> = xi.iter().map(|&q| sign * q).collect();
                out.set(&xi, table.get(&src))?;
            }
            Ok(SymmetryResult { table: out, dropped: 0 })
        }
    }
}

/// Report for the L¹ inequality chain
/// max_ξ|f̂(ξ)| ≤ ‖f‖_{L¹_{θ,T}} ≤ K_min⁻¹·‖f‖ on the plain cell.
#[derive(Debug, Clone, Serialize)]
pub struct L1BoundReport {
    pub coeff_max: f64,
    pub weighted_l1: f64,
    pub plain_l1: f64,
    pub weighted_bound: f64,
    pub first_holds: bool,
    pub second_holds: bool,
    pub holds: bool,
}

pub fn l1_bound_check(f: &SampledField) -> Result<L1BoundReport> {
    let cutoff = f.grid().samples() / 2 - 1;
    let table = analyze(f, cutoff)?;
    let coeff_max = table.max_abs();
    let weighted_l1 = lp_norm(f, 1.0)?;
    let plain_l1 = plain_lp_norm(f, 1.0)?;
    let k = k_constants(f.theta_spec());
    let weighted_bound = plain_l1 / k.k_min;
    let slack = 1e-12 * (1.0 + weighted_bound);
    let first_holds = coeff_max <= weighted_l1 + slack;
    let second_holds = weighted_l1 <= weighted_bound + slack;
    Ok(L1BoundReport {
        coeff_max,
        weighted_l1,
        plain_l1,
        weighted_bound,
        first_holds,
        second_holds,
        holds: first_holds && second_holds,
    })
}

/// Report for the Plancherel identity and the K sandwich.
#[derive(Debug, Clone, Serialize)]
pub struct PlancherelReport {
    pub coeff_l2: f64,
    pub weighted_l2: f64,
    pub plain_l2: f64,
    pub k_min: f64,
    pub k_max: f64,
    /// |coeff_l2 − weighted_l2| within 1e-9·(1 + coeff_l2).
    pub identity_holds: bool,
    /// K_min·coeff_l2 ≤ plain_l2 ≤ K_max·coeff_l2.
    pub sandwich_holds: bool,
    pub aliasing_warning: bool,
    pub tail_fraction: f64,
}

pub fn plancherel_check(f: &SampledField) -> Result<PlancherelReport> {
    let cutoff = f.grid().samples() / 2 - 1;
    let (table, info) = analyze_with_info(f, cutoff)?;
    let coeff_l2 = table.l2_norm();
    let weighted_l2 = lp_norm(f, 2.0)?;
    let plain_l2 = plain_lp_norm(f, 2.0)?;
    let k = k_constants(f.theta_spec());
    let slack = 1e-12 * (1.0 + plain_l2);
    Ok(PlancherelReport {
        coeff_l2,
        weighted_l2,
        plain_l2,
        k_min: k.k_min,
        k_max: k.k_max,
        identity_holds: (coeff_l2 - weighted_l2).abs() <= 1e-9 * (1.0 + coeff_l2),
        sandwich_holds: k.k_min * coeff_l2 <= plain_l2 + slack
            && plain_l2 <= k.k_max * coeff_l2 + slack,
        aliasing_warning: info.aliasing_warning,
        tail_fraction: info.tail_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::ThetaSpec;
    use crate::util::kahan_sum_complex;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Slow oracle: direct quadrature of (1/(2π)ⁿ)∫ Ω f(y) e^{−iy·ξ} dy on
    /// the same grid, no FFT involved.
    fn direct_coeff(f: &SampledField, xi: &[i64]) -> Complex64 {
        let conj = omega_forward(f).unwrap();
        let grid = f.grid();
        let n = grid.samples() as f64;
        let sum = kahan_sum_complex(conj.values().iter().enumerate().map(|(idx, &v)| {
            let m = grid.coords(idx);
            let mut phase = 0.0;
            for (j, &q) in xi.iter().enumerate() {
                phase -= 2.0 * PI * (m[j] as f64) * (q as f64) / n;
            }
            v * Complex64::from_polar(1.0, phase)
        }));
        sum / grid.len() as f64
    }

    #[test]
    fn classical_single_mode() {
        // θ=1, T=2π, f=e^{ix}: f̂(1)=1, everything else 0
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(spec, 64, |x| Complex64::from_polar(1.0, x[0])).unwrap();
        let table = analyze(&f, 16).unwrap();
        for (xi, v) in table.iter() {
            let expect = if xi[0] == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - expect).norm() < 1e-12, "xi={xi:?} v={v}");
        }
    }

    #[test]
    fn doubling_field_is_mode_zero() {
        // θ=2, T=1, f=2^x: f̂(0)=1, rest 0
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let f = SampledField::from_fn(spec, 64, |x| c(2.0f64.powf(x[0]), 0.0)).unwrap();
        let table = analyze(&f, 16).unwrap();
        for (xi, v) in table.iter() {
            let expect = if xi[0] == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - expect).norm() < 1e-12, "xi={xi:?} v={v}");
        }
    }

    #[test]
    fn antiperiodic_half_mode() {
        // θ=−1, T=2π, f=e^{ix/2}: under the principal log, f̂(0)=1
        let spec = ThetaSpec::scalar(c(-1.0, 0.0), 2.0 * PI).unwrap();
        let f =
            SampledField::from_fn(spec, 64, |x| Complex64::from_polar(1.0, x[0] / 2.0)).unwrap();
        let table = analyze(&f, 16).unwrap();
        assert!((table.get(&[0]) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((table.get(&[1])).norm() < 1e-12);
        assert!((table.get(&[-1])).norm() < 1e-12);
    }

    #[test]
    fn fft_matches_direct_quadrature_oracle() {
        let spec = ThetaSpec::new(vec![c(1.5, 0.4), c(0.7, 0.0)], 1.1).unwrap();
        let f = SampledField::from_fn(spec, 16, |x| {
            c(
                (2.0 * PI * x[0] / 1.1).cos() + 0.3,
                (4.0 * PI * x[1] / 1.1).sin(),
            )
        })
        .unwrap();
        let table = analyze(&f, 5).unwrap();
        for xi in [[0i64, 0], [1, 0], [-2, 3], [5, -5], [0, -1]] {
            let direct = direct_coeff(&f, &xi);
            assert!(
                (table.get(&xi) - direct).norm() < 1e-12,
                "xi={xi:?}: {} vs {direct}",
                table.get(&xi)
            );
        }
    }

    #[test]
    fn cutoff_beyond_nyquist_rejected() {
        let spec = ThetaSpec::unit(1, 1.0).unwrap();
        let f = SampledField::from_fn(spec, 16, |_| c(1.0, 0.0)).unwrap();
        assert!(analyze(&f, 7).is_ok());
        assert!(matches!(
            analyze(&f, 8),
            Err(Error::CutoffBeyondNyquist { .. })
        ));
    }

    #[test]
    fn synthesize_doubling_from_single_mode() {
        // table {0→1}, θ=2, T=1 -> samples of 2^x
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let table = CoeffTable::single_mode(spec, 4, &[0], c(1.0, 0.0)).unwrap();
        let grid = GridSpec::new(1, 32).unwrap();
        let f = synthesize(&table, grid).unwrap();
        for idx in 0..32 {
            let x = grid.node(idx, 1.0)[0];
            assert!((f.value(idx) - c(2.0f64.powf(x), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesize_constant() {
        let spec = ThetaSpec::unit(2, 2.0).unwrap();
        let table = CoeffTable::single_mode(spec, 3, &[0, 0], c(1.0, 0.0)).unwrap();
        let grid = GridSpec::new(2, 8).unwrap();
        let f = synthesize(&table, grid).unwrap();
        for v in f.values() {
            assert!((v - c(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn analyze_synthesize_round_trip() {
        let spec = ThetaSpec::new(vec![c(-0.8, 0.2)], 2.4).unwrap();
        let mut table = CoeffTable::zeros(spec.clone(), 6).unwrap();
        // deterministic pseudo-random band-limited data
        let mut state = 11u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        for xi in -6i64..=6 {
            table.set(&[xi], c(next(), next())).unwrap();
        }
        let grid = GridSpec::new(1, 64).unwrap();
        let f = synthesize(&table, grid).unwrap();
        let back = analyze(&f, 6).unwrap();
        for (xi, v) in table.iter() {
            assert!((back.get(&xi) - v).norm() < 1e-10, "xi={xi:?}");
        }
        let again = synthesize(&back, grid).unwrap();
        for (a, b) in f.values().iter().zip(again.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn derivative_rule_examples() {
        // θ=1, T=2π: {1→1} -> {1→i}
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        let t = CoeffTable::single_mode(spec, 2, &[1], c(1.0, 0.0)).unwrap();
        let d = derivative_coeffs(&t, 0);
        assert!((d.get(&[1]) - c(0.0, 1.0)).norm() < 1e-14);

        // θ=e, T=2π: {0→1} -> {0→1/2π}
        let spec = ThetaSpec::scalar(c(1.0f64.exp(), 0.0), 2.0 * PI).unwrap();
        let t = CoeffTable::single_mode(spec, 2, &[0], c(1.0, 0.0)).unwrap();
        let d = derivative_coeffs(&t, 0);
        assert!((d.get(&[0]) - c(1.0 / (2.0 * PI), 0.0)).norm() < 1e-14);

        // θ=2, T=1: {0→1} -> {0→ln2}
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let t = CoeffTable::single_mode(spec, 2, &[0], c(1.0, 0.0)).unwrap();
        let d = derivative_coeffs(&t, 0);
        assert!((d.get(&[0]) - c(2.0f64.ln(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn modulation_shifts_indices() {
        let spec = ThetaSpec::unit(1, 1.0).unwrap();
        let t = CoeffTable::single_mode(spec, 2, &[0], c(1.0, 0.0)).unwrap();
        let r = apply_symmetry(&t, &SymmetryOp::Modulate(vec![1])).unwrap();
        assert!(!r.truncated());
        assert!((r.table.get(&[1]) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.table.get(&[0]), c(0.0, 0.0));

        // shifting off the box raises the flag
        let t2 = CoeffTable::single_mode(ThetaSpec::unit(1, 1.0).unwrap(), 2, &[2], c(1.0, 0.0))
            .unwrap();
        let r2 = apply_symmetry(&t2, &SymmetryOp::Modulate(vec![1])).unwrap();
        assert!(r2.truncated());
        assert_eq!(r2.dropped, 1);
    }

    #[test]
    fn whole_period_translation_scales_by_theta() {
        let theta = c(1.7, -0.6);
        let spec = ThetaSpec::scalar(theta, 0.9).unwrap();
        let mut t = CoeffTable::zeros(spec, 3).unwrap();
        for xi in -3i64..=3 {
            t.set(&[xi], c(0.1 * xi as f64 + 0.4, 0.2)).unwrap();
        }
        let r = apply_symmetry(&t, &SymmetryOp::Translate(vec![0.9])).unwrap();
        for (xi, v) in t.iter() {
            let expect = v * theta;
            assert!(
                (r.table.get(&xi) - expect).norm() <= 1e-10 * (1.0 + expect.norm()),
                "xi={xi:?}"
            );
        }
    }

    #[test]
    fn dilation_reflects_table() {
        let spec = ThetaSpec::scalar(c(2.0, 1.0), 1.0).unwrap();
        let mut t = CoeffTable::zeros(spec, 2).unwrap();
        t.set(&[1], c(3.0, 0.0)).unwrap();
        t.set(&[-1], c(0.0, 4.0)).unwrap();
        let r = apply_symmetry(&t, &SymmetryOp::Dilate(-1)).unwrap();
        assert_eq!(r.table.get(&[1]), c(0.0, 4.0));
        assert_eq!(r.table.get(&[-1]), c(3.0, 0.0));
        // output structure is (θ^{-1}, T)
        let new_theta = r.table.theta_spec().theta()[0];
        assert!((new_theta - Complex64::new(1.0, 0.0) / c(2.0, 1.0)).norm() < 1e-14);
        assert!(apply_symmetry(&t, &SymmetryOp::Dilate(0)).is_err());
    }

    #[test]
    fn l1_chain_trivial_and_weighted() {
        // θ=1, f≡1: 1 ≤ 1 ≤ 1
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(spec, 32, |_| c(1.0, 0.0)).unwrap();
        let r = l1_bound_check(&f).unwrap();
        assert!(r.holds);
        assert!((r.coeff_max - 1.0).abs() < 1e-12);
        assert!((r.weighted_l1 - 1.0).abs() < 1e-12);
        assert!((r.weighted_bound - 1.0).abs() < 1e-12);

        // θ=2, T=1, f=2^x: 1 ≤ 1 ≤ 1/ln2 (K_min = 1, ∫₀¹2^x dx = 1/ln2)
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let f = SampledField::from_fn(spec, 512, |x| c(2.0f64.powf(x[0]), 0.0)).unwrap();
        let r = l1_bound_check(&f).unwrap();
        assert!(r.holds);
        assert!((r.coeff_max - 1.0).abs() < 1e-10);
        assert!((r.weighted_l1 - 1.0).abs() < 1e-10);
        assert!((r.weighted_bound - 1.0 / 2.0f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn l1_chain_contracting_theta_has_slack() {
        let spec = ThetaSpec::scalar(c(0.5, 0.0), 1.0).unwrap();
        // random trig polynomial twisted into the (1/2, 1) class
        let mut table = CoeffTable::zeros(spec.clone(), 4).unwrap();
        let vals = [0.3, -0.1, 0.8, 0.05, 0.4, -0.6, 0.2, 0.9, -0.3];
        for (i, xi) in (-4i64..=4).enumerate() {
            table.set(&[xi], c(vals[i], vals[(i + 3) % 9])).unwrap();
        }
        let f = synthesize(&table, GridSpec::new(1, 128).unwrap()).unwrap();
        let r = l1_bound_check(&f).unwrap();
        assert!(r.holds);
        assert!(r.weighted_l1 < r.weighted_bound); // strict slack
    }

    #[test]
    fn plancherel_identity_and_sandwich() {
        // {0→1} synthesized with θ=2, T=1: coeff=1, weighted=1,
        // plain = (∫₀¹4^x dx)^{1/2} = (3/ln4)^{1/2} ≈ 1.4709, inside [1,2]
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let table = CoeffTable::single_mode(spec, 4, &[0], c(1.0, 0.0)).unwrap();
        let f = synthesize(&table, GridSpec::new(1, 4096).unwrap()).unwrap();
        let r = plancherel_check(&f).unwrap();
        assert!(r.identity_holds);
        assert!(r.sandwich_holds);
        assert!(!r.aliasing_warning);
        assert!((r.coeff_l2 - 1.0).abs() < 1e-10);
        assert!((r.weighted_l2 - 1.0).abs() < 1e-10);
        let expect = (3.0 / 4.0f64.ln()).sqrt();
        assert!((r.plain_l2 - expect).abs() < 1e-7, "{} vs {expect}", r.plain_l2);
        assert!(r.plain_l2 >= 1.0 && r.plain_l2 <= 2.0);

        // θ=1, f=sin: both sides 1/√2
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(spec, 64, |x| c(x[0].sin(), 0.0)).unwrap();
        let r = plancherel_check(&f).unwrap();
        assert!(r.identity_holds && r.sandwich_holds);
        assert!((r.coeff_l2 - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.plain_l2 - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn plancherel_sandwich_mixed_moduli() {
        // 5-mode field with θ=(3, 1/4): sandwich with K=(1/4, 3)
        let spec = ThetaSpec::new(vec![c(3.0, 0.0), c(0.25, 0.0)], 1.0).unwrap();
        let mut table = CoeffTable::zeros(spec, 3).unwrap();
        for (i, xi) in [[0i64, 0], [1, 0], [0, -1], [2, 2], [-3, 1]].iter().enumerate() {
            table.set(xi, c(0.5 + i as f64 * 0.3, -0.2 * i as f64)).unwrap();
        }
        let f = synthesize(&table, GridSpec::new(2, 64).unwrap()).unwrap();
        let r = plancherel_check(&f).unwrap();
        assert!(r.identity_holds);
        assert!(r.sandwich_holds);
        assert!((r.k_min - 0.25).abs() < 1e-15);
        assert!((r.k_max - 3.0).abs() < 1e-15);
    }

    #[test]
    fn linearity_of_analysis() {
        let spec = ThetaSpec::scalar(c(1.2, -0.4), 2.0).unwrap();
        let f = SampledField::from_fn(spec.clone(), 32, |x| {
            c((PI * x[0]).cos(), (2.0 * PI * x[0]).sin())
        })
        .unwrap();
        let g = SampledField::from_fn(spec.clone(), 32, |x| c(x[0], 1.0 - x[0])).unwrap();
        let lambda = c(0.7, 1.3);
        let combo = SampledField::from_values(
            spec,
            f.grid(),
            f.values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| a + lambda * b)
                .collect(),
        )
        .unwrap();
        let tf = analyze(&f, 8).unwrap();
        let tg = analyze(&g, 8).unwrap();
        let tc = analyze(&combo, 8).unwrap();
        for (xi, v) in tc.iter() {
            let expect = tf.get(&xi) + lambda * tg.get(&xi);
            assert!((v - expect).norm() < 1e-12, "xi={xi:?}");
        }
    }

    #[test]
    fn aliasing_warning_fires_on_rim_energy() {
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        // mode exactly at the cutoff shell
        let f = SampledField::from_fn(spec, 32, |x| Complex64::from_polar(1.0, 5.0 * x[0])).unwrap();
        let (_, info) = analyze_with_info(&f, 5).unwrap();
        assert!(info.aliasing_warning);
        let (_, info) = analyze_with_info(&f, 8).unwrap();
        assert!(!info.aliasing_warning);
    }
}
