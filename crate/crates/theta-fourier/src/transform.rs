//! The conjugation Ω and the weighted L^p calculus.
//!
//! Ω f(y) = e^{−y·log(θ)/2π} f(Ty/2π) maps (θ,T)-periodic functions to
//! 2π-periodic ones; node m of the output grid is weight(m)·f(node m)
//! because y_m = 2πm/N corresponds to x_m = Tm/N. The inverse restores
//! the weight. Weighted L^p norms are defined so that Ω is an isometry
//! onto L^p(Tⁿ) with normalized measure.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::grid::SampledField;
use crate::theta::ThetaSpec;
use crate::util::kahan_sum;
use crate::{Error, Result};

/// Sandwich constants K_min = ∏_{|θ_j|<1}|θ_j| and K_max = ∏_{|θ_j|>1}|θ_j|
/// (empty products are 1), so K_min ≤ 1 ≤ K_max. They bound the plain
/// plain-cell L² norm between multiples of the coefficient norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KConstants {
    pub k_min: f64,
    pub k_max: f64,
}

pub fn k_constants(spec: &ThetaSpec) -> KConstants {
    let mut k_min = 1.0;
    let mut k_max = 1.0;
    for t in spec.theta() {
        let m = t.norm();
        if m < 1.0 {
            k_min *= m;
        } else if m > 1.0 {
            k_max *= m;
        }
    }
    KConstants { k_min, k_max }
}

/// Exponent of the conjugation weight at node m: −Σ_j (m_j/N)·log θ_j.
/// Summed in one shot before exponentiating so large |log θ| cannot
/// overflow intermediates.
fn weight_exponent(spec: &ThetaSpec, m: [usize; 2], samples: usize) -> Complex64 {
    let logs = spec.log_theta();
    let mut e = Complex64::new(0.0, 0.0);
    for (j, l) in logs.iter().enumerate() {
        e -= l * (m[j] as f64 / samples as f64);
    }
    e
}

/// Forward conjugation: samples of Ω f on the [0,2π)ⁿ grid, tagged with
/// the trivial structure (θ = 1, T = 2π).
pub fn omega_forward(f: &SampledField) -> Result<SampledField> {
    let spec = f.theta_spec();
    let grid = f.grid();
    let unit = ThetaSpec::unit(spec.dim(), 2.0 * PI)?;
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &v)| weight_exponent(spec, grid.coords(idx), grid.samples()).exp() * v)
        .collect();
    f.retag(unit, values)
}

/// Inverse conjugation: Ω⁻¹ g(x) = e^{x·log(θ)/T} g(2πx/T), node-exact.
pub fn omega_inverse(g: &SampledField, spec: &ThetaSpec) -> Result<SampledField> {
    if g.grid().dim() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "field dimension {} vs theta dimension {}",
            g.grid().dim(),
            spec.dim()
        )));
    }
    let grid = g.grid();
    let values = g
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &v)| (-weight_exponent(spec, grid.coords(idx), grid.samples())).exp() * v)
        .collect();
    g.retag(spec.clone(), values)
}

/// Modulus of the weight ∏_j |θ_j|^{−x_j/T} at node m.
fn weight_modulus(spec: &ThetaSpec, m: [usize; 2], samples: usize) -> f64 {
    weight_exponent(spec, m, samples).re.exp()
}

/// Weighted L^p norm. For p < ∞ this is the trapezoid quadrature of
/// (1/Tⁿ)∫|f|^p ∏|θ_j|^{−p x_j/T} dx raised to 1/p, which on the uniform
/// periodic grid is the plain mean over nodes. p = ∞ takes the weighted
/// sup over nodes. Pass `f64::INFINITY` for the sup norm; p < 1 is
/// rejected.
pub fn lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidInput(format!("L^p norm requires p >= 1, got {p}")));
    }
    let spec = f.theta_spec();
    let grid = f.grid();
    let n = grid.samples();
    if p.is_infinite() {
        let sup = f
            .values()
            .iter()
            .enumerate()
            .map(|(idx, v)| v.norm() * weight_modulus(spec, grid.coords(idx), n))
            .fold(0.0, f64::max);
        return Ok(sup);
    }
    let total = kahan_sum(f.values().iter().enumerate().map(|(idx, v)| {
        let w = weight_modulus(spec, grid.coords(idx), n);
        (v.norm() * w).powf(p)
    }));
    Ok((total / grid.len() as f64).powf(1.0 / p))
}

/// Plain (unweighted) L^p norm over the base cell, normalized measure.
///
/// Unlike the weighted integrand, |f|^p is not periodic when some
/// |θ_j| ≠ 1, so the closed-cell trapezoid rule needs the right endpoint,
/// supplied through the extension f(T·e_j-slice) = θ_j·f(0-slice). Folding
/// that back onto the open grid turns into a node weight (1 + |θ_j|^p)/2
/// on each m_j = 0 hyperplane.
pub fn plain_lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidInput(format!("L^p norm requires p >= 1, got {p}")));
    }
    let spec = f.theta_spec();
    let grid = f.grid();
    let moduli: Vec<f64> = spec.theta().iter().map(|t| t.norm()).collect();
    if p.is_infinite() {
        let sup = f
            .values()
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let m = grid.coords(idx);
                let mut boundary = 1.0;
                for (j, &mod_j) in moduli.iter().enumerate() {
                    if m[j] == 0 {
                        boundary *= mod_j.max(1.0);
                    }
                }
                v.norm() * boundary
            })
            .fold(0.0, f64::max);
        return Ok(sup);
    }
    let edge: Vec<f64> = moduli.iter().map(|m| (1.0 + m.powf(p)) / 2.0).collect();
    let total = kahan_sum(f.values().iter().enumerate().map(|(idx, v)| {
        let m = grid.coords(idx);
        let mut w = 1.0;
        for (j, &e) in edge.iter().enumerate() {
            if m[j] == 0 {
                w *= e;
            }
        }
        w * v.norm().powf(p)
    }));
    Ok((total / grid.len() as f64).powf(1.0 / p))
}
