//! The Poincaré inequality for (θ,T)-periodic functions.
//!
//! With v = i·log(θ)/2π, the sharp constant is (2π/T)·dist(v, Zⁿ) when
//! v ∉ Zⁿ and 2π/T when v ∈ Zⁿ, the latter requiring the coefficient at
//! the critical mode ξ* = v to vanish. Componentwise,
//! Re v_j = −(Arg θ_j + 2πk_j)/2π and Im v_j = ln|θ_j|/2π, so the distance
//! is √(Σ_j dist(Re v_j, Z)² + (Im v_j)²).

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::coeffs::CoeffTable;
use crate::fourier::{analyze_with_info, derivative_coeffs};
use crate::grid::SampledField;
use crate::theta::ThetaSpec;
use crate::util::{dist_to_int, kahan_sum};
use crate::Result;

/// Componentwise tolerance for deciding v ∈ Zⁿ.
pub const CRITICALITY_TOL: f64 = 1e-12;

/// Classification of the θ structure for the inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareCase {
    /// Present iff i·log(θ)/2π ∈ Zⁿ; the mode whose coefficient must vanish.
    pub critical_mode: Option<Vec<i64>>,
    /// The sharp constant: 2π/T in the critical case, else (2π/T)·distance.
    pub constant: f64,
    /// Torus-lattice distance dist(i·log(θ)/2π, Zⁿ); zero in the critical case.
    pub distance: f64,
    /// Set when 0 < distance < tolerance: treated as critical because the
    /// constant degenerates continuously.
    pub near_critical_warning: bool,
}

/// The vector v = i·log(θ)/2π ∈ Cⁿ under the stored branch.
pub fn critical_vector(spec: &ThetaSpec) -> Vec<Complex64> {
    spec.log_theta()
        .iter()
        .map(|l| Complex64::new(0.0, 1.0) * l / (2.0 * PI))
        .collect()
}

pub fn poincare_case(spec: &ThetaSpec) -> PoincareCase {
    let v = critical_vector(spec);
    let dist_sq = kahan_sum(
        v.iter()
            .map(|z| dist_to_int(z.re).powi(2) + z.im * z.im),
    );
    let distance = dist_sq.sqrt();
    let critical = v
        .iter()
        .all(|z| dist_to_int(z.re) <= CRITICALITY_TOL && z.im.abs() <= CRITICALITY_TOL);
    let factor = 2.0 * PI / spec.period();
    if critical {
        // a θ critical only up to tolerance gets the critical treatment
        // (the constant degenerates continuously) but carries a warning
        PoincareCase {
            critical_mode: Some(v.iter().map(|z| z.re.round() as i64).collect()),
            constant: factor,
            distance,
            near_critical_warning: distance > 0.0,
        }
    } else {
        PoincareCase {
            critical_mode: None,
            constant: factor * distance,
            distance,
            near_critical_warning: false,
        }
    }
}

/// Zero the critical coefficient when the case has one; identity otherwise.
pub fn project_admissible(table: &CoeffTable, case: &PoincareCase) -> CoeffTable {
    match &case.critical_mode {
        Some(mode) if table.contains(mode) => {
            let mut out = table.clone();
            out.set(mode, Complex64::new(0.0, 0.0))
                .expect("mode is in the box");
            out
        }
        _ => table.clone(),
    }
}

/// Lattice point minimizing ‖iξ + log(θ)/2π‖; the minimizer realizes the
/// torus distance, so the single mode there saturates the inequality.
pub fn lattice_minimizer(spec: &ThetaSpec) -> Vec<i64> {
    critical_vector(spec).iter().map(|z| z.re.round() as i64).collect()
}

/// Numerical verdict on ‖∇f‖ ≥ constant·‖f‖ for one field.
#[derive(Debug, Clone, Serialize)]
pub struct PoincareReport {
    pub grad_norm: f64,
    pub f_norm: f64,
    pub constant: f64,
    /// grad_norm / (constant·f_norm); ≥ 1 means the inequality holds,
    /// infinite for the zero field.
    pub ratio: f64,
    pub holds: bool,
    pub critical_mode: Option<Vec<i64>>,
    pub aliasing_warning: bool,
}

/// Verifies the inequality for a band-limited field. The field is
/// projected onto the admissible subspace (critical coefficient removed)
/// first; the gradient norm is assembled spectrally from the derivative
/// multipliers and the Plancherel identity.
pub fn poincare_verify(f: &SampledField) -> Result<PoincareReport> {
    let cutoff = f.grid().samples() / 2 - 1;
    let (raw, info) = analyze_with_info(f, cutoff)?;
    let case = poincare_case(f.theta_spec());
    let table = project_admissible(&raw, &case);

    let f_norm = table.l2_norm();
    let mut grad_sq = 0.0;
    for axis in 0..table.dim() {
        let d = derivative_coeffs(&table, axis);
        grad_sq += d.l2_norm().powi(2);
    }
    let grad_norm = grad_sq.sqrt();

    let slack = 1e-12 * (1.0 + grad_norm);
    let holds = grad_norm + slack >= case.constant * f_norm;
    let ratio = if f_norm == 0.0 {
        f64::INFINITY
    } else {
        grad_norm / (case.constant * f_norm)
    };
    Ok(PoincareReport {
        grad_norm,
        f_norm,
        constant: case.constant,
        ratio,
        holds,
        critical_mode: case.critical_mode,
        aliasing_warning: info.aliasing_warning,
    })
}
