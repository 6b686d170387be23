//! Spectral solver for L u = f with L = ∂₁ + c(x₁)∂₂ + q on n = 2.
//!
//! Constant coefficients divide mode-by-mode by i(2π/T)σ(ξ). With
//! x₁-dependent coefficients the x₂ direction is transformed first and
//! each mode solves a scalar (θ₁,T)-periodic ODE in x₁ through
//! [`crate::odesolve::solve_mode_ode`]. Dead or resonant-unsolvable modes
//! are excluded and reported rather than failing the whole solve; the
//! residual is recomputed from the returned field, never inferred.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::coeffs::CoeffTable;
use crate::fft::fft_1d;
use crate::fourier::{analyze, derivative_coeffs, synthesize};
use crate::grid::SampledField;
use crate::odesolve::{solve_mode_ode, LambdaKind, ModeProblem, SolutionKind};
use crate::regularity::{constant_symbol, Coefficient, OperatorSpec, QTerm, TildeParams, SYMBOL_ZERO_TOL};
use crate::{Error, Result};

/// Coefficient magnitude below this on a dead mode is treated as zero data.
pub const DEAD_MODE_DATA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub enum SkipReason {
    /// Symbol (or resonance gap) at zero and no data: mode set to 0.
    ZeroSymbolNoData,
    /// Symbol at zero but the data carries mass: genuinely unsolvable.
    UnsolvableData { data_magnitude: f64 },
    /// Resonant mode whose compatibility integral vanished; the particular
    /// family member was included.
    ResonantFamilyIncluded,
    /// Resonant mode with a non-vanishing compatibility integral.
    ResonantUnsolvable { compatibility: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedMode {
    pub xi: Vec<i64>,
    pub reason: SkipReason,
}

/// Solve outcome: the field, an honestly recomputed residual, the mode
/// ledger, and the worst conditioning factor that entered the solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: SampledField,
    /// max |L u − f| over nodes, derivatives taken spectrally.
    pub residual: f64,
    pub skipped: Vec<SkippedMode>,
    /// max over used modes of 1/|symbol| (or 1/gap for mode ODEs).
    pub condition: f64,
}

impl SolveReport {
    pub fn unsolvable_modes(&self) -> Vec<&SkippedMode> {
        self.skipped
            .iter()
            .filter(|s| {
                matches!(
                    s.reason,
                    SkipReason::UnsolvableData { .. } | SkipReason::ResonantUnsolvable { .. }
                )
            })
            .collect()
    }
}

fn coefficient_trace(c: &Coefficient, n: usize, name: &str) -> Result<Vec<Complex64>> {
    match c {
        Coefficient::Constant(v) => Ok(vec![*v; n]),
        Coefficient::Trace(tr) => {
            if tr.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} trace length {} does not match the grid ({n})",
                    tr.len()
                )));
            }
            Ok(tr.clone())
        }
    }
}

/// Apply L = ∂₁ + c(x₁)∂₂ + q to a sampled field, derivatives spectral.
pub fn apply_operator(op: &OperatorSpec, u: &SampledField) -> Result<SampledField> {
    if u.grid().dim() != 2 {
        return Err(Error::DimensionMismatch("operator acts on n = 2 fields".into()));
    }
    let n = u.grid().samples();
    let cutoff = n / 2 - 1;
    let table = analyze(u, cutoff)?;
    let du1 = synthesize(&derivative_coeffs(&table, 0), u.grid())?;
    let du2 = synthesize(&derivative_coeffs(&table, 1), u.grid())?;
    let c_trace = coefficient_trace(&op.c, n, "c")?;
    let q_at = |idx: usize| -> Result<Complex64> {
        let m = u.grid().coords(idx);
        Ok(match &op.q {
            QTerm::Constant(v) => *v,
            QTerm::Trace(tr) => {
                if tr.len() != n {
                    return Err(Error::DimensionMismatch("q trace length vs grid".into()));
                }
                tr[m[0]]
            }
            QTerm::Field { samples, n: qn } => {
                if *qn != n {
                    return Err(Error::DimensionMismatch("q field resolution vs grid".into()));
                }
                samples[idx]
            }
        })
    };
    let mut values = Vec::with_capacity(u.grid().len());
    for idx in 0..u.grid().len() {
        let m = u.grid().coords(idx);
        let v = du1.value(idx) + c_trace[m[0]] * du2.value(idx) + q_at(idx)? * u.value(idx);
        values.push(v);
    }
    SampledField::from_values(u.theta_spec().clone(), u.grid(), values)
}

/// Apply the conjugated operator L̃ = ∂₁ + c_eff(t)∂₂ + zero_order(t) to a
/// 2π-periodic field (θ = 1 tag).
pub fn apply_tilde(tp: &TildeParams, g: &SampledField) -> Result<SampledField> {
    let n = g.grid().samples();
    let cutoff = n / 2 - 1;
    let table = analyze(g, cutoff)?;
    let dg1 = synthesize(&derivative_coeffs(&table, 0), g.grid())?;
    let dg2 = synthesize(&derivative_coeffs(&table, 1), g.grid())?;
    let c_trace = coefficient_trace(&tp.c_eff, n, "c_eff")?;
    let z = tp
        .zero_order
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("zero order depends on both variables".into()))?;
    let z_trace = coefficient_trace(z, n, "zero_order")?;
    let mut values = Vec::with_capacity(g.grid().len());
    for idx in 0..g.grid().len() {
        let m = g.grid().coords(idx);
        values.push(dg1.value(idx) + c_trace[m[0]] * dg2.value(idx) + z_trace[m[0]] * g.value(idx));
    }
    SampledField::from_values(g.theta_spec().clone(), g.grid(), values)
}

fn residual_of(op: &OperatorSpec, u: &SampledField, f: &SampledField) -> Result<f64> {
    let lu = apply_operator(op, u)?;
    Ok(crate::util::max_abs_diff(lu.values(), f.values()))
}

/// Constant-coefficient solve: û(ξ) = f̂(ξ) / [i(2π/T)·σ(ξ)] on live modes.
pub fn solve_constant_l(op: &OperatorSpec, f: &SampledField, cutoff: usize) -> Result<SolveReport> {
    let (c, q) = match (&op.c, &op.q) {
        (Coefficient::Constant(c), QTerm::Constant(q)) => (*c, *q),
        _ => {
            return Err(Error::InvalidInput(
                "solve_constant_l requires constant coefficients".into(),
            ))
        }
    };
    let theta = &op.theta;
    let table = analyze(f, cutoff)?;
    let factor = Complex64::new(0.0, 2.0 * PI / theta.period());
    let mut solved = CoeffTable::zeros(theta.clone(), cutoff)?;
    let mut skipped = Vec::new();
    let mut condition = 0.0f64;
    let mut live_mass = 0.0f64;
    let mut dead_mass = 0.0f64;
    for (xi, v) in table.iter() {
        let s = constant_symbol(c, q, theta, [xi[0], xi[1]]);
        let norm_xi = ((xi[0] * xi[0] + xi[1] * xi[1]) as f64).sqrt();
        if s.norm() < SYMBOL_ZERO_TOL * (1.0 + norm_xi) {
            if v.norm() < DEAD_MODE_DATA_TOL {
                skipped.push(SkippedMode {
                    xi: xi.clone(),
                    reason: SkipReason::ZeroSymbolNoData,
                });
            } else {
                dead_mass += v.norm_sqr();
                skipped.push(SkippedMode {
                    xi: xi.clone(),
                    reason: SkipReason::UnsolvableData { data_magnitude: v.norm() },
                });
            }
            continue;
        }
        live_mass += v.norm_sqr();
        condition = condition.max(1.0 / s.norm());
        solved.set(&xi, v / (factor * s))?;
    }
    if live_mass == 0.0 && dead_mass > 0.0 {
        return Err(Error::NoSolution(
            "all data mass sits on modes where the symbol vanishes".into(),
        ));
    }
    let u = synthesize(&solved, f.grid())?;
    let residual = residual_of(op, &u, f)?;
    Ok(SolveReport {
        u,
        residual,
        skipped,
        condition,
    })
}

/// Variable-coefficient solve for q = q(x₁) (or constant): partial
/// transform in x₂, a scalar periodic ODE per mode, inverse transform.
pub fn solve_variable_l(op: &OperatorSpec, f: &SampledField, cutoff: usize) -> Result<SolveReport> {
    if op.q.depends_on_x2() {
        return Err(Error::InvalidInput(
            "the per-mode reduction needs q independent of x2; \
             a genuinely two-variable q is outside the reducible class"
                .into(),
        ));
    }
    if op.is_constant() {
        return solve_constant_l(op, f, cutoff);
    }
    let theta = &op.theta;
    let n = f.grid().samples();
    if cutoff > n / 2 - 1 {
        return Err(Error::CutoffBeyondNyquist {
            cutoff,
            limit: n / 2 - 1,
            samples: n,
        });
    }
    let logs = theta.log_theta();
    let q_coeff = op.q.as_coefficient().expect("q checked above");
    let c_lambda = match &op.c {
        Coefficient::Constant(v) => LambdaKind::Constant(*v),
        Coefficient::Trace(_) => LambdaKind::Trace(coefficient_trace(&op.c, n, "c")?),
    };
    let q_lambda = match &q_coeff {
        Coefficient::Constant(v) => LambdaKind::Constant(*v),
        Coefficient::Trace(_) => LambdaKind::Trace(coefficient_trace(&q_coeff, n, "q")?),
    };

    // partial conjugation in x₂: rows are x₁ slices, FFT along x₂
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for i0 in 0..n {
        let mut row: Vec<Complex64> = (0..n)
            .map(|i1| {
                let w = (-logs[1] * (i1 as f64 / n as f64)).exp();
                w * f.value(i0 * n + i1)
            })
            .collect();
        fft_1d(&mut row, false);
        for v in &mut row {
            *v /= n as f64;
        }
        rows.push(row);
    }

    let mut skipped = Vec::new();
    let mut condition = 0.0f64;
    let mut solved_rows = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let global_scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|v| v.norm()))
        .fold(0.0, f64::max);
    let xi_range: Vec<i64> = (-(cutoff as i64)..=cutoff as i64).collect();
    for &xi in &xi_range {
        let bin = xi.rem_euclid(n as i64) as usize;
        let f_mode: Vec<Complex64> = (0..n).map(|i0| rows[i0][bin]).collect();
        // modes at the data's noise floor are zero; solving them would only
        // amplify rounding noise through the e^Λ reduction
        if crate::util::max_abs(&f_mode) <= 1e-13 * global_scale {
            continue;
        }
        let mode = ModeProblem {
            xi,
            c: &c_lambda,
            q: &q_lambda,
            theta,
            f_mode: &f_mode,
        };
        let sol = solve_mode_ode(&mode)?;
        match sol.kind {
            SolutionKind::Unique => {
                if let Some(gap) = sol.conditioning_warning {
                    condition = condition.max(1.0 / gap);
                }
                let u_mode = sol.u.expect("unique solution field");
                for i0 in 0..n {
                    solved_rows[i0][bin] = u_mode.value(i0);
                }
            }
            SolutionKind::Family => {
                let u_mode = sol.u.expect("family particular member");
                for i0 in 0..n {
                    solved_rows[i0][bin] = u_mode.value(i0);
                }
                skipped.push(SkippedMode {
                    xi: vec![xi],
                    reason: SkipReason::ResonantFamilyIncluded,
                });
            }
            SolutionKind::None => {
                skipped.push(SkippedMode {
                    xi: vec![xi],
                    reason: SkipReason::ResonantUnsolvable {
                        compatibility: sol.compatibility.map(|c| c.norm()).unwrap_or(f64::NAN),
                    },
                });
            }
        }
    }

    // inverse transform in x₂ with the weight restored
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    for i0 in 0..n {
        let mut row = solved_rows[i0].clone();
        fft_1d(&mut row, true);
        for i1 in 0..n {
            let w = (logs[1] * (i1 as f64 / n as f64)).exp();
            values[i0 * n + i1] = w * row[i1];
        }
    }
    let u = SampledField::from_values(theta.clone(), f.grid(), values)?;
    let residual = residual_of(op, &u, f)?;
    Ok(SolveReport {
        u,
        residual,
        skipped,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::theta::ThetaSpec;
    use crate::transform::omega_forward;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit2(t: f64) -> ThetaSpec {
        ThetaSpec::unit(2, t).unwrap()
    }

    #[test]
    fn single_mode_division() {
        // c=i, q=0, θ=(1,1), T=2π, f=e^{i(x₁+x₂)}: u = f/(i(1+i))
        let theta = unit2(2.0 * PI);
        let op = OperatorSpec::new(
            Coefficient::Constant(c64(0.0, 1.0)),
            QTerm::Constant(c64(0.0, 0.0)),
            theta.clone(),
        )
        .unwrap();
        let f = SampledField::from_fn(theta, 32, |x| {
            Complex64::from_polar(1.0, x[0] + x[1])
        })
        .unwrap();
        let report = solve_constant_l(&op, &f, 8).unwrap();
        assert!(report.residual < 1e-10, "residual {}", report.residual);
        let div = c64(0.0, 1.0) * c64(1.0, 1.0);
        for (u, fv) in report.u.values().iter().zip(f.values()) {
            assert!((u - fv / div).norm() < 1e-12);
        }
        assert!(report.unsolvable_modes().is_empty());
    }

    #[test]
    fn kernel_direction_unsolvable() {
        // c=0, q=0, f=e^{ix₂}: ∂₁u can never produce x₂-only modes
        let theta = unit2(2.0 * PI);
        let op = OperatorSpec::new(
            Coefficient::Constant(c64(0.0, 0.0)),
            QTerm::Constant(c64(0.0, 0.0)),
            theta.clone(),
        )
        .unwrap();
        let f = SampledField::from_fn(theta, 32, |x| Complex64::from_polar(1.0, x[1])).unwrap();
        let err = solve_constant_l(&op, &f, 8);
        assert!(matches!(err, Err(Error::NoSolution(_))));
    }

    #[test]
    fn partial_solve_with_ledger() {
        // f with mass on both live and dead modes: solve the live part,
        // ledger the dead one
        let theta = unit2(2.0 * PI);
        let op = OperatorSpec::new(
            Coefficient::Constant(c64(0.0, 0.0)),
            QTerm::Constant(c64(0.0, 0.0)),
            theta.clone(),
        )
        .unwrap();
        let f = SampledField::from_fn(theta, 32, |x| {
            Complex64::from_polar(1.0, x[1]) + Complex64::from_polar(2.0, x[0])
        })
        .unwrap();
        let report = solve_constant_l(&op, &f, 8).unwrap();
        let unsolvable = report.unsolvable_modes();
        assert_eq!(unsolvable.len(), 1);
        assert_eq!(unsolvable[0].xi, vec![0, 1]);
        // residual equals the stranded mass (|e^{ix₂}| = 1)
        assert!((report.residual - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_order_identity() {
        // q=1, c=0, θ=(1,1), T=2π, f≡1: u ≡ 1
        let theta = unit2(2.0 * PI);
        let op = OperatorSpec::new(
            Coefficient::Constant(c64(0.0, 0.0)),
            QTerm::Constant(c64(1.0, 0.0)),
            theta.clone(),
        )
        .unwrap();
        let f = SampledField::from_fn(theta, 16, |_| c64(1.0, 0.0)).unwrap();
        let report = solve_constant_l(&op, &f, 4).unwrap();
        for u in report.u.values() {
            assert!((u - c64(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn variable_matches_constant_when_degenerate() {
        let theta = unit2(2.0 * PI);
        let n = 32;
        let c = c64(0.3, 1.2);
        let q = c64(0.5, -0.1);
        let op_c = OperatorSpec::new(
            Coefficient::Constant(c),
            QTerm::Constant(q),
            theta.clone(),
        )
        .unwrap();
        let op_v = OperatorSpec::new(
            Coefficient::Trace(vec![c; n]),
            QTerm::Trace(vec![q; n]),
            theta.clone(),
        )
        .unwrap();
        let mut table = CoeffTable::zeros(theta.clone(), 5).unwrap();
        table.set(&[1, 2], c64(1.0, 0.5)).unwrap();
        table.set(&[-3, 0], c64(0.2, -0.7)).unwrap();
        table.set(&[0, -4], c64(-0.4, 0.1)).unwrap();
        let f = synthesize(&table, GridSpec::new(2, n).unwrap()).unwrap();
        let rc = solve_constant_l(&op_c, &f, 8).unwrap();
        let rv = solve_variable_l(&op_v, &f, 8).unwrap();
        assert!(rc.residual < 1e-10);
        assert!(rv.residual < 1e-9, "rv residual {}", rv.residual);
        for (a, b) in rc.u.values().iter().zip(rv.u.values()) {
            assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn manufactured_solution_variable() {
        // pick u, compute f = Lu spectrally, solve, compare
        let theta = unit2(2.0 * PI);
        let n = 64;
        let trace: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                c64(0.0, 2.0 + t.sin())
            })
            .collect();
        let op = OperatorSpec::new(
            Coefficient::Trace(trace),
            QTerm::Constant(c64(0.3, 0.0)),
            theta.clone(),
        )
        .unwrap();
        let mut table = CoeffTable::zeros(theta, 4).unwrap();
        table.set(&[2, 1], c64(1.0, 0.0)).unwrap();
        table.set(&[-1, 3], c64(0.0, 0.6)).unwrap();
        table.set(&[0, 0], c64(0.5, 0.5)).unwrap();
        let u_true = synthesize(&table, GridSpec::new(2, n).unwrap()).unwrap();
        let f = apply_operator(&op, &u_true).unwrap();
        let report = solve_variable_l(&op, &f, 16).unwrap();
        assert!(report.residual < 1e-7, "residual {}", report.residual);
        for (a, b) in report.u.values().iter().zip(u_true.values()) {
            assert!((a - b).norm() < 1e-7 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn conjugation_commutation() {
        // Ω(Lu) = (2π/T)·L̃(Ωu) at sample level
        let theta = ThetaSpec::new(vec![c64(2.0, 0.0), c64(-1.0, 0.0)], 3.0).unwrap();
        let n = 32;
        let trace: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                c64(0.5 + 0.2 * t.cos(), 0.1 * t.sin())
            })
            .collect();
        let op = OperatorSpec::new(
            Coefficient::Trace(trace),
            QTerm::Constant(c64(0.2, 0.4)),
            theta.clone(),
        )
        .unwrap();
        let mut table = CoeffTable::zeros(theta.clone(), 4).unwrap();
        table.set(&[1, -2], c64(0.7, 0.1)).unwrap();
        table.set(&[0, 1], c64(-0.3, 0.9)).unwrap();
        let u = synthesize(&table, GridSpec::new(2, n).unwrap()).unwrap();

        let lhs = omega_forward(&apply_operator(&op, &u).unwrap()).unwrap();
        let tp = crate::regularity::tilde_params(&op);
        let rhs_field = apply_tilde(&tp, &omega_forward(&u).unwrap()).unwrap();
        let scale = 2.0 * PI / 3.0;
        for (a, b) in lhs.values().iter().zip(rhs_field.values()) {
            assert!(
                (a - b * scale).norm() < 1e-8 * (1.0 + a.norm()),
                "{a} vs {}",
                b * scale
            );
        }
    }

    #[test]
    fn rejects_two_variable_q() {
        let theta = unit2(2.0 * PI);
        let n = 16;
        let samples = vec![c64(1.0, 0.0); n * n];
        let op = OperatorSpec::new(
            Coefficient::Constant(c64(0.0, 1.0)),
            QTerm::Field { samples, n },
            theta.clone(),
        )
        .unwrap();
        let f = SampledField::from_fn(theta, n, |_| c64(1.0, 0.0)).unwrap();
        assert!(solve_variable_l(&op, &f, 4).is_err());
    }

    #[test]
    fn decay_preserved_through_solve() {
        // smooth data through a hypoelliptic operator: output coefficients
        // decay rapidly
        let theta = unit2(2.0 * PI);
        let op = OperatorSpec::new(
            Coefficient::Constant(c64(0.0, 1.0)),
            QTerm::Constant(c64(0.1, 0.0)),
            theta.clone(),
        )
        .unwrap();
        let f = SampledField::from_fn(theta, 64, |x| {
            c64(
                (x[0].sin() + (2.0 * x[1]).cos()) * 0.5,
                x[0].cos() * x[1].sin(),
            )
        })
        .unwrap();
        let report = solve_constant_l(&op, &f, 16).unwrap();
        let table = analyze(&report.u, 16).unwrap();
        let decay = crate::sobolev::decay_classify(&table).unwrap();
        assert!(decay.is_rapid);
    }
}
