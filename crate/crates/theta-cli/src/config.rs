//! Strict JSON job configuration: unknown keys are rejected everywhere,
//! and the resolved config is echoed into every report.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use theta_fourier::regularity::{Coefficient, OperatorSpec, QTerm};
use theta_fourier::{Error, GridSpec, Result, SampledField, ThetaSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Transform,
    Analyze,
    Synthesize,
    Poincare,
    Diagnose,
    Solve,
    Ode,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Analyze => "analyze",
            Command::Synthesize => "synthesize",
            Command::Poincare => "poincare",
            Command::Diagnose => "diagnose",
            Command::Solve => "solve",
            Command::Ode => "ode",
            Command::Verify => "verify",
        }
    }
}

/// Built-in analytic field expressions. Trig frequencies count full turns
/// per period: sin(2π·k·x/T). `mode` is the basis exponential
/// e^{i(2π/T)x·(ξ − i log(θ)/2π)} of the config's θ structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builtin {
    Constant { value: [f64; 2] },
    Exp { rate: Vec<[f64; 2]> },
    Sin { freq: Vec<f64> },
    Cos { freq: Vec<f64> },
    Mode { xi: Vec<i64> },
    Poly { coeffs: Vec<[f64; 2]> },
    Sum { terms: Vec<WeightedBuiltin> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedBuiltin {
    pub coef: [f64; 2],
    pub term: Builtin,
}

impl Builtin {
    pub fn eval(&self, x: &[f64], theta: &ThetaSpec) -> Result<Complex64> {
        let t = theta.period();
        Ok(match self {
            Builtin::Constant { value } => Complex64::new(value[0], value[1]),
            Builtin::Exp { rate } => {
                if rate.len() != x.len() {
                    return Err(Error::InvalidInput("exp rate dimension mismatch".into()));
                }
                let mut e = Complex64::new(0.0, 0.0);
                for (r, &xj) in rate.iter().zip(x) {
                    e += Complex64::new(r[0], r[1]) * xj;
                }
                e.exp()
            }
            Builtin::Sin { freq } => {
                let phase = Self::turns(freq, x, t)?;
                Complex64::new(phase.sin(), 0.0)
            }
            Builtin::Cos { freq } => {
                let phase = Self::turns(freq, x, t)?;
                Complex64::new(phase.cos(), 0.0)
            }
            Builtin::Mode { xi } => {
                if xi.len() != x.len() {
                    return Err(Error::InvalidInput("mode index dimension mismatch".into()));
                }
                let logs = theta.log_theta();
                let mut e = Complex64::new(0.0, 0.0);
                for (j, (&k, &xj)) in xi.iter().zip(x).enumerate() {
                    let mode = Complex64::new(k as f64, 0.0)
                        - Complex64::new(0.0, 1.0) * logs[j] / (2.0 * PI);
                    e += Complex64::new(0.0, 2.0 * PI / t) * xj * mode;
                }
                e.exp()
            }
            Builtin::Poly { coeffs } => {
                if x.len() != 1 {
                    return Err(Error::InvalidInput("poly builtins are one-dimensional".into()));
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for c in coeffs.iter().rev() {
                    acc = acc * x[0] + Complex64::new(c[0], c[1]);
                }
                acc
            }
            Builtin::Sum { terms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for w in terms {
                    acc += Complex64::new(w.coef[0], w.coef[1]) * w.term.eval(x, theta)?;
                }
                acc
            }
        })
    }

    fn turns(freq: &[f64], x: &[f64], t: f64) -> Result<f64> {
        if freq.len() != x.len() {
            return Err(Error::InvalidInput("trig frequency dimension mismatch".into()));
        }
        Ok(freq
            .iter()
            .zip(x)
            .map(|(&k, &xj)| 2.0 * PI * k * xj / t)
            .sum())
    }
}

/// Where a field's samples come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Builtin(Builtin),
    Csv(String),
    Binary(String),
}

/// One coefficient of the operator block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientConfig {
    Constant([f64; 2]),
    /// Builtin sampled on [0,T) with `n` points (x₁ only).
    Trace { expr: Builtin, n: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub c: CoefficientConfig,
    pub q: CoefficientConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaConfig {
    Constant([f64; 2]),
    Trace { expr: Builtin, n: usize },
}

/// Scan-parameter overrides; every value is echoed into the report.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub k_grid: Option<Vec<f64>>,
    pub c_floor: Option<f64>,
    pub cf_depth: Option<usize>,
    pub cf_k_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<[f64; 2]>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_branch: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaConfig>,
    /// Primary JSON report filename inside the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// CSV artifact filename (solution/conjugated field/coefficients).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    /// Sample count multiplier for the verify suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn theta_spec(&self) -> Result<ThetaSpec> {
        let theta = self
            .theta
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("config needs a theta array".into()))?
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect::<Vec<_>>();
        let period = self
            .period
            .ok_or_else(|| Error::InvalidInput("config needs the period T".into()))?;
        match &self.log_branch {
            Some(branch) => ThetaSpec::with_branch(theta, period, branch.clone()),
            None => ThetaSpec::new(theta, period),
        }
    }

    pub fn grid(&self, dim: usize) -> Result<GridSpec> {
        let n = self
            .grid_n
            .ok_or_else(|| Error::InvalidInput("config needs grid_n".into()))?;
        GridSpec::new(dim, n)
    }

    /// Materialize the configured field. Paths are resolved against the
    /// config file's directory.
    pub fn load_field(&self, base: &Path) -> Result<SampledField> {
        let spec = self.theta_spec()?;
        let src = self
            .field
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("config needs a field".into()))?;
        match src {
            FieldSource::Builtin(b) => {
                let n = self
                    .grid_n
                    .ok_or_else(|| Error::InvalidInput("builtin fields need grid_n".into()))?;
                let grid = GridSpec::new(spec.dim(), n)?;
                let t = spec.period();
                let values = (0..grid.len())
                    .map(|idx| {
                        let node = grid.node(idx, t);
                        b.eval(&node[..grid.dim()], &spec)
                    })
                    .collect::<Result<Vec<Complex64>>>()?;
                SampledField::from_values(spec, grid, values)
            }
            FieldSource::Csv(rel) => theta_fourier::io::read_field_csv(&base.join(rel), spec),
            FieldSource::Binary(rel) => theta_fourier::io::read_field_binary(&base.join(rel)),
        }
    }

    pub fn build_operator(&self) -> Result<OperatorSpec> {
        let spec = self.theta_spec()?;
        if spec.dim() != 2 {
            return Err(Error::InvalidInput("operators need a two-dimensional theta".into()));
        }
        let opc = self
            .operator
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("config needs an operator block".into()))?;
        let c = build_coefficient(&opc.c, &spec)?;
        let q = match build_coefficient(&opc.q, &spec)? {
            Coefficient::Constant(v) => QTerm::Constant(v),
            Coefficient::Trace(tr) => QTerm::Trace(tr),
        };
        OperatorSpec::new(c, q, spec)
    }

    pub fn diagnosis_params(&self) -> theta_fourier::regularity::DiagnosisParams {
        let mut params = theta_fourier::regularity::DiagnosisParams::default();
        if let Some(c) = self.cutoff {
            params.cutoff = c;
        }
        if let Some(t) = &self.tolerances {
            if let Some(kg) = &t.k_grid {
                params.k_grid = kg.clone();
            }
            if let Some(cf) = t.c_floor {
                params.c_floor = cf;
            }
            if let Some(d) = t.cf_depth {
                params.cf_depth = d;
            }
            if let Some(k) = t.cf_k_max {
                params.cf_k_max = k;
            }
        }
        params
    }
}

fn build_coefficient(cfg: &CoefficientConfig, spec: &ThetaSpec) -> Result<Coefficient> {
    Ok(match cfg {
        CoefficientConfig::Constant([re, im]) => Coefficient::Constant(Complex64::new(*re, *im)),
        CoefficientConfig::Trace { expr, n } => {
            let t = spec.period();
            let mut trace = Vec::with_capacity(*n);
            for i in 0..*n {
                let x = [i as f64 * t / *n as f64];
                trace.push(expr.eval(&x, spec)?);
            }
            Coefficient::Trace(trace)
        }
    })
}

/// Build an ODE lambda from config (x₁ scale of the n=1 theta).
pub fn build_lambda(cfg: &LambdaConfig, spec: &ThetaSpec) -> Result<theta_fourier::odesolve::LambdaKind> {
    Ok(match cfg {
        LambdaConfig::Constant([re, im]) => {
            theta_fourier::odesolve::LambdaKind::Constant(Complex64::new(*re, *im))
        }
        LambdaConfig::Trace { expr, n } => {
            let t = spec.period();
            let mut trace = Vec::with_capacity(*n);
            for i in 0..*n {
                let x = [i as f64 * t / *n as f64];
                trace.push(expr.eval(&x, spec)?);
            }
            theta_fourier::odesolve::LambdaKind::Trace(trace)
        }
    })
}


