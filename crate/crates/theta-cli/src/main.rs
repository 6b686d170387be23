//! Batch front door for the theta-fourier library: one JSON config in,
//! JSON reports and CSV tables out. Outputs are written atomically and
//! deterministically (sorted keys, fixed float width), so identical
//! configs and inputs produce byte-identical artifacts.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric failure
//! (unsolvable problem or a failing verify suite), 4 I/O error.

mod config;
mod emit;

use clap::Parser;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::{Command, JobConfig};
use theta_fourier::fourier::{analyze_with_info, l1_bound_check, plancherel_check, synthesize};
use theta_fourier::odesolve::{solve_const, solve_var, OdeProblem, SolutionKind};
use theta_fourier::poincare::{poincare_case, poincare_verify};
use theta_fourier::regularity::{diagnose_constant, diagnose_variable};
use theta_fourier::solver::{solve_constant_l, solve_variable_l};
use theta_fourier::transform::{k_constants, lp_norm, omega_forward, plain_lp_norm};
use theta_fourier::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "thetaf", version, about = "Fourier calculus and operator diagnostics for theta-periodic functions")]
struct Cli {
    /// Path to the JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for reports and data artifacts (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads for lattice scans and mode solves.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seed for the randomized verify suite.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thetaf: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        Error::NoSolution(_) => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<()> {
    if cli.threads == 0 {
        return Err(Error::InvalidInput("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;

    let cfg = JobConfig::load(&cli.config)?;
    std::fs::create_dir_all(&cli.out_dir)?;
    let base = cli
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));

    let results = match cfg.command {
        Command::Transform => cmd_transform(&cfg, &base, &cli.out_dir)?,
        Command::Analyze => cmd_analyze(&cfg, &base, &cli.out_dir)?,
        Command::Synthesize => cmd_synthesize(&cfg, &base, &cli.out_dir)?,
        Command::Poincare => cmd_poincare(&cfg, &base)?,
        Command::Diagnose => cmd_diagnose(&cfg)?,
        Command::Solve => cmd_solve(&cfg, &base, &cli.out_dir)?,
        Command::Ode => cmd_ode(&cfg, &base, &cli.out_dir)?,
        Command::Verify => cmd_verify(&cfg, cli.seed)?,
    };

    // every report embeds the resolved config and the run context
    let report = json!({
        "command": cfg.command.name(),
        "config": serde_json::to_value(&cfg).map_err(fmt_err)?,
        "seed": cli.seed,
        "results": results,
    });
    let name = cfg
        .output
        .clone()
        .unwrap_or_else(|| format!("{}_report.json", cfg.command.name()));
    write_atomic(&cli.out_dir.join(name), emit::to_canonical_string(&report).as_bytes())?;

    // exit-3 conditions discovered inside otherwise-successful pipelines
    if let Some(fail) = results.get("numeric_failure").and_then(Value::as_str) {
        return Err(Error::NoSolution(fail.to_string()));
    }
    Ok(())
}

fn fmt_err(e: serde_json::Error) -> Error {
    Error::Format(format!("report serialization: {e}"))
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(fmt_err)
}

/// Write via temp file + rename so partial artifacts never appear.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp-partial");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn cmd_transform(cfg: &JobConfig, base: &Path, out_dir: &Path) -> Result<Value> {
    let f = cfg.load_field(base)?;
    let g = omega_forward(&f)?;
    let data_name = cfg.data_output.clone().unwrap_or_else(|| "conjugated.csv".into());
    let tmp = out_dir.join(format!("{data_name}.tmp-partial"));
    theta_fourier::io::write_field_csv(&g, &tmp)?;
    std::fs::rename(&tmp, out_dir.join(&data_name))?;
    let k = k_constants(f.theta_spec());
    Ok(json!({
        "k_constants": to_value(&k)?,
        "weighted_l1": lp_norm(&f, 1.0)?,
        "weighted_l2": lp_norm(&f, 2.0)?,
        "weighted_sup": lp_norm(&f, f64::INFINITY)?,
        "plain_l2": plain_lp_norm(&f, 2.0)?,
        "conjugated_csv": data_name,
        "tolerances": {"norm_quadrature": "closed-cell trapezoid"},
    }))
}

fn cmd_analyze(cfg: &JobConfig, base: &Path, out_dir: &Path) -> Result<Value> {
    let f = cfg.load_field(base)?;
    let cutoff = cfg
        .cutoff
        .ok_or_else(|| Error::InvalidInput("analyze needs a cutoff".into()))?;
    let (table, info) = analyze_with_info(&f, cutoff)?;
    let data_name = cfg.data_output.clone().unwrap_or_else(|| "coeffs.csv".into());
    let tmp = out_dir.join(format!("{data_name}.tmp-partial"));
    theta_fourier::io::write_coeffs_csv(&table, &tmp)?;
    std::fs::rename(&tmp, out_dir.join(&data_name))?;
    let l1 = l1_bound_check(&f)?;
    let pl = plancherel_check(&f)?;
    Ok(json!({
        "coeffs_csv": data_name,
        "spectrum": to_value(&info)?,
        "l1_bound": to_value(&l1)?,
        "plancherel": to_value(&pl)?,
        "tolerances": {"aliasing_tail": theta_fourier::fourier::ALIASING_TAIL_TOL},
    }))
}

fn cmd_synthesize(cfg: &JobConfig, base: &Path, out_dir: &Path) -> Result<Value> {
    let spec = cfg.theta_spec()?;
    let rel = cfg
        .coeffs_csv
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("synthesize needs coeffs_csv".into()))?;
    let table = theta_fourier::io::read_coeffs_csv(&base.join(rel), spec.clone())?;
    let grid = cfg.grid(spec.dim())?;
    let f = synthesize(&table, grid)?;
    let data_name = cfg.data_output.clone().unwrap_or_else(|| "field.csv".into());
    let tmp = out_dir.join(format!("{data_name}.tmp-partial"));
    theta_fourier::io::write_field_csv(&f, &tmp)?;
    std::fs::rename(&tmp, out_dir.join(&data_name))?;
    Ok(json!({
        "field_csv": data_name,
        "max_abs": f.max_abs(),
        "weighted_l2": lp_norm(&f, 2.0)?,
        "tolerances": {},
    }))
}

fn cmd_poincare(cfg: &JobConfig, base: &Path) -> Result<Value> {
    let spec = cfg.theta_spec()?;
    let case = poincare_case(&spec);
    let mut out = json!({
        "case": to_value(&case)?,
        "tolerances": {"criticality": theta_fourier::poincare::CRITICALITY_TOL},
    });
    if cfg.field.is_some() {
        let f = cfg.load_field(base)?;
        let report = poincare_verify(&f)?;
        out["verify"] = to_value(&report)?;
        if !report.holds {
            out["numeric_failure"] = Value::String("poincare inequality violated".into());
        }
    }
    Ok(out)
}

fn cmd_diagnose(cfg: &JobConfig) -> Result<Value> {
    let op = cfg.build_operator()?;
    let params = cfg.diagnosis_params();
    let verdict = if op.is_constant() {
        diagnose_constant(&op, &params)?
    } else {
        diagnose_variable(&op, &params)?
    };
    Ok(json!({
        "verdict": to_value(&verdict)?,
        "params": to_value(&params)?,
    }))
}

fn cmd_solve(cfg: &JobConfig, base: &Path, out_dir: &Path) -> Result<Value> {
    let op = cfg.build_operator()?;
    let f = cfg.load_field(base)?;
    let cutoff = cfg
        .cutoff
        .ok_or_else(|| Error::InvalidInput("solve needs a cutoff".into()))?;
    let report = if op.is_constant() {
        solve_constant_l(&op, &f, cutoff)?
    } else {
        solve_variable_l(&op, &f, cutoff)?
    };
    let data_name = cfg.data_output.clone().unwrap_or_else(|| "solution.csv".into());
    let tmp = out_dir.join(format!("{data_name}.tmp-partial"));
    theta_fourier::io::write_field_csv(&report.u, &tmp)?;
    std::fs::rename(&tmp, out_dir.join(&data_name))?;
    let unsolvable = report.unsolvable_modes().len();
    let mut out = json!({
        "solution_csv": data_name,
        "residual": report.residual,
        "condition": report.condition,
        "skipped": to_value(&report.skipped)?,
        "tolerances": {
            "symbol_zero": theta_fourier::regularity::SYMBOL_ZERO_TOL,
            "dead_mode_data": theta_fourier::solver::DEAD_MODE_DATA_TOL,
        },
    });
    if unsolvable > 0 {
        out["numeric_failure"] = Value::String(format!(
            "{unsolvable} modes carry data on a vanishing symbol"
        ));
    }
    Ok(out)
}

fn cmd_ode(cfg: &JobConfig, base: &Path, out_dir: &Path) -> Result<Value> {
    let f = cfg.load_field(base)?;
    let lambda_cfg = cfg
        .lambda
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("ode needs a lambda block".into()))?;
    let lambda = config::build_lambda(lambda_cfg, f.theta_spec())?;
    let constant = matches!(lambda, theta_fourier::odesolve::LambdaKind::Constant(_));
    let problem = OdeProblem::new(lambda, f)?;
    let sol = if constant {
        solve_const(&problem)?
    } else {
        solve_var(&problem)?
    };
    let mut out = json!({
        "kind": to_value(&sol.kind)?,
        "residual": sol.residual,
        "compatibility": sol.compatibility.map(|c| vec![c.re, c.im]),
        "conditioning_warning": sol.conditioning_warning,
        "tolerances": {
            "resonance": theta_fourier::odesolve::RESONANCE_TOL,
            "compatibility": theta_fourier::odesolve::COMPATIBILITY_TOL,
        },
    });
    if let Some(u) = &sol.u {
        let data_name = cfg.data_output.clone().unwrap_or_else(|| "solution.csv".into());
        let tmp = out_dir.join(format!("{data_name}.tmp-partial"));
        theta_fourier::io::write_field_csv(u, &tmp)?;
        std::fs::rename(&tmp, out_dir.join(&data_name))?;
        out["solution_csv"] = Value::String(data_name);
    }
    if sol.kind == SolutionKind::None {
        out["numeric_failure"] =
            Value::String("no periodic solution: compatibility integral does not vanish".into());
    }
    Ok(out)
}

fn cmd_verify(cfg: &JobConfig, seed: u64) -> Result<Value> {
    let trials = cfg.trials.unwrap_or(3);
    let report = theta_fourier::verify::run(seed, trials)?;
    let mut out = json!({"suite": to_value(&report)?});
    if !report.all_passed {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        out["numeric_failure"] = Value::String(format!("failed checks: {}", failed.join(", ")));
    }
    Ok(out)
}
