//! Global hypoellipticity / solvability diagnosis for
//! L = ∂₁ + c(x₁)∂₂ + q acting on (θ,T)-periodic functions (n = 2).
//!
//! The conjugated operator L̃ = (T/2π)·Ω∘L∘Ω⁻¹ has the per-mode symbol
//! (times i) σ(ξ) = ξ₁ + cξ₂ − i[(log θ₁ + c·log θ₂)/2π + qT/2π]; lower
//! bounds |σ(ξ)| ≥ C·⟨ξ⟩^{−k} govern regularity. A finite lattice scan can
//! only produce *evidence* for such an all-but-finitely-many bound, so a
//! scan verdict is labeled evidence unless an analytic clause decides it
//! outright (Im c ≠ 0; one-signed b; exact rational detection).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::diophantine::{classify_real, DiophKind, DiophantineClass};
use crate::fft::fft_1d;
use crate::odesolve::periodic_antiderivative;
use crate::theta::ThetaSpec;
use crate::util::{bracket, kahan_sum_complex, max_abs};
use crate::{Error, Result};

/// |σ(ξ)| below tol·(1 + ‖ξ‖) counts as a symbol zero.
pub const SYMBOL_ZERO_TOL: f64 = 1e-10;

/// Tolerance of the exceptional-set membership search.
pub const EXCEPTIONAL_TOL: f64 = 1e-10;

/// |Im c| above this makes the constant-coefficient operator elliptic-like.
pub const IM_C_TOL: f64 = 1e-12;

/// b(t) with sup below this counts as identically zero.
pub const B_ZERO_TOL: f64 = 1e-10;

/// Sign test slack: an extremum within this of zero does not count as a
/// sign change.
pub const B_SIGN_TOL: f64 = 1e-12;

/// Max amplitude ratio of a trace's top-octave spectrum; above this the
/// samples do not continue smoothly across the period.
pub const TRACE_SMOOTHNESS_TOL: f64 = 1e-8;

/// A coefficient that is either a constant or a uniformly sampled
/// T-periodic trace on [0,T).
#[derive(Debug, Clone)]
pub enum Coefficient {
    Constant(Complex64),
    Trace(Vec<Complex64>),
}

impl Coefficient {
    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }

    pub fn constant_value(&self) -> Option<Complex64> {
        match self {
            Coefficient::Constant(v) => Some(*v),
            Coefficient::Trace(_) => None,
        }
    }

    /// Mean over the period (exact for the periodic trapezoid rule).
    pub fn mean(&self) -> Complex64 {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Trace(tr) => kahan_sum_complex(tr.iter().copied()) / tr.len() as f64,
        }
    }

    pub fn sample(&self, i: usize) -> Complex64 {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Trace(tr) => tr[i % tr.len()],
        }
    }

    pub fn trace_len(&self) -> Option<usize> {
        match self {
            Coefficient::Constant(_) => None,
            Coefficient::Trace(tr) => Some(tr.len()),
        }
    }

}

/// Zero-order term: constant, x₁-trace, or a full (T,T)-periodic sample
/// grid q(x₁,x₂) (row-major N×N).
#[derive(Debug, Clone)]
pub enum QTerm {
    Constant(Complex64),
    Trace(Vec<Complex64>),
    Field { samples: Vec<Complex64>, n: usize },
}

impl QTerm {
    pub fn mean(&self) -> Complex64 {
        match self {
            QTerm::Constant(v) => *v,
            QTerm::Trace(tr) => kahan_sum_complex(tr.iter().copied()) / tr.len() as f64,
            QTerm::Field { samples, .. } => {
                kahan_sum_complex(samples.iter().copied()) / samples.len() as f64
            }
        }
    }

    pub fn depends_on_x2(&self) -> bool {
        matches!(self, QTerm::Field { .. })
    }

    /// View as an x₁-coefficient when it does not depend on x₂.
    pub fn as_coefficient(&self) -> Option<Coefficient> {
        match self {
            QTerm::Constant(v) => Some(Coefficient::Constant(*v)),
            QTerm::Trace(tr) => Some(Coefficient::Trace(tr.clone())),
            QTerm::Field { .. } => None,
        }
    }
}

/// The operator L = ∂₁ + c(x₁)∂₂ + q with its ambient θ structure (n = 2).
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub c: Coefficient,
    pub q: QTerm,
    pub theta: ThetaSpec,
}

/// Amplitude fraction of a trace's top-octave spectrum, the smooth
/// periodic-continuation check.
fn trace_tail_ratio(trace: &[Complex64]) -> f64 {
    let n = trace.len();
    let mut spec = trace.to_vec();
    fft_1d(&mut spec, false);
    let peak = max_abs(&spec);
    if peak == 0.0 {
        return 0.0;
    }
    let tail = spec
        .iter()
        .enumerate()
        .filter(|&(k, _)| {
            let freq = if 2 * k <= n { k } else { n - k };
            freq > n / 4
        })
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    tail / peak
}

impl OperatorSpec {
    pub fn new(c: Coefficient, q: QTerm, theta: ThetaSpec) -> Result<Self> {
        if theta.dim() != 2 {
            return Err(Error::DimensionMismatch(
                "operator diagnosis lives on the two-dimensional structure".into(),
            ));
        }
        if let Coefficient::Trace(tr) = &c {
            Self::validate_trace(tr, "c")?;
        }
        if let (Coefficient::Trace(ct), QTerm::Trace(qt)) = (&c, &q) {
            if ct.len() != qt.len() {
                return Err(Error::DimensionMismatch(format!(
                    "c trace length {} vs q trace length {}",
                    ct.len(),
                    qt.len()
                )));
            }
        }
        match &q {
            QTerm::Trace(tr) => Self::validate_trace(tr, "q")?,
            QTerm::Field { samples, n } => {
                if samples.len() != n * n {
                    return Err(Error::InvalidInput(format!(
                        "q field needs {}x{} samples, got {}",
                        n,
                        n,
                        samples.len()
                    )));
                }
            }
            QTerm::Constant(_) => {}
        }
        Ok(OperatorSpec { c, q, theta })
    }

    fn validate_trace(trace: &[Complex64], name: &str) -> Result<()> {
        if trace.len() < 4 {
            return Err(Error::InvalidInput(format!("{name} trace too short")));
        }
        if trace.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} trace has non-finite samples")));
        }
        let ratio = trace_tail_ratio(trace);
        if ratio > TRACE_SMOOTHNESS_TOL {
            return Err(Error::InvalidInput(format!(
                "{name} trace does not continue smoothly across the period \
                 (top-octave amplitude ratio {ratio:.3e})"
            )));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.c.is_constant() && matches!(self.q, QTerm::Constant(_))
    }
}

/// Coefficients of the conjugated operator L̃ = (T/2π)·Ω∘L∘Ω⁻¹, i.e.
/// L̃ = ∂₁ + c_eff·∂₂ + zero_order on the 2π-periodic side, plus the
/// period means used by the averaged reductions.
#[derive(Debug, Clone)]
pub struct TildeParams {
    /// Coefficient of ∂₂; the trace samples are reinterpreted on the
    /// 2π grid (t ↦ c(Tt/2π) has the same uniform samples).
    pub c_eff: Coefficient,
    /// (log θ₁ + c·log θ₂)/2π + (T/2π)·q. None when q genuinely depends
    /// on x₂ (the zero order is then not a function of x₁ alone).
    pub zero_order: Option<Coefficient>,
    pub a0: f64,
    pub b0: f64,
    pub c0: Complex64,
    pub q0: Complex64,
}

pub fn tilde_params(op: &OperatorSpec) -> TildeParams {
    let logs = op.theta.log_theta();
    let t = op.theta.period();
    let c0 = op.c.mean();
    let q0 = op.q.mean();
    let zero_order = op.q.as_coefficient().map(|qc| {
        // broadcast shapes: constant + trace mixes promote to traces
        match (&op.c, &qc) {
            (Coefficient::Constant(c), Coefficient::Constant(q)) => Coefficient::Constant(
                (logs[0] + c * logs[1]) / (2.0 * PI) + q * t / (2.0 * PI),
            ),
            _ => {
                let len = op
                    .c
                    .trace_len()
                    .or(qc.trace_len())
                    .expect("at least one side is a trace");
                Coefficient::Trace(
                    (0..len)
                        .map(|i| {
                            (logs[0] + op.c.sample(i) * logs[1]) / (2.0 * PI)
                                + qc.sample(i) * t / (2.0 * PI)
                        })
                        .collect(),
                )
            }
        }
    });
    TildeParams {
        c_eff: op.c.clone(),
        zero_order,
        a0: c0.re,
        b0: c0.im,
        c0,
        q0,
    }
}

/// σ(ξ) = ξ₁ + cξ₂ − i[(log θ₁ + c·log θ₂)/2π + qT/2π] for constant c, q.
pub fn constant_symbol(c: Complex64, q: Complex64, theta: &ThetaSpec, xi: [i64; 2]) -> Complex64 {
    let logs = theta.log_theta();
    let t = theta.period();
    let zero_order = (logs[0] + c * logs[1]) / (2.0 * PI) + q * t / (2.0 * PI);
    Complex64::new(xi[0] as f64, 0.0) + c * xi[1] as f64 - Complex64::new(0.0, 1.0) * zero_order
}

/// Ψ-phases removing the oscillating parts of a(t) and q(t) on the 2π
/// grid: A(t) = ∫₀ᵗ a − a₀t and Q(t) = ∫₀ᵗ q − q₀t, both 2π-periodic.
/// Computed spectrally, exact on band-limited traces.
pub fn psi_phase(a_trace: &[Complex64], q_trace: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if a_trace.len() != q_trace.len() {
        return Err(Error::DimensionMismatch("psi phases need equal-length traces".into()));
    }
    if a_trace.len() < 4 {
        return Err(Error::InvalidInput("traces too short".into()));
    }
    let two_pi = 2.0 * PI;
    let a0 = kahan_sum_complex(a_trace.iter().copied()) / a_trace.len() as f64;
    let q0 = kahan_sum_complex(q_trace.iter().copied()) / q_trace.len() as f64;
    let a_fluct: Vec<Complex64> = a_trace.iter().map(|v| v - a0).collect();
    let q_fluct: Vec<Complex64> = q_trace.iter().map(|v| v - q0).collect();
    Ok((
        periodic_antiderivative(&a_fluct, two_pi),
        periodic_antiderivative(&q_fluct, two_pi),
    ))
}

/// Three-valued diagnosis answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Answer {
    Yes,
    No,
    Undecided,
}

/// A stable lower-bound pair: |σ(ξ)| ≥ c·⟨ξ⟩^{−k} over the scanned box.
/// (Equivalent to the (1 + ‖ξ‖²)^{−k'} convention with k' = k/2.)
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundConstants {
    pub c: f64,
    pub k: f64,
}

/// Scan and classification controls.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosisParams {
    /// Half-width of the lattice box |ξ_j| ≤ Ξ.
    pub cutoff: usize,
    /// Candidate decay exponents k for the ⟨ξ⟩^{−k} bound, ascending.
    pub k_grid: Vec<f64>,
    /// Smallest admissible bound constant.
    pub c_floor: f64,
    /// Continued-fraction depth for real-coefficient classification.
    pub cf_depth: usize,
    /// Exponent threshold handed to the classifier.
    pub cf_k_max: f64,
}

impl Default for DiagnosisParams {
    fn default() -> Self {
        DiagnosisParams {
            cutoff: 64,
            k_grid: vec![0.0, 1.0, 2.0, 4.0, 8.0],
            c_floor: 1e-6,
            cf_depth: 40,
            cf_k_max: 10.0,
        }
    }
}

/// Tolerances echoed into every verdict for reproducibility.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosisTolerances {
    pub symbol_zero: f64,
    pub exceptional: f64,
    pub im_c: f64,
    pub b_zero: f64,
    pub b_sign: f64,
}

impl Default for DiagnosisTolerances {
    fn default() -> Self {
        DiagnosisTolerances {
            symbol_zero: SYMBOL_ZERO_TOL,
            exceptional: EXCEPTIONAL_TOL,
            im_c: IM_C_TOL,
            b_zero: B_ZERO_TOL,
            b_sign: B_SIGN_TOL,
        }
    }
}

/// The diagnosis outcome: GH/GS answers, the clause that produced them,
/// witnesses, and any Diophantine evidence used.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityVerdict {
    pub gh: Answer,
    /// True when gh rests on finite evidence (lattice scan or finite
    /// continued-fraction data) rather than an analytic clause.
    pub gh_evidence_only: bool,
    pub gs: Answer,
    pub gs_evidence_only: bool,
    pub route: String,
    /// Symbol zeros found in the box (capped at 16 entries).
    pub witnesses: Vec<[i64; 2]>,
    pub witness_count: usize,
    /// Description of an infinite zero pattern, e.g. "xi1 = 0".
    pub witness_line: Option<String>,
    pub diophantine: Option<DiophantineClass>,
    pub constants: Option<BoundConstants>,
    pub notes: Vec<String>,
    pub tolerances: DiagnosisTolerances,
}

impl RegularityVerdict {
    fn undecided(route: impl Into<String>, note: impl Into<String>) -> Self {
        RegularityVerdict {
            gh: Answer::Undecided,
            gh_evidence_only: true,
            gs: Answer::Undecided,
            gs_evidence_only: true,
            route: route.into(),
            witnesses: Vec::new(),
            witness_count: 0,
            witness_line: None,
            diophantine: None,
            constants: None,
            notes: vec![note.into()],
            tolerances: DiagnosisTolerances::default(),
        }
    }
}

struct ZeroScan {
    zeros: Vec<[i64; 2]>,
    line: Option<String>,
}

/// All symbol zeros in the box. For an affine symbol two zeros force a
/// whole lattice line of them, which is the infinitely-many pattern.
fn scan_zeros(c: Complex64, q: Complex64, theta: &ThetaSpec, cutoff: usize) -> ZeroScan {
    let xi_max = cutoff as i64;
    let mut zeros: Vec<[i64; 2]> = (-xi_max..=xi_max)
        .into_par_iter()
        .flat_map_iter(|xi1| {
            (-xi_max..=xi_max).filter_map(move |xi2| {
                let s = constant_symbol(c, q, theta, [xi1, xi2]);
                let norm_xi = ((xi1 * xi1 + xi2 * xi2) as f64).sqrt();
                (s.norm() < SYMBOL_ZERO_TOL * (1.0 + norm_xi)).then_some([xi1, xi2])
            })
        })
        .collect();
    zeros.sort();
    let line = if zeros.len() >= 2 {
        let d = [zeros[1][0] - zeros[0][0], zeros[1][1] - zeros[0][1]];
        Some(if d[0] == 0 {
            format!("xi1 = {}", zeros[0][0])
        } else if d[1] == 0 {
            format!("xi2 = {}", zeros[0][1])
        } else {
            format!(
                "through ({}, {}) with direction ({}, {})",
                zeros[0][0], zeros[0][1], d[0], d[1]
            )
        })
    } else {
        None
    };
    ZeroScan { zeros, line }
}

/// Smallest k in the grid whose bound constant has stabilized: the min of
/// |σ(ξ)|·⟨ξ⟩^k over the full box must stay within 10% of the half-box
/// min (a min still decaying with the box is not evidence) and above the
/// floor. Zero modes are excluded.
fn scan_bound(
    c: Complex64,
    q: Complex64,
    theta: &ThetaSpec,
    params: &DiagnosisParams,
    zeros: &[[i64; 2]],
) -> Option<BoundConstants> {
    let xi_max = params.cutoff as i64;
    let half = (params.cutoff / 2) as i64;
    let is_zero = |xi: &[i64; 2]| zeros.binary_search(xi).is_ok();
    for &k in &params.k_grid {
        let mins = (-xi_max..=xi_max)
            .into_par_iter()
            .map(|xi1| {
                let mut full = f64::INFINITY;
                let mut inner = f64::INFINITY;
                for xi2 in -xi_max..=xi_max {
                    if is_zero(&[xi1, xi2]) {
                        continue;
                    }
                    let value = constant_symbol(c, q, theta, [xi1, xi2]).norm()
                        * bracket(&[xi1, xi2]).powf(k);
                    full = full.min(value);
                    if xi1.abs() <= half && xi2.abs() <= half {
                        inner = inner.min(value);
                    }
                }
                (full, inner)
            })
            .reduce(
                || (f64::INFINITY, f64::INFINITY),
                |a, b| (a.0.min(b.0), a.1.min(b.1)),
            );
        let (full, inner) = mins;
        if full.is_finite() && full >= params.c_floor && full >= 0.9 * inner {
            return Some(BoundConstants { c: full, k });
        }
    }
    None
}

/// Membership of q in the exceptional coset
/// −(log θ₁ + c·log θ₂)/T + (2πi/T)(Z + cZ), searched over |m|,|n| ≤ Ξ.
fn exceptional_membership(
    c: f64,
    q: Complex64,
    theta: &ThetaSpec,
    cutoff: usize,
) -> Option<(i64, i64)> {
    let logs = theta.log_theta();
    let t = theta.period();
    let base = -(logs[0] + Complex64::new(c, 0.0) * logs[1]) / t;
    let step = Complex64::new(0.0, 2.0 * PI / t);
    let tol = EXCEPTIONAL_TOL * (1.0 + q.norm());
    let xi_max = cutoff as i64;
    let mut best: Option<((i64, i64), f64)> = None;
    for m in -xi_max..=xi_max {
        for n in -xi_max..=xi_max {
            let target = base + step * (Complex64::new(m as f64, 0.0) + Complex64::new(c * n as f64, 0.0));
            let d = (q - target).norm();
            if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
                best = Some(((m, n), d));
            }
        }
    }
    best.map(|(mn, _)| mn)
}

fn cap_witnesses(zeros: &[[i64; 2]]) -> Vec<[i64; 2]> {
    zeros.iter().take(16).copied().collect()
}

/// Diagnosis for constant coefficients.
pub fn diagnose_constant(op: &OperatorSpec, params: &DiagnosisParams) -> Result<RegularityVerdict> {
    let (c, q) = match (op.c.constant_value(), &op.q) {
        (Some(c), QTerm::Constant(q)) => (c, *q),
        _ => {
            return Err(Error::InvalidInput(
                "diagnose_constant requires constant coefficients; use diagnose_variable".into(),
            ))
        }
    };
    let mut verdict = RegularityVerdict {
        gh: Answer::Undecided,
        gh_evidence_only: true,
        gs: Answer::Undecided,
        gs_evidence_only: true,
        route: String::new(),
        witnesses: Vec::new(),
        witness_count: 0,
        witness_line: None,
        diophantine: None,
        constants: None,
        notes: Vec::new(),
        tolerances: DiagnosisTolerances::default(),
    };

    // (a) Im c ≠ 0: globally hypoelliptic and solvable outright.
    if c.im.abs() > IM_C_TOL {
        verdict.gh = Answer::Yes;
        verdict.gh_evidence_only = false;
        verdict.gs = Answer::Yes;
        verdict.gs_evidence_only = false;
        verdict.route = "constant coefficients: Im(c) != 0".into();
        return Ok(verdict);
    }

    let c_re = c.re;
    let scan = scan_zeros(Complex64::new(c_re, 0.0), q, &op.theta, params.cutoff);
    verdict.witness_count = scan.zeros.len();
    verdict.witnesses = cap_witnesses(&scan.zeros);
    verdict.witness_line = scan.line.clone();

    // (b) real c with q in the exceptional coset: the Diophantine nature
    // of c decides.
    if let Some((m, n)) = exceptional_membership(c_re, q, &op.theta, params.cutoff) {
        let dio = classify_real(c_re, params.cf_depth, params.cf_k_max)?;
        let constants = scan_bound(Complex64::new(c_re, 0.0), q, &op.theta, params, &scan.zeros);
        verdict.notes.push(format!(
            "q lies in the exceptional coset at (m, n) = ({m}, {n})"
        ));
        match &dio.kind {
            DiophKind::Rational { p, q: den } => {
                verdict.gh = Answer::No;
                verdict.gh_evidence_only = false;
                verdict.gs = Answer::Yes;
                verdict.gs_evidence_only = false;
                verdict.route = format!(
                    "exceptional q, rational c = {p}/{den}: not hypoelliptic, solvable"
                );
                verdict.constants = constants;
            }
            DiophKind::QuadraticIrrationalEvidence { .. } | DiophKind::NonLiouvilleEvidence { .. } => {
                verdict.gh = Answer::Yes;
                verdict.gh_evidence_only = true;
                verdict.gs = Answer::Yes;
                verdict.gs_evidence_only = true;
                verdict.route =
                    "exceptional q, irrational non-Liouville evidence for c".into();
                verdict.constants = constants;
                if constants.is_none() {
                    verdict
                        .notes
                        .push("no stable (C, k) bound found over the box".into());
                }
            }
            DiophKind::LiouvilleSuspect => {
                verdict.gh = Answer::No;
                verdict.gh_evidence_only = true;
                verdict.gs = Answer::No;
                verdict.gs_evidence_only = true;
                verdict.route = "exceptional q, Liouville-suspect c".into();
                verdict.notes.push(format!(
                    "approximation exponent {:.3} exceeded the threshold",
                    dio.best_exponent
                ));
            }
        }
        verdict.diophantine = Some(dio);
        return Ok(verdict);
    }

    // an infinite zero pattern without exceptional membership should not
    // occur for an affine symbol, but the zeros rule regardless
    if scan.zeros.len() >= 2 {
        verdict.gh = Answer::No;
        verdict.gh_evidence_only = false;
        verdict.route = format!(
            "symbol vanishes along {}",
            scan.line.as_deref().unwrap_or("a lattice line")
        );
        let constants = scan_bound(Complex64::new(c_re, 0.0), q, &op.theta, params, &scan.zeros);
        verdict.gs = if constants.is_some() { Answer::Yes } else { Answer::Undecided };
        verdict.gs_evidence_only = true;
        verdict.constants = constants;
        return Ok(verdict);
    }

    // (c) generic q: exhaustive bound check over the box.
    let constants = scan_bound(Complex64::new(c_re, 0.0), q, &op.theta, params, &scan.zeros);
    match constants {
        Some(bc) => {
            verdict.gh = Answer::Yes;
            verdict.gh_evidence_only = true;
            verdict.gs = Answer::Yes;
            verdict.gs_evidence_only = true;
            verdict.route = format!(
                "symbol bound |sigma| >= {:.3e}*<xi>^-{} stable over the box",
                bc.c, bc.k
            );
            verdict.constants = Some(bc);
        }
        None => {
            verdict.gh = Answer::Undecided;
            verdict.gs = Answer::Undecided;
            verdict.route = "no stable symbol bound within the k grid".into();
            verdict
                .notes
                .push("bound minima kept decaying with the box or fell below the floor".into());
        }
    }
    Ok(verdict)
}

/// Diagnosis for x₁-dependent coefficients per the reducible clauses:
/// one-signed Im c decides outright; b ≡ 0 reduces to the averaged
/// constant operator when q is at most x₁-dependent or a₀ carries
/// non-Liouville evidence; anything else is left undecided.
pub fn diagnose_variable(op: &OperatorSpec, params: &DiagnosisParams) -> Result<RegularityVerdict> {
    if op.is_constant() {
        return diagnose_constant(op, params);
    }
    let tp = tilde_params(op);

    let (b_max_abs, b_min, b_max) = match &op.c {
        Coefficient::Constant(v) => (v.im.abs(), v.im, v.im),
        Coefficient::Trace(tr) => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut sup = 0.0f64;
            for v in tr {
                lo = lo.min(v.im);
                hi = hi.max(v.im);
                sup = sup.max(v.im.abs());
            }
            (sup, lo, hi)
        }
    };

    // (a) b ≢ 0 and one-signed: globally hypoelliptic, hence solvable.
    if b_max_abs > B_ZERO_TOL {
        let one_signed = b_min >= -B_SIGN_TOL || b_max <= B_SIGN_TOL;
        if one_signed {
            let mut v = RegularityVerdict {
                gh: Answer::Yes,
                gh_evidence_only: false,
                gs: Answer::Yes,
                gs_evidence_only: false,
                route: "Im c does not change sign (and is not identically zero); \
                        hypoellipticity implies solvability"
                    .into(),
                witnesses: Vec::new(),
                witness_count: 0,
                witness_line: None,
                diophantine: None,
                constants: None,
                notes: Vec::new(),
                tolerances: DiagnosisTolerances::default(),
            };
            v.notes.push(format!("b range [{b_min:.3e}, {b_max:.3e}]"));
            return Ok(v);
        }
        return Ok(RegularityVerdict::undecided(
            "Im c changes sign",
            format!(
                "b ranges over [{b_min:.3e}, {b_max:.3e}]; no clause of the \
                 reducible theory applies"
            ),
        ));
    }

    // (b) b ≡ 0: reduce to the averaged constants when licensed.
    let q_low_dim = !op.q.depends_on_x2();
    let dio = classify_real(tp.a0, params.cf_depth, params.cf_k_max)?;
    let a0_nice = dio.is_non_liouville_evidence();
    if q_low_dim || a0_nice {
        let averaged = OperatorSpec::new(
            Coefficient::Constant(Complex64::new(tp.a0, 0.0)),
            QTerm::Constant(tp.q0),
            op.theta.clone(),
        )?;
        let mut inner = diagnose_constant(&averaged, params)?;
        let license = if q_low_dim {
            "q depends on x1 only".to_string()
        } else {
            // reduction only as good as the Diophantine evidence behind it
            inner.gh_evidence_only = true;
            inner.gs_evidence_only = true;
            "a0 carries non-Liouville evidence".to_string()
        };
        inner.route = format!(
            "averaged reduction (psi conjugation, {license}) -> {}",
            inner.route
        );
        if inner.diophantine.is_none() {
            inner.diophantine = Some(dio);
        }
        return Ok(inner);
    }

    Ok(RegularityVerdict::undecided(
        "b identically zero, q depends on both variables, a0 not classified non-Liouville",
        "outside the reducible hypotheses; no criterion available",
    ))
}
