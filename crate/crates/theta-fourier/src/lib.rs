//! Fourier calculus for θ-twisted periodic functions.
//!
//! A function `f: Rⁿ → C` is (θ,T)-periodic when `f(x + T·e_j) = θ_j f(x)`
//! for a vector of nonzero complex multipliers θ and a period T. The
//! classical periodic case is θ = 1 and the antiperiodic case θ = −1;
//! exponentials like `2^x` are (2,1)-periodic.
//!
//! The crate is organized around the conjugation `Ω f(y) = e^{−y·log(θ)/2π} f(Ty/2π)`,
//! which carries (θ,T)-periodic functions to ordinary 2π-periodic ones and
//! back. Everything downstream rides on it:
//!
//! - [`transform`]: Ω and its inverse, weighted L^p norms, the K sandwich
//!   constants.
//! - [`fourier`]: coefficients of the nonuniform exponential basis
//!   `e^{i(2π/T)x·(ξ − i log(θ)/2π)}` via FFT of the conjugated samples,
//!   synthesis, derivative/modulation/translation/dilation rules, and the
//!   L¹ / Plancherel inequality checks.
//! - [`sobolev`]: H^s norms, spectral-decay classification, and the
//!   weighted Sobolev embedding bound.
//! - [`poincare`]: the sharp Poincaré constant `(2π/T)·dist(i log(θ)/2π, Zⁿ)`,
//!   critical-mode projection, and numerical verification.
//! - [`regularity`]: global hypoellipticity / solvability diagnosis for
//!   `L = ∂₁ + c(x₁)∂₂ + q` through the symbol
//!   `ξ₁ + cξ₂ − i[(log θ₁ + c log θ₂)/2π + qT/2π]`, with a
//!   continued-fraction Diophantine classifier in [`diophantine`].
//! - [`odesolve`]: closed-form (θ,T)-periodic solutions of
//!   `u' + λ(x)u = f`, including resonance detection and compatibility
//!   integrals.
//! - [`solver`]: spectral solver for `Lu = f` on n = 2, constant and
//!   t-variable coefficients, by per-mode ODE reduction.
//! - [`verify`]: a seeded, deterministic invariant suite used by the CLI.
//!
//! Fields live on uniform left-closed grids over `[0,T)ⁿ` (n ∈ {1,2});
//! all types are immutable after construction and all operations are pure.

pub mod coeffs;
pub mod diophantine;
pub mod extend;
mod fft;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod odesolve;
pub mod poincare;
pub mod regularity;
pub mod sobolev;
pub mod solver;
pub mod theta;
pub mod transform;
pub mod util;
pub mod verify;

pub use coeffs::CoeffTable;
pub use grid::{GridSpec, SampledField};
pub use theta::ThetaSpec;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid theta spec: {0}")]
    InvalidTheta(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cutoff {cutoff} beyond Nyquist limit {limit} for N = {samples}")]
    CutoffBeyondNyquist {
        cutoff: usize,
        limit: usize,
        samples: usize,
    },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
