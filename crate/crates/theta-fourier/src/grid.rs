//! Uniform grids on [0,T)ⁿ and sampled complex fields.

use num_complex::Complex64;

use crate::theta::ThetaSpec;
use crate::{Error, Result};

/// Uniform left-closed grid: N samples per axis at x_m = m·T/N, m ∈ [0, N).
/// The right endpoint is identified through the θ-periodicity of the field,
/// so it is never stored. N is a power of two to keep transforms fast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    dim: usize,
    samples: usize,
}

impl GridSpec {
    pub fn new(dim: usize, samples: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if samples < 4 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N must be a power of two >= 4, got {samples}"
            )));
        }
        Ok(GridSpec { dim, samples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis.
    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Total number of nodes, N^n.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of a flat row-major index.
    pub fn coords(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.samples, idx % self.samples],
        }
    }

    /// Flat index of a multi-index (second component ignored for n = 1).
    pub fn flat(&self, m: [usize; 2]) -> usize {
        match self.dim {
            1 => m[0],
            _ => m[0] * self.samples + m[1],
        }
    }

    /// Node coordinates for period `t`: x_j = m_j·t/N.
    pub fn node(&self, idx: usize, t: f64) -> [f64; 2] {
        let m = self.coords(idx);
        let h = t / self.samples as f64;
        [m[0] as f64 * h, m[1] as f64 * h]
    }
}

/// Complex samples of a (θ,T)-periodic function on the base cell [0,T)ⁿ.
/// Together with θ this determines the function on all of Rⁿ through
/// f(x + T·e_j) = θ_j f(x); see [`crate::extend`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    theta: ThetaSpec,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn from_values(theta: ThetaSpec, grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if grid.dim() != theta.dim() {
            return Err(Error::DimensionMismatch(format!(
                "grid dimension {} vs theta dimension {}",
                grid.dim(),
                theta.dim()
            )));
        }
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("field contains non-finite samples".into()));
        }
        Ok(SampledField { grid, theta, values })
    }

    /// Sample a closure at the grid nodes. The closure receives the node
    /// coordinates (length-2 slice; second entry is 0 for n = 1).
    pub fn from_fn(
        theta: ThetaSpec,
        samples: usize,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let grid = GridSpec::new(theta.dim(), samples)?;
        let t = theta.period();
        let values = (0..grid.len())
            .map(|idx| f(&grid.node(idx, t)[..grid.dim()]))
            .collect();
        Self::from_values(theta, grid, values)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn theta_spec(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Replace the θ tag without touching samples. Used by the conjugation,
    /// which reinterprets the same node data under a different structure.
    pub(crate) fn retag(&self, theta: ThetaSpec, values: Vec<Complex64>) -> Result<Self> {
        Self::from_values(theta, self.grid, values)
    }

    /// Pointwise map of the samples.
    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i, v))
            .collect();
        Self::from_values(self.theta.clone(), self.grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        crate::util::max_abs(&self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_n() {
        assert!(GridSpec::new(1, 3).is_err());
        assert!(GridSpec::new(1, 12).is_err());
        assert!(GridSpec::new(1, 2).is_err());
        assert!(GridSpec::new(3, 8).is_err());
        assert!(GridSpec::new(1, 8).is_ok());
    }

    #[test]
    fn indexing_round_trips() {
        let g = GridSpec::new(2, 8).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.flat(g.coords(idx)), idx);
        }
    }

    #[test]
    fn nodes_exclude_right_endpoint() {
        let g = GridSpec::new(1, 8).unwrap();
        let last = g.node(7, 2.0)[0];
        assert!(last < 2.0);
        assert!((last - 1.75).abs() < 1e-15);
    }

    #[test]
    fn field_validates_lengths() {
        let theta = ThetaSpec::scalar(Complex64::new(1.0, 0.0), 1.0).unwrap();
        let grid = GridSpec::new(1, 8).unwrap();
        assert!(SampledField::from_values(theta.clone(), grid, vec![Complex64::new(0.0, 0.0); 7]).is_err());
        assert!(
            SampledField::from_values(theta, grid, vec![Complex64::new(f64::NAN, 0.0); 8]).is_err()
        );
    }
}
