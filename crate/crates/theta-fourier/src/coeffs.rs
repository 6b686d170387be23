//! Finite Fourier coefficient tables on the cutoff box |ξ_j| ≤ Ξ.

use num_complex::Complex64;

use crate::theta::ThetaSpec;
use crate::{Error, Result};

/// Dense table of coefficients f̂(ξ) for every lattice point of the box
/// |ξ_j| ≤ Ξ (explicit zeros included). Row-major over (ξ₁ + Ξ, ξ₂ + Ξ).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    theta: ThetaSpec,
    cutoff: usize,
    entries: Vec<Complex64>,
}

impl CoeffTable {
    pub fn zeros(theta: ThetaSpec, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidInput("cutoff must be positive".into()));
        }
        let side = 2 * cutoff + 1;
        let len = side.pow(theta.dim() as u32);
        Ok(CoeffTable {
            theta,
            cutoff,
            entries: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn from_entries(
        theta: ThetaSpec,
        cutoff: usize,
        entries: Vec<Complex64>,
    ) -> Result<Self> {
        let mut table = Self::zeros(theta, cutoff)?;
        if entries.len() != table.entries.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for cutoff {cutoff}, got {}",
                table.entries.len(),
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("coefficient table contains non-finite entries".into()));
        }
        table.entries = entries;
        Ok(table)
    }

    /// Single-mode table: f̂(ξ) = value, everything else zero.
    pub fn single_mode(theta: ThetaSpec, cutoff: usize, xi: &[i64], value: Complex64) -> Result<Self> {
        let mut table = Self::zeros(theta, cutoff)?;
        table.set(xi, value)?;
        Ok(table)
    }

    pub fn theta_spec(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.len() == self.dim() && xi.iter().all(|&k| k.unsigned_abs() as usize <= self.cutoff)
    }

    fn index(&self, xi: &[i64]) -> Option<usize> {
        if !self.contains(xi) {
            return None;
        }
        let c = self.cutoff as i64;
        Some(match self.dim() {
            1 => (xi[0] + c) as usize,
            _ => (xi[0] + c) as usize * self.side() + (xi[1] + c) as usize,
        })
    }

    /// Coefficient at ξ; zero outside the box.
    pub fn get(&self, xi: &[i64]) -> Complex64 {
        self.index(xi)
            .map(|i| self.entries[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, xi: &[i64], value: Complex64) -> Result<()> {
        let idx = self
            .index(xi)
            .ok_or_else(|| Error::InvalidInput(format!("mode {xi:?} outside cutoff box")))?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        self.entries[idx] = value;
        Ok(())
    }

    /// Iterate (ξ, f̂(ξ)) over the whole box in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        let c = self.cutoff as i64;
        let side = self.side();
        let dim = self.dim();
        self.entries.iter().enumerate().map(move |(i, &v)| {
            let xi = match dim {
                1 => vec![i as i64 - c],
                _ => vec![(i / side) as i64 - c, (i % side) as i64 - c],
            };
            (xi, v)
        })
    }

    /// Construct a new table of the same shape from a per-mode map.
    pub fn map_modes(&self, f: impl Fn(&[i64], Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        let c = self.cutoff as i64;
        let side = self.side();
        for (i, v) in out.entries.iter_mut().enumerate() {
            let xi = match self.dim() {
                1 => vec![i as i64 - c],
                _ => vec![(i / side) as i64 - c, (i % side) as i64 - c],
            };
            *v = f(&xi, *v);
        }
        out
    }

    /// ℓ² norm of the table, (Σ|f̂(ξ)|²)^{1/2}, compensated summation.
    pub fn l2_norm(&self) -> f64 {
        crate::util::kahan_sum(self.entries.iter().map(|v| v.norm_sqr())).sqrt()
    }

    /// Max |f̂(ξ)| over the box.
    pub fn max_abs(&self) -> f64 {
        crate::util::max_abs(&self.entries)
    }

    /// Fraction of squared-coefficient mass on the outermost shell
    /// max_j |ξ_j| = Ξ. Zero for the zero table.
    pub fn outer_shell_fraction(&self) -> f64 {
        let total = crate::util::kahan_sum(self.iter().map(|(_, v)| v.norm_sqr()));
        if total == 0.0 {
            return 0.0;
        }
        let c = self.cutoff as i64;
        let shell = crate::util::kahan_sum(self.iter().filter_map(|(xi, v)| {
            if xi.iter().any(|&k| k.abs() == c) {
                Some(v.norm_sqr())
            } else {
                None
            }
        }));
        shell / total
    }
}
