//! Evaluation of a sampled (θ,T)-periodic field anywhere on Rⁿ.
//!
//! The point x is split as x = x' + m·T with x' in the base cell; the
//! multiplier ∏_j θ_j^{m_j} accounts for the cell shift and the base-cell
//! value comes from trigonometric interpolation of the conjugated field
//! Ω f, undoing the weight afterwards. On band-limited data this is exact
//! up to rounding.

use num_complex::Complex64;

use crate::fft::fft_nd;
use crate::grid::SampledField;
use crate::transform::omega_forward;
use crate::{Error, Result};

/// Precomputed interpolant for repeated point evaluation of one field.
pub struct Interpolant {
    dim: usize,
    samples: usize,
    period: f64,
    log_theta: Vec<Complex64>,
    theta_field: SampledField,
    /// Spectrum of Ω f, index k ∈ [0,N) per axis, normalized by N^{−n}.
    spectrum: Vec<Complex64>,
}

impl Interpolant {
    pub fn new(f: &SampledField) -> Result<Self> {
        let conj = omega_forward(f)?;
        let grid = f.grid();
        let mut spectrum = conj.values().to_vec();
        fft_nd(&mut spectrum, grid.dim(), grid.samples(), false);
        let scale = 1.0 / grid.len() as f64;
        for v in &mut spectrum {
            *v *= scale;
        }
        Ok(Interpolant {
            dim: grid.dim(),
            samples: grid.samples(),
            period: f.theta_spec().period(),
            log_theta: f.theta_spec().log_theta(),
            theta_field: f.clone(),
            spectrum,
        })
    }

    /// Signed frequency and weight for bin k: k > N/2 aliases to k − N and
    /// the Nyquist bin splits evenly between ±N/2.
    fn bin_freqs(&self) -> Vec<Vec<(f64, f64)>> {
        let n = self.samples;
        (0..n)
            .map(|k| {
                if 2 * k < n {
                    vec![(k as f64, 1.0)]
                } else if 2 * k == n {
                    vec![(k as f64, 0.5), (k as f64 - n as f64, 0.5)]
                } else {
                    vec![(k as f64 - n as f64, 1.0)]
                }
            })
            .collect()
    }

    /// Evaluate the field at an arbitrary point x ∈ Rⁿ.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point dimension {} vs field dimension {}",
                x.len(),
                self.dim
            )));
        }
        let t = self.period;
        let mut cell = [0i64; 2];
        let mut base = [0.0f64; 2];
        for (j, &xj) in x.iter().enumerate() {
            let m = (xj / t).floor();
            cell[j] = m as i64;
            base[j] = xj - m * t;
            // guard the open right edge against floating point drift
            if base[j] >= t {
                base[j] -= t;
                cell[j] += 1;
            }
        }
        let multiplier = self
            .theta_field
            .theta_spec()
            .theta_int_pow(&cell[..self.dim]);

        // Ω f at y = 2π x'/T via the spectrum, then undo the weight.
        let freqs = self.bin_freqs();
        let n = self.samples;
        let y: Vec<f64> = base[..self.dim]
            .iter()
            .map(|&b| 2.0 * std::f64::consts::PI * b / t)
            .collect();
        let mut conjugated = Complex64::new(0.0, 0.0);
        match self.dim {
            1 => {
                for (k, &cv) in self.spectrum.iter().enumerate() {
                    for &(freq, w) in &freqs[k] {
                        conjugated += cv * w * Complex64::new(0.0, freq * y[0]).exp();
                    }
                }
            }
            _ => {
                // separable phases: precompute per-axis factors
                let phase1: Vec<Complex64> = freqs
                    .iter()
                    .map(|fs| {
                        fs.iter()
                            .map(|&(freq, w)| Complex64::new(0.0, freq * y[1]).exp() * w)
                            .sum()
                    })
                    .collect();
                for k0 in 0..n {
                    let mut row = Complex64::new(0.0, 0.0);
                    for k1 in 0..n {
                        row += self.spectrum[k0 * n + k1] * phase1[k1];
                    }
                    for &(freq, w) in &freqs[k0] {
                        conjugated += row * w * Complex64::new(0.0, freq * y[0]).exp();
                    }
                }
            }
        }
        let mut unweight = Complex64::new(0.0, 0.0);
        for (j, l) in self.log_theta.iter().enumerate() {
            unweight += l * (base[j] / t);
        }
        Ok(multiplier * unweight.exp() * conjugated)
    }
}

/// One-shot evaluation; builds the interpolant internally. Use
/// [`Interpolant`] directly when evaluating many points of the same field.
pub fn extend_field(f: &SampledField, x: &[f64]) -> Result<Complex64> {
    Interpolant::new(f)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::ThetaSpec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn periodic_case_wraps() {
        // θ=1, T=2π, f=sin: value at 2π + 0.5 is sin(0.5)
        let spec = ThetaSpec::unit(1, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(spec, 64, |x| c(x[0].sin(), 0.0)).unwrap();
        let v = extend_field(&f, &[2.0 * PI + 0.5]).unwrap();
        assert!((v - c(0.5f64.sin(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn doubling_extension() {
        // θ=2, T=1, f=2^x: value at 2.25 is 4·2^{0.25}
        let spec = ThetaSpec::scalar(c(2.0, 0.0), 1.0).unwrap();
        let f = SampledField::from_fn(spec, 128, |x| c(2.0f64.powf(x[0]), 0.0)).unwrap();
        let v = extend_field(&f, &[2.25]).unwrap();
        assert!((v - c(4.0 * 2.0f64.powf(0.25), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn antiperiodic_extension() {
        // θ=−1, T=2π, f=e^{ix/2}: value at exactly 2π is −1
        let spec = ThetaSpec::scalar(c(-1.0, 0.0), 2.0 * PI).unwrap();
        let f = SampledField::from_fn(spec, 64, |x| Complex64::from_polar(1.0, x[0] / 2.0)).unwrap();
        let v = extend_field(&f, &[2.0 * PI]).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn twist_relation_random_points() {
        // f(x + T e_j) = θ_j f(x) for random x, both axes
        let spec = ThetaSpec::new(vec![c(0.5, 0.5), c(-2.0, 0.0)], 1.5).unwrap();
        let f = SampledField::from_fn(spec.clone(), 32, |x| {
            let y0 = 2.0 * PI * x[0] / 1.5;
            let y1 = 2.0 * PI * x[1] / 1.5;
            let smooth = c((y0.cos() + (2.0 * y1).sin()) * 0.5 + 1.0, y0.sin() * y1.cos());
            // weight to make it genuinely (θ,T)-periodic
            let l = spec.log_theta();
            (Complex64::new(0.0, 0.0) + l[0] * (x[0] / 1.5) + l[1] * (x[1] / 1.5)).exp() * smooth
        })
        .unwrap();
        let interp = Interpolant::new(&f).unwrap();
        let points = [[0.3, 0.7], [1.1, 0.05], [-0.4, 2.9]];
        for p in points {
            let base = interp.eval(&p).unwrap();
            for j in 0..2 {
                let mut shifted = p;
                shifted[j] += 1.5;
                let v = interp.eval(&shifted).unwrap();
                let expect = base * spec.theta()[j];
                assert!(
                    (v - expect).norm() <= 1e-9 * (1.0 + expect.norm()),
                    "p={p:?} j={j}: {v} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn node_values_reproduced() {
        let spec = ThetaSpec::scalar(c(3.0, 1.0), 0.7).unwrap();
        let f = SampledField::from_fn(spec.clone(), 16, |x| {
            let l = spec.log_theta()[0];
            (l * (x[0] / 0.7)).exp() * c((2.0 * PI * x[0] / 0.7).cos(), 0.3)
        })
        .unwrap();
        let interp = Interpolant::new(&f).unwrap();
        for idx in 0..16 {
            let x = f.grid().node(idx, 0.7)[0];
            let v = interp.eval(&[x]).unwrap();
            assert!((v - f.value(idx)).norm() <= 1e-11 * (1.0 + f.value(idx).norm()));
        }
    }
}
