//! Thin FFT layer over rustfft for 1D/2D unnormalized transforms.
//!
//! Forward: X_k = Σ_m x_m e^{−2πi mk/N}. Inverse: x_m = Σ_k X_k e^{+2πi mk/N}.
//! Callers apply their own normalization. Row-major layout for 2D:
//! `data[i0 * n + i1]`, transforms applied along both axes.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub fn fft_1d(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
}

/// In-place 2D transform of an n×n row-major array: rows, transpose,
/// rows, transpose back.
pub fn fft_2d(data: &mut [Complex64], n: usize, inverse: bool) {
    assert_eq!(data.len(), n * n);
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose_square(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose_square(data, n);
}

/// Dimension-dispatching transform for fields stored as N^n row-major.
pub fn fft_nd(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    match dim {
        1 => {
            assert_eq!(data.len(), n);
            fft_1d(data, inverse);
        }
        2 => fft_2d(data, n, inverse),
        _ => unreachable!("dimension restricted to 1 or 2"),
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_1d() {
        let n = 16;
        let mut data: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * PI * 3.0 * m as f64 / n as f64))
            .collect();
        fft_1d(&mut data, false);
        for (k, v) in data.iter().enumerate() {
            let expect = if k == 3 { n as f64 } else { 0.0 };
            assert!((v.norm() - expect).abs() < 1e-9, "bin {k}: {v}");
        }
    }

    #[test]
    fn round_trip_2d() {
        let n = 8;
        let orig: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let mut data = orig.clone();
        fft_2d(&mut data, n, false);
        fft_2d(&mut data, n, true);
        let scale = (n * n) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mode_placement_2d() {
        // e^{i(2y0 + 5y1)} lands in bin (2, 5)
        let n = 16;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i0 in 0..n {
            for i1 in 0..n {
                let y0 = 2.0 * PI * i0 as f64 / n as f64;
                let y1 = 2.0 * PI * i1 as f64 / n as f64;
                data[i0 * n + i1] = Complex64::from_polar(1.0, 2.0 * y0 + 5.0 * y1);
            }
        }
        fft_2d(&mut data, n, false);
        for i0 in 0..n {
            for i1 in 0..n {
                let expect = if (i0, i1) == (2, 5) { (n * n) as f64 } else { 0.0 };
                assert!(
                    (data[i0 * n + i1].norm() - expect).abs() < 1e-8,
                    "bin ({i0},{i1})"
                );
            }
        }
    }
}
