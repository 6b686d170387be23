//! Small numeric helpers shared across modules.

use num_complex::Complex64;

/// Compensated (Kahan) summation. Order-independent up to one rounding
/// unit, which keeps norm computations deterministic across refactors.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Kahan summation for complex values (real and imaginary tracked separately).
pub fn kahan_sum_complex(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut carry = Complex64::new(0.0, 0.0);
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Japanese bracket ⟨ξ⟩ = (1 + ‖ξ‖²)^{1/2} for a lattice point.
pub fn bracket(xi: &[i64]) -> f64 {
    let norm_sq: f64 = xi.iter().map(|&k| (k as f64) * (k as f64)).sum();
    (1.0 + norm_sq).sqrt()
}

/// Relative gap |a − b| / (1 + max(|a|, |b|)).
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

/// Max |a_i − b_i| over two equal-length slices.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max |a_i| over a slice.
pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Ordinary least squares slope of y against x. Returns 0 for fewer than
/// two points or degenerate x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len();
    if m < 2 {
        return 0.0;
    }
    let mx = kahan_sum(x.iter().copied()) / m as f64;
    let my = kahan_sum(y.iter().copied()) / m as f64;
    let sxx = kahan_sum(x.iter().map(|&v| (v - mx) * (v - mx)));
    if sxx == 0.0 {
        return 0.0;
    }
    let sxy = kahan_sum(x.iter().zip(y).map(|(&u, &v)| (u - mx) * (v - my)));
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_cancellation() {
        // 1 + 1e-16 repeated: naive sum loses the small terms
        let n = 10_000_000usize;
        let s = kahan_sum(std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, n)));
        assert!((s - (1.0 + n as f64 * 1e-16)).abs() < 1e-12);
    }

    #[test]
    fn dist_to_int_basic() {
        assert_eq!(dist_to_int(3.0), 0.0);
        assert!((dist_to_int(-0.5) - 0.5).abs() < 1e-15);
        assert!((dist_to_int(2.75) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((ls_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket(&[0]), 1.0);
        assert!((bracket(&[3, 4]) - 26.0f64.sqrt()).abs() < 1e-15);
    }
}
