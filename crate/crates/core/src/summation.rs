//! Fixed-order reductions.
//!
//! Every reduction that feeds an estimate goes through these helpers so the
//! result depends only on the order of the inputs, never on how the work that
//! produced them was scheduled.

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise (cascade) summation with a fixed split point.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        acc
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

pub fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Left-to-right dot product. Both the single-vector and the blocked kernels
/// use this order so their results agree bitwise.
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Sample mean and (n - 1)-normalized standard deviation; std is 0 for a
/// single value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let mean = pairwise_mean(values);
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn pairwise_is_more_accurate_than_naive() {
        let v = vec![0.1; 1_000_000];
        let exact = 100_000.0;
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - exact).abs() <= (naive - exact).abs());
    }

    #[test]
    fn std_of_constant_is_zero() {
        let (m, s) = mean_std(&[3.0, 3.0, 3.0]);
        assert_eq!(m, 3.0);
        assert_eq!(s, 0.0);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }
}
