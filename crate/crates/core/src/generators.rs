//! Seeded synthetic SPD matrix families.
//!
//! Every generator is a pure function of its [`GeneratorSpec`]. Row `i` draws
//! from stream `i` of the spec's seed, so rows can be produced in parallel and
//! the output is bitwise identical for any thread count.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LogDetError, Result};
use crate::matrix::{Csr, SpdMatrix};
use crate::rng::{RngStream, AUX_STREAM_BASE};

const ENTRY_LOW: f64 = 0.25;
const ENTRY_WIDTH: f64 = 0.5;

/// Attempts before giving up on a numerically rank-deficient QR draw.
const QR_ATTEMPTS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `Q D Q^T` with spectrum in [0.25, 0.75].
    Dense,
    /// `(X + X^T)/2 + n I`, dense and diagonally dominant.
    DenseDd,
    /// Bernoulli sparsity pattern plus `n I`, diagonally dominant.
    SparseDd,
}

impl std::str::FromStr for Family {
    type Err = LogDetError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Family::Dense),
            "dense_dd" => Ok(Family::DenseDd),
            "sparse_dd" => Ok(Family::SparseDd),
            other => Err(LogDetError::param(
                "family",
                format!("unknown generator `{other}` (expected dense, dense_dd or sparse_dd)"),
            )),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Dense => "dense",
            Family::DenseDd => "dense_dd",
            Family::SparseDd => "sparse_dd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    /// Target stored nonzeros; only used by `SparseDd`.
    pub nnz_target: Option<usize>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(LogDetError::param("n", "matrix order must be at least 1"));
        }
        if self.family == Family::SparseDd {
            let nnz = self
                .nnz_target
                .ok_or_else(|| LogDetError::param("nnz_target", "required for sparse_dd"))?;
            check_nnz_target(self.n, nnz)?;
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<SpdMatrix> {
        self.validate()?;
        match self.family {
            Family::Dense => rand_spd_dense(self.n, self.seed),
            Family::DenseDd => rand_spd_dense_dd(self.n, self.seed),
            Family::SparseDd => {
                rand_spd_sparse(self.n, self.nnz_target.unwrap_or(self.n), self.seed)
            }
        }
    }

    pub fn name(&self) -> String {
        match self.nnz_target {
            Some(nnz) if self.family == Family::SparseDd => {
                format!("{}_n{}_nnz{}_s{}", self.family, self.n, nnz, self.seed)
            }
            _ => format!("{}_n{}_s{}", self.family, self.n, self.seed),
        }
    }
}

fn check_nnz_target(n: usize, nnz: usize) -> Result<()> {
    let max = n.saturating_mul(n);
    if nnz < n || nnz > max {
        return Err(LogDetError::param(
            "nnz_target",
            format!("must lie in [{n}, {max}], got {nnz}"),
        ));
    }
    Ok(())
}

#[inline]
fn uniform_entry(rng: &mut impl Rng) -> f64 {
    ENTRY_LOW + ENTRY_WIDTH * rng.random::<f64>()
}

/// Row-major `n x n` matrix with entries uniform in [0.25, 0.75); row `i`
/// comes from stream `first_stream + i`.
fn uniform_square(n: usize, seed: u64, first_stream: u64) -> Vec<f64> {
    let mut x = vec![0.0; n * n];
    x.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let mut rng = RngStream::new(seed, first_stream + i as u64).rng();
        row.iter_mut().for_each(|v| *v = uniform_entry(&mut rng));
    });
    x
}

/// `A = Q D Q^T` where `Q` is the orthonormal factor of a uniform random `X`
/// and `D` is diagonal with entries uniform in [0.25, 0.75].
pub fn rand_spd_dense(n: usize, seed: u64) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(LogDetError::param("n", "matrix order must be at least 1"));
    }
    let mut rng = RngStream::new(seed, AUX_STREAM_BASE).rng();
    let d: Vec<f64> = (0..n).map(|_| uniform_entry(&mut rng)).collect();

    for attempt in 0..QR_ATTEMPTS {
        let x = uniform_square(n, seed, attempt << 40);
        let qr = DMatrix::from_row_slice(n, n, &x).qr();
        let r = qr.r();
        let rmax = r.diagonal().amax();
        if r.diagonal().iter().any(|v| v.abs() <= 1e-12 * rmax) {
            continue;
        }
        let q = qr.q();
        let a = &q * DMatrix::from_diagonal(&DVector::from_vec(d.clone())) * q.transpose();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        return SpdMatrix::from_dense(n, data);
    }
    Err(LogDetError::Numerical(format!(
        "random matrix was rank deficient in {QR_ATTEMPTS} attempts"
    )))
}

/// `A = (X + X^T)/2 + n I` with `X` uniform in [0.25, 0.75).
pub fn rand_spd_dense_dd(n: usize, seed: u64) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(LogDetError::param("n", "matrix order must be at least 1"));
    }
    let x = uniform_square(n, seed, 0);
    let mut a = vec![0.0; n * n];
    a.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = 0.5 * (x[i * n + j] + x[j * n + i]);
        }
        row[i] += n as f64;
    });
    SpdMatrix::from_dense(n, a)
}

/// Sparse diagonally dominant SPD matrix with about `nnz_target` stored
/// entries.
///
/// Each strictly-upper position is kept independently with probability
/// `(nnz_target - n) / (n^2 - n)`; kept positions get a uniform [0.25, 0.75)
/// value and are mirrored below the diagonal. Positions are visited by
/// geometric skipping, so the cost is proportional to the output size. The
/// diagonal is uniform [0.25, 0.75) plus `n`.
pub fn rand_spd_sparse(n: usize, nnz_target: usize, seed: u64) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(LogDetError::param("n", "matrix order must be at least 1"));
    }
    check_nnz_target(n, nnz_target)?;
    let rate = if n == 1 {
        0.0
    } else {
        (nnz_target - n) as f64 / (n as f64 * n as f64 - n as f64)
    };

    let upper: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| sample_upper_row(i, n, rate, RngStream::new(seed, i as u64)))
        .collect();

    let mut rng = RngStream::new(seed, AUX_STREAM_BASE).rng();
    let diag: Vec<f64> = (0..n).map(|_| uniform_entry(&mut rng) + n as f64).collect();

    // Lower part of row i holds (i, k) for every k < i with i in upper[k];
    // visiting k in increasing order keeps those columns sorted.
    let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (k, row) in upper.iter().enumerate() {
        for &(j, v) in row {
            lower[j].push((k, v));
        }
    }

    let total: usize = n + 2 * upper.iter().map(Vec::len).sum::<usize>();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    row_ptr.push(0);
    for i in 0..n {
        for &(k, v) in &lower[i] {
            col_idx.push(k);
            values.push(v);
        }
        col_idx.push(i);
        values.push(diag[i]);
        for &(j, v) in &upper[i] {
            col_idx.push(j);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    SpdMatrix::from_csr(
        n,
        Csr {
            row_ptr,
            col_idx,
            values,
        },
    )
}

fn sample_upper_row(i: usize, n: usize, rate: f64, stream: RngStream) -> Vec<(usize, f64)> {
    let mut rng = stream.rng();
    let mut out = Vec::new();
    if rate <= 0.0 {
        return out;
    }
    if rate >= 1.0 {
        return (i + 1..n).map(|j| (j, uniform_entry(&mut rng))).collect();
    }
    let log_miss = (-rate).ln_1p();
    let mut j = i;
    loop {
        // Gap to the next kept position is geometric with success `rate`.
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let gap = (u.ln() / log_miss).floor();
        if !(gap < (n - j) as f64) {
            break;
        }
        j += gap as usize + 1;
        if j >= n {
            break;
        }
        out.push((j, uniform_entry(&mut rng)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::eigenvalues;

    #[test]
    fn one_by_one_cases() {
        let a = rand_spd_dense(1, 3).unwrap();
        assert!((0.25..=0.75).contains(&a.get(0, 0)));
        let a = rand_spd_dense_dd(1, 3).unwrap();
        assert!((1.25..=1.75).contains(&a.get(0, 0)));
        let a = rand_spd_sparse(1, 1, 3).unwrap();
        assert!((1.25..=1.75).contains(&a.get(0, 0)));
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(rand_spd_dense(0, 1).is_err());
        assert!(rand_spd_dense_dd(0, 1).is_err());
        assert!(rand_spd_sparse(0, 0, 1).is_err());
    }

    #[test]
    fn dense_spectrum_lies_in_range() {
        let ev = eigenvalues(&rand_spd_dense(100, 17).unwrap());
        assert!(ev[0] >= 0.25 - 1e-9, "{}", ev[0]);
        assert!(ev[99] <= 0.75 + 1e-9, "{}", ev[99]);
    }

    #[test]
    fn dense_dd_is_strictly_diagonally_dominant() {
        let a = rand_spd_dense_dd(500, 5).unwrap();
        for i in 0..500 {
            let off: f64 = (0..500)
                .filter(|&j| j != i)
                .map(|j| a.get(i, j).abs())
                .sum();
            assert!(a.get(i, i) > off);
        }
        assert!(a.gershgorin_lower_bound() > 0.0);
    }

    #[test]
    fn sparse_with_minimal_target_is_diagonal() {
        let a = rand_spd_sparse(300, 300, 9).unwrap();
        assert!(a.is_diagonal());
        assert!(a.diagonal().iter().all(|d| (300.25..=300.75).contains(d)));
    }

    #[test]
    fn sparse_bounds_are_checked() {
        assert!(rand_spd_sparse(10, 9, 1).is_err());
        assert!(rand_spd_sparse(10, 101, 1).is_err());
        let full = rand_spd_sparse(10, 100, 1).unwrap();
        assert_eq!(full.nnz(), 100);
    }

    #[test]
    fn sparse_pattern_is_symmetric_and_dominant() {
        let a = rand_spd_sparse(400, 4000, 21).unwrap();
        for (i, j, v) in a.lower_triangle() {
            assert_eq!(a.get(j, i), v);
            if i != j {
                assert!((0.25..0.75).contains(&v));
            }
        }
        assert!(a.gershgorin_lower_bound() > 0.0);
    }

    #[test]
    fn sparse_realized_nnz_near_target() {
        // Off-diagonal count is 2 * Binomial(n(n-1)/2, rate): for n = 1000 and
        // target 10^4 that is 9000 +- 134, so a 10% window is ~7.5 sigma.
        for seed in 0..5 {
            let nnz = rand_spd_sparse(1000, 10_000, seed).unwrap().nnz() as f64;
            assert!((nnz - 10_000.0).abs() <= 1000.0, "seed {seed}: {nnz}");
        }
    }

    #[test]
    fn sparse_nnz_matches_binomial_moments() {
        // 10^4 draws at n = 30, target 200: upper count ~ Binomial(435, 170/870).
        let (n, target) = (30usize, 200usize);
        let trials = 435.0;
        let rate = (target - n) as f64 / (n * n - n) as f64;
        let (mean, var) = (trials * rate, trials * rate * (1.0 - rate));
        let reps = 10_000;
        let counts: Vec<f64> = (0..reps)
            .map(|s| ((rand_spd_sparse(n, target, s).unwrap().nnz() - n) / 2) as f64)
            .collect();
        let m = counts.iter().sum::<f64>() / reps as f64;
        let v = counts.iter().map(|c| (c - m) * (c - m)).sum::<f64>() / (reps - 1) as f64;
        // Std error of the mean is sqrt(var / reps) ~ 0.08.
        assert!((m - mean).abs() < 0.5, "mean {m} vs {mean}");
        assert!((v / var - 1.0).abs() < 0.06, "var {v} vs {var}");
    }

    #[test]
    fn generation_is_deterministic() {
        for spec in [
            GeneratorSpec {
                family: Family::Dense,
                n: 40,
                nnz_target: None,
                seed: 2,
            },
            GeneratorSpec {
                family: Family::DenseDd,
                n: 40,
                nnz_target: None,
                seed: 2,
            },
            GeneratorSpec {
                family: Family::SparseDd,
                n: 400,
                nnz_target: Some(3000),
                seed: 2,
            },
        ] {
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
            let other = GeneratorSpec {
                seed: 3,
                ..spec.clone()
            };
            assert_ne!(spec.generate().unwrap(), other.generate().unwrap());
        }
    }

    #[test]
    fn generation_ignores_thread_count() {
        let spec = GeneratorSpec {
            family: Family::SparseDd,
            n: 2000,
            nnz_target: Some(20_000),
            seed: 8,
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| spec.generate().unwrap());
        let b = four.install(|| spec.generate().unwrap());
        assert_eq!(a, b);
        let dd = GeneratorSpec {
            family: Family::DenseDd,
            n: 300,
            nnz_target: None,
            seed: 8,
        };
        assert_eq!(
            one.install(|| dd.generate().unwrap()),
            four.install(|| dd.generate().unwrap())
        );
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::Dense, Family::DenseDd, Family::SparseDd] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("banded".parse::<Family>().is_err());
    }
}
