//! Exact log-determinant baselines.
//!
//! Cholesky is the baseline every estimate is compared against; the symmetric
//! eigendecomposition is an independent route used to check it.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{LogDetError, Result};
use crate::matrix::cholesky::{cholesky_diagonal, logdet_from_factor_diagonal};
use crate::matrix::SpdMatrix;

/// `2 * sum ln L_ii` where `A = L L^T` (natural log).
pub fn exact_logdet_cholesky(a: &SpdMatrix) -> Result<f64> {
    exact_logdet_cholesky_with_budget(a, None)
}

/// As [`exact_logdet_cholesky`] but refuses factorizations whose working
/// storage would exceed `budget_bytes`.
pub fn exact_logdet_cholesky_with_budget(a: &SpdMatrix, budget_bytes: Option<u64>) -> Result<f64> {
    let diag = cholesky_diagonal(a, budget_bytes)?;
    Ok(logdet_from_factor_diagonal(diag.into_iter()))
}

/// Eigenvalues of `A` in ascending order.
pub fn eigenvalues(a: &SpdMatrix) -> Vec<f64> {
    let n = a.n();
    let m = DMatrix::from_row_slice(n, n, &a.to_dense());
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `sum ln lambda_i(A)`.
pub fn exact_logdet_eig(a: &SpdMatrix) -> Result<f64> {
    logdet_from_spectrum(&eigenvalues(a))
}

pub fn logdet_from_spectrum(spectrum: &[f64]) -> Result<f64> {
    for (i, &l) in spectrum.iter().enumerate() {
        if !(l > 0.0) {
            return Err(LogDetError::NotPositiveDefinite { pivot: i, value: l });
        }
    }
    Ok(spectrum.iter().map(|l| l.ln()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn identity_is_zero() {
        assert_eq!(
            exact_logdet_cholesky(&SpdMatrix::identity(10).unwrap()).unwrap(),
            0.0
        );
        assert_eq!(
            exact_logdet_eig(&SpdMatrix::identity(3).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn diagonal_is_product_of_entries() {
        let a = SpdMatrix::from_diagonal(&[2.0, 8.0]).unwrap();
        let v = exact_logdet_cholesky(&a).unwrap();
        assert!((v - 16f64.ln()).abs() < 1e-15);
        assert!((v - 2.772_588_7).abs() < 1e-7);
        let dense = a.to_dense_matrix();
        assert!((exact_logdet_cholesky(&dense).unwrap() - 16f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_eigen() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let a = SpdMatrix::from_dense(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let v = exact_logdet_eig(&a).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-14);
        assert!((v - 1.098_612_3).abs() < 1e-7);
        assert!((exact_logdet_cholesky(&a).unwrap() - v).abs() < 1e-14);
    }

    #[test]
    fn indefinite_input_fails_both_routes() {
        let a = SpdMatrix::from_dense(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            exact_logdet_cholesky(&a),
            Err(LogDetError::NotPositiveDefinite { pivot: 1, .. })
        ));
        assert!(matches!(
            exact_logdet_eig(&a),
            Err(LogDetError::NotPositiveDefinite { pivot: 0, .. })
        ));
    }

    #[test]
    fn cholesky_agrees_with_eig_on_random_matrices() {
        for seed in 0..50 {
            let a = generators::rand_spd_dense(20, seed).unwrap();
            let c = exact_logdet_cholesky(&a).unwrap();
            let e = exact_logdet_eig(&a).unwrap();
            assert!((c - e).abs() < 1e-9, "seed {seed}: {c} vs {e}");
        }
    }

    #[test]
    fn scaling_shifts_by_n_ln_c() {
        let a = generators::rand_spd_sparse(60, 500, 3).unwrap();
        let base = exact_logdet_cholesky(&a).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let scaled = exact_logdet_cholesky(&a.scaled(c).unwrap()).unwrap();
            assert!((scaled - base - 60.0 * f64::ln(c)).abs() < 1e-9);
        }
    }
}
