//! Cholesky factorizations used by the exact log-determinant baseline.
//!
//! Dense storage is factored in place with a row-oriented (Crout) sweep.
//! Sparse storage is reordered with reverse Cuthill-McKee and factored inside
//! its envelope: the factor of a matrix never has fill outside the profile of
//! its lower triangle, so the envelope is the whole working set.

use std::collections::VecDeque;

use super::{SpdMatrix, Storage};
use crate::error::{LogDetError, Result};

/// Lower Cholesky factor `L` of a dense `n x n` row-major matrix, returned
/// row-major with the strict upper triangle zeroed.
pub fn dense_cholesky(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut l = a.to_vec();
    factor_dense_in_place(n, &mut l)?;
    for i in 0..n {
        l[i * n + i + 1..(i + 1) * n].fill(0.0);
    }
    Ok(l)
}

/// Overwrites the lower triangle of `a` with `L`. Pivot `i` fails when
/// `a_ii - sum_k L_ik^2 <= 0` (or is NaN); no regularization is applied.
pub(crate) fn factor_dense_in_place(n: usize, a: &mut [f64]) -> Result<()> {
    for i in 0..n {
        let (done, rest) = a.split_at_mut(i * n);
        let row_i = &mut rest[..n];
        for j in 0..i {
            let row_j = &done[j * n..j * n + j + 1];
            let mut s = row_i[j];
            for k in 0..j {
                s -= row_i[k] * row_j[k];
            }
            row_i[j] = s / row_j[j];
        }
        let mut d = row_i[i];
        for v in &row_i[..i] {
            d -= v * v;
        }
        if !(d > 0.0) {
            return Err(LogDetError::NotPositiveDefinite { pivot: i, value: d });
        }
        row_i[i] = d.sqrt();
    }
    Ok(())
}

/// `log det` from the diagonal of a Cholesky factor: `2 * sum ln L_ii`.
pub fn logdet_from_factor_diagonal(diag: impl Iterator<Item = f64>) -> f64 {
    2.0 * diag.map(f64::ln).sum::<f64>()
}

/// Reverse Cuthill-McKee ordering of the sparsity graph. Returns `perm` with
/// `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SpdMatrix) -> Vec<usize> {
    let n = a.n();
    let Storage::Csr(csr) = a.storage() else {
        return (0..n).collect();
    };
    let degree = |i: usize| csr.row_ptr[i + 1] - csr.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree(i), i));
    let mut queue = VecDeque::new();
    let mut neighbours = Vec::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            neighbours.clear();
            neighbours.extend(
                csr.col_idx[csr.row_ptr[v]..csr.row_ptr[v + 1]]
                    .iter()
                    .copied()
                    .filter(|&u| !visited[u]),
            );
            neighbours.sort_by_key(|&u| (degree(u), u));
            for &u in &neighbours {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (skyline) layout of the permuted lower triangle.
struct Envelope {
    /// First stored column of each row.
    first: Vec<usize>,
    /// Offset of each row's first stored entry in `values`.
    start: Vec<usize>,
    values: Vec<f64>,
}

/// Number of `f64` slots the envelope factorization of `a` under `perm`
/// would occupy.
pub fn envelope_size(a: &SpdMatrix, perm: &[usize]) -> u64 {
    let first = envelope_first_columns(a, perm);
    first
        .iter()
        .enumerate()
        .map(|(i, &f)| (i - f + 1) as u64)
        .sum()
}

fn envelope_first_columns(a: &SpdMatrix, perm: &[usize]) -> Vec<usize> {
    let n = a.n();
    let mut inverse = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let mut first: Vec<usize> = (0..n).collect();
    for (i, j, _) in a.lower_triangle() {
        let (pi, pj) = (inverse[i], inverse[j]);
        let (r, c) = (pi.max(pj), pi.min(pj));
        first[r] = first[r].min(c);
    }
    first
}

fn build_envelope(a: &SpdMatrix, perm: &[usize]) -> Envelope {
    let n = a.n();
    let first = envelope_first_columns(a, perm);
    let mut start = Vec::with_capacity(n + 1);
    let mut total = 0usize;
    for (i, &f) in first.iter().enumerate() {
        start.push(total);
        total += i - f + 1;
    }
    start.push(total);
    let mut values = vec![0.0; total];
    let mut inverse = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    for (i, j, v) in a.lower_triangle() {
        let (pi, pj) = (inverse[i], inverse[j]);
        let (r, c) = (pi.max(pj), pi.min(pj));
        values[start[r] + c - first[r]] = v;
    }
    Envelope {
        first,
        start,
        values,
    }
}

/// Factors the envelope in place and returns the diagonal of `L`.
fn factor_envelope(env: &mut Envelope) -> Result<Vec<f64>> {
    let n = env.first.len();
    let mut diag = vec![0.0; n];
    for i in 0..n {
        let fi = env.first[i];
        let (done, rest) = env.values.split_at_mut(env.start[i]);
        let row_i = &mut rest[..i - fi + 1];
        for j in fi..i {
            let fj = env.first[j];
            let lo = fi.max(fj);
            let row_j = &done[env.start[j]..env.start[j] + (j - fj + 1)];
            let mut s = row_i[j - fi];
            for k in lo..j {
                s -= row_i[k - fi] * row_j[k - fj];
            }
            row_i[j - fi] = s / diag[j];
        }
        let mut d = row_i[i - fi];
        for v in &row_i[..i - fi] {
            d -= v * v;
        }
        if !(d > 0.0) {
            return Err(LogDetError::NotPositiveDefinite { pivot: i, value: d });
        }
        let l = d.sqrt();
        row_i[i - fi] = l;
        diag[i] = l;
    }
    Ok(diag)
}

/// Diagonal of the Cholesky factor of `a`. The failing pivot reported on
/// breakdown is an index in the factored (possibly permuted) order.
pub fn cholesky_diagonal(a: &SpdMatrix, budget_bytes: Option<u64>) -> Result<Vec<f64>> {
    let n = a.n();
    match a.storage() {
        Storage::Dense(d) => {
            check_budget((n * n) as u64 * 8, budget_bytes)?;
            let mut work = d.clone();
            factor_dense_in_place(n, &mut work)?;
            Ok((0..n).map(|i| work[i * n + i]).collect())
        }
        Storage::Csr(_) => {
            let perm = reverse_cuthill_mckee(a);
            check_budget(envelope_size(a, &perm) * 8, budget_bytes)?;
            let mut env = build_envelope(a, &perm);
            factor_envelope(&mut env)
        }
    }
}

fn check_budget(required: u64, budget: Option<u64>) -> Result<()> {
    match budget {
        Some(budget) if required > budget => Err(LogDetError::BaselineSkipped { required, budget }),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn dense_factor_reproduces_matrix() {
        let a = generators::rand_spd_dense(6, 4).unwrap();
        let d = a.to_dense();
        let l = dense_cholesky(6, &d).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let s: f64 = (0..6).map(|k| l[i * 6 + k] * l[j * 6 + k]).sum();
                assert!((s - d[i * 6 + j]).abs() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn breakdown_names_the_pivot() {
        // [[1, 2], [2, 1]] has eigenvalues 3 and -1; the second pivot is 1 - 4.
        let err = dense_cholesky(2, &[1.0, 2.0, 2.0, 1.0]).unwrap_err();
        match err {
            LogDetError::NotPositiveDefinite { pivot, value } => {
                assert_eq!(pivot, 1);
                assert_eq!(value, -3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = generators::rand_spd_sparse(200, 1200, 8).unwrap();
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..200).collect::<Vec<_>>());
    }

    #[test]
    fn rcm_narrows_a_shuffled_band() {
        // Tridiagonal matrix with scrambled labels: RCM should recover a
        // profile close to 2n.
        let n = 300;
        let label = |i: usize| (i * 7) % n; // 7 is coprime with 300
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((label(i), label(i), 4.0));
            if i + 1 < n {
                entries.push((label(i + 1), label(i), -1.0));
            }
        }
        let a = SpdMatrix::from_triangle(n, &entries).unwrap();
        let identity: Vec<usize> = (0..n).collect();
        let natural = envelope_size(&a, &identity);
        let rcm = envelope_size(&a, &reverse_cuthill_mckee(&a));
        assert!(rcm <= 2 * n as u64, "rcm envelope {rcm}");
        assert!(rcm < natural);
    }

    #[test]
    fn envelope_matches_dense_factor() {
        let a = generators::rand_spd_sparse(120, 900, 1).unwrap();
        let sparse_diag = cholesky_diagonal(&a, None).unwrap();
        let dense_diag = cholesky_diagonal(&a.to_dense_matrix(), None).unwrap();
        let ls = logdet_from_factor_diagonal(sparse_diag.into_iter());
        let ld = logdet_from_factor_diagonal(dense_diag.into_iter());
        assert!((ls - ld).abs() < 1e-9, "{ls} vs {ld}");
    }

    #[test]
    fn budget_refuses_large_factorizations() {
        let a = generators::rand_spd_dense_dd(50, 2).unwrap();
        assert!(matches!(
            cholesky_diagonal(&a, Some(1024)),
            Err(LogDetError::BaselineSkipped {
                required: 20000,
                budget: 1024
            })
        ));
        assert!(cholesky_diagonal(&a, Some(20000)).is_ok());
    }
}
