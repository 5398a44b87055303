//! Symmetric positive definite matrices and the kernels every estimator uses.
//!
//! An [`SpdMatrix`] is immutable once built. Construction enforces structural
//! symmetry and a strictly positive diagonal; full positive definiteness is
//! only established operationally (a Cholesky factorization succeeds).

pub mod cholesky;
pub mod market;

use rayon::prelude::*;

use crate::error::{LogDetError, Result};

/// Rows per parallel task in the kernels. Each output row is computed by a
/// single task in a fixed order, so results do not depend on thread count.
const ROWS_PER_TASK: usize = 256;

/// Relative tolerance for accepting a general (two-triangle) input as
/// symmetric before it is averaged with its transpose.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// Row-major `n * n` entries.
    Dense(Vec<f64>),
    Csr(Csr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    n: usize,
    storage: Storage,
    symmetry_checked: bool,
}

/// An `n x p` block of column vectors stored row-major, so that row `i` holds
/// entry `i` of every column contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseBlock {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut block = Self::zeros(rows, cols);
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LogDetError::DimensionMismatch {
                    expected: rows,
                    actual: col.len(),
                });
            }
            block.set_column(c, col);
        }
        Ok(block)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn set_column(&mut self, col: usize, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.data[i * self.cols + col] = *v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl SpdMatrix {
    /// Builds from a row-major dense array. The input must be symmetric to
    /// within `SYMMETRY_TOLERANCE * max|A|`; it is then replaced by
    /// `(A + A^T) / 2`.
    pub fn from_dense(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(LogDetError::param("n", "matrix order must be positive"));
        }
        if data.len() != n * n {
            return Err(LogDetError::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(LogDetError::Numerical(format!(
                "non-finite entry at ({}, {})",
                i / n,
                i % n
            )));
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = SYMMETRY_TOLERANCE * scale;
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > tol {
                    return Err(LogDetError::NotSymmetric(format!(
                        "|A[{i},{j}] - A[{j},{i}]| = {:e}",
                        (a - b).abs()
                    )));
                }
                let avg = 0.5 * (a + b);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        check_diagonal((0..n).map(|i| data[i * n + i]))?;
        Ok(Self {
            n,
            storage: Storage::Dense(data),
            symmetry_checked: true,
        })
    }

    /// Builds CSR storage from one triangle of entries (either triangle, or a
    /// mix). Each off-diagonal entry is mirrored. Duplicate positions are
    /// rejected.
    pub fn from_triangle(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut lower: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for &(i, j, v) in entries {
            if i >= n || j >= n {
                return Err(LogDetError::InvalidStructure(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
            lower.push((i.max(j), i.min(j), v));
        }
        lower.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = lower
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(LogDetError::InvalidStructure(format!(
                "entry ({}, {}) given twice",
                w[0].0, w[0].1
            )));
        }
        let mut full = Vec::with_capacity(2 * lower.len());
        for &(i, j, v) in &lower {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Self::from_sorted_full(n, full)
    }

    /// Builds CSR storage from entries covering both triangles. The pattern
    /// must be structurally symmetric and the values symmetric to within
    /// `SYMMETRY_TOLERANCE * max|A|`; mirrored pairs are averaged.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted = entries.to_vec();
        for &(i, j, _) in &sorted {
            if i >= n || j >= n {
                return Err(LogDetError::InvalidStructure(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let scale = sorted.iter().fold(0.0f64, |m, e| m.max(e.2.abs()));
        let tol = SYMMETRY_TOLERANCE * scale;
        let lookup = |i: usize, j: usize| {
            sorted
                .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
                .ok()
                .map(|k| sorted[k].2)
        };
        let mut full = Vec::with_capacity(sorted.len());
        for &(i, j, v) in &sorted {
            let mirror = lookup(j, i).ok_or_else(|| {
                LogDetError::NotSymmetric(format!("({i}, {j}) present but ({j}, {i}) absent"))
            })?;
            if (v - mirror).abs() > tol {
                return Err(LogDetError::NotSymmetric(format!(
                    "|A[{i},{j}] - A[{j},{i}]| = {:e}",
                    (v - mirror).abs()
                )));
            }
            full.push((i, j, 0.5 * (v + mirror)));
        }
        Self::from_sorted_full(n, full)
    }

    fn from_sorted_full(n: usize, mut full: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(LogDetError::param("n", "matrix order must be positive"));
        }
        full.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(full.len());
        let mut values = Vec::with_capacity(full.len());
        for (k, &(i, j, v)) in full.iter().enumerate() {
            if k > 0 && full[k - 1].0 == i && full[k - 1].1 == j {
                return Err(LogDetError::InvalidStructure(format!(
                    "entry ({i}, {j}) given twice"
                )));
            }
            if !v.is_finite() {
                return Err(LogDetError::Numerical(format!(
                    "non-finite entry at ({i}, {j})"
                )));
            }
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::from_csr(
            n,
            Csr {
                row_ptr,
                col_idx,
                values,
            },
        )
    }

    /// Wraps an existing CSR structure after validating every invariant:
    /// nondecreasing row pointers, strictly increasing columns per row,
    /// structural and exact value symmetry, positive diagonal.
    pub fn from_csr(n: usize, csr: Csr) -> Result<Self> {
        if n == 0 {
            return Err(LogDetError::param("n", "matrix order must be positive"));
        }
        let Csr {
            row_ptr,
            col_idx,
            values,
        } = &csr;
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 || row_ptr[n] != col_idx.len() {
            return Err(LogDetError::InvalidStructure(
                "row pointer array has wrong length or bounds".into(),
            ));
        }
        if col_idx.len() != values.len() {
            return Err(LogDetError::InvalidStructure(
                "column and value arrays differ in length".into(),
            ));
        }
        let mut diag = vec![None; n];
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(LogDetError::InvalidStructure(format!(
                    "row pointers decrease at row {i}"
                )));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LogDetError::InvalidStructure(format!(
                    "column indices in row {i} are not strictly increasing"
                )));
            }
            if cols.last().is_some_and(|&c| c >= n) {
                return Err(LogDetError::InvalidStructure(format!(
                    "column index out of range in row {i}"
                )));
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = col_idx[k];
                if j == i {
                    diag[i] = Some(values[k]);
                }
                let mirror = col_idx[row_ptr[j]..row_ptr[j + 1]]
                    .binary_search(&i)
                    .map(|pos| values[row_ptr[j] + pos]);
                match mirror {
                    Ok(m) if m == values[k] => {}
                    Ok(_) => {
                        return Err(LogDetError::NotSymmetric(format!(
                            "A[{i},{j}] != A[{j},{i}]"
                        )))
                    }
                    Err(_) => {
                        return Err(LogDetError::NotSymmetric(format!(
                            "({i}, {j}) present but ({j}, {i}) absent"
                        )))
                    }
                }
            }
        }
        for (i, d) in diag.iter().enumerate() {
            if d.is_none() {
                return Err(LogDetError::NonPositiveDiagonal {
                    index: i,
                    value: 0.0,
                });
            }
        }
        check_diagonal(diag.into_iter().flatten())?;
        Ok(Self {
            n,
            storage: Storage::Csr(csr),
            symmetry_checked: true,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0; n])
    }

    /// Diagonal matrix in CSR storage.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_csr(
            n,
            Csr {
                row_ptr: (0..=n).collect(),
                col_idx: (0..n).collect(),
                values: diag.to_vec(),
            },
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(_) => self.n * self.n,
            Storage::Csr(csr) => csr.values.len(),
        }
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn symmetry_checked(&self) -> bool {
        self.symmetry_checked
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Csr(_))
    }

    /// True when only diagonal entries are stored.
    pub fn is_diagonal(&self) -> bool {
        match &self.storage {
            Storage::Csr(csr) => csr.values.len() == self.n,
            Storage::Dense(_) => false,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.n + j],
            Storage::Csr(csr) => {
                let (lo, hi) = (csr.row_ptr[i], csr.row_ptr[i + 1]);
                csr.col_idx[lo..hi]
                    .binary_search(&j)
                    .map_or(0.0, |pos| csr.values[lo + pos])
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Csr(csr) => {
                let n = self.n;
                let mut out = vec![0.0; n * n];
                for i in 0..n {
                    for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                        out[i * n + csr.col_idx[k]] = csr.values[k];
                    }
                }
                out
            }
        }
    }

    pub fn to_dense_matrix(&self) -> SpdMatrix {
        match &self.storage {
            Storage::Dense(_) => self.clone(),
            Storage::Csr(_) => SpdMatrix {
                n: self.n,
                storage: Storage::Dense(self.to_dense()),
                symmetry_checked: self.symmetry_checked,
            },
        }
    }

    /// Sparse copy holding the nonzero entries.
    pub fn to_csr_matrix(&self) -> SpdMatrix {
        match &self.storage {
            Storage::Csr(_) => self.clone(),
            Storage::Dense(d) => {
                let n = self.n;
                let mut row_ptr = Vec::with_capacity(n + 1);
                let mut col_idx = Vec::new();
                let mut values = Vec::new();
                row_ptr.push(0);
                for i in 0..n {
                    for j in 0..n {
                        let v = d[i * n + j];
                        if v != 0.0 {
                            col_idx.push(j);
                            values.push(v);
                        }
                    }
                    row_ptr.push(col_idx.len());
                }
                SpdMatrix {
                    n,
                    storage: Storage::Csr(Csr {
                        row_ptr,
                        col_idx,
                        values,
                    }),
                    symmetry_checked: self.symmetry_checked,
                }
            }
        }
    }

    /// Lower-triangle entries `(i, j, value)` with `i >= j`, in row order.
    pub fn lower_triangle(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n;
        match &self.storage {
            Storage::Dense(d) => (0..n)
                .flat_map(|i| (0..=i).map(move |j| (i, j)))
                .filter_map(|(i, j)| {
                    let v = d[i * n + j];
                    (v != 0.0 || i == j).then_some((i, j, v))
                })
                .collect(),
            Storage::Csr(csr) => (0..n)
                .flat_map(|i| {
                    (csr.row_ptr[i]..csr.row_ptr[i + 1])
                        .filter(move |&k| csr.col_idx[k] <= i)
                        .map(move |k| (i, csr.col_idx[k], csr.values[k]))
                })
                .collect(),
        }
    }

    /// Returns `c * A`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(LogDetError::param("c", "scale must be positive and finite"));
        }
        let mut out = self.clone();
        match &mut out.storage {
            Storage::Dense(d) => d.iter_mut().for_each(|v| *v *= c),
            Storage::Csr(csr) => csr.values.iter_mut().for_each(|v| *v *= c),
        }
        Ok(out)
    }

    /// Largest Gershgorin radius deficit: returns the minimum over rows of
    /// `A_ii - sum_{j != i} |A_ij|`. Positive means the matrix is provably
    /// positive definite.
    pub fn gershgorin_lower_bound(&self) -> f64 {
        let n = self.n;
        let row_bound = |i: usize| -> f64 {
            let mut off = 0.0;
            let mut diag = 0.0;
            match &self.storage {
                Storage::Dense(d) => {
                    for j in 0..n {
                        if i == j {
                            diag = d[i * n + j];
                        } else {
                            off += d[i * n + j].abs();
                        }
                    }
                }
                Storage::Csr(csr) => {
                    for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                        if csr.col_idx[k] == i {
                            diag = csr.values[k];
                        } else {
                            off += csr.values[k].abs();
                        }
                    }
                }
            }
            diag - off
        };
        (0..n).map(row_bound).fold(f64::INFINITY, f64::min)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let n = self.n;
        match &self.storage {
            Storage::Dense(d) => {
                y.par_chunks_mut(ROWS_PER_TASK)
                    .enumerate()
                    .for_each(|(chunk, ys)| {
                        let first = chunk * ROWS_PER_TASK;
                        for (r, yi) in ys.iter_mut().enumerate() {
                            let row = &d[(first + r) * n..(first + r + 1) * n];
                            let mut acc = 0.0;
                            for (a, xj) in row.iter().zip(x) {
                                acc += a * xj;
                            }
                            *yi = acc;
                        }
                    });
            }
            Storage::Csr(csr) => {
                y.par_chunks_mut(ROWS_PER_TASK)
                    .enumerate()
                    .for_each(|(chunk, ys)| {
                        let first = chunk * ROWS_PER_TASK;
                        for (r, yi) in ys.iter_mut().enumerate() {
                            let i = first + r;
                            let mut acc = 0.0;
                            for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                                acc += csr.values[k] * x[csr.col_idx[k]];
                            }
                            *yi = acc;
                        }
                    });
            }
        }
        Ok(())
    }

    /// `Y = A X` for an `n x p` block, one pass over `A`. Column `j` of the
    /// result is bitwise equal to `matvec` applied to column `j` of `X`.
    pub fn mat_multivec(&self, x: &DenseBlock) -> Result<DenseBlock> {
        let mut y = DenseBlock::zeros(self.n, x.cols());
        self.mat_multivec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn mat_multivec_into(&self, x: &DenseBlock, y: &mut DenseBlock) -> Result<()> {
        self.check_len(x.rows())?;
        self.check_len(y.rows())?;
        if x.cols() != y.cols() {
            return Err(LogDetError::DimensionMismatch {
                expected: x.cols(),
                actual: y.cols(),
            });
        }
        let n = self.n;
        let p = x.cols();
        if p == 0 {
            return Ok(());
        }
        let xs = x.as_slice();
        match &self.storage {
            Storage::Dense(d) => {
                y.as_mut_slice()
                    .par_chunks_mut(ROWS_PER_TASK * p)
                    .enumerate()
                    .for_each(|(chunk, ys)| {
                        let first = chunk * ROWS_PER_TASK;
                        for (r, yrow) in ys.chunks_exact_mut(p).enumerate() {
                            let row = &d[(first + r) * n..(first + r + 1) * n];
                            yrow.fill(0.0);
                            for (j, a) in row.iter().enumerate() {
                                let xrow = &xs[j * p..(j + 1) * p];
                                for (acc, xv) in yrow.iter_mut().zip(xrow) {
                                    *acc += a * xv;
                                }
                            }
                        }
                    });
            }
            Storage::Csr(csr) => {
                y.as_mut_slice()
                    .par_chunks_mut(ROWS_PER_TASK * p)
                    .enumerate()
                    .for_each(|(chunk, ys)| {
                        let first = chunk * ROWS_PER_TASK;
                        for (r, yrow) in ys.chunks_exact_mut(p).enumerate() {
                            let i = first + r;
                            yrow.fill(0.0);
                            for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                                let a = csr.values[k];
                                let j = csr.col_idx[k];
                                let xrow = &xs[j * p..(j + 1) * p];
                                for (acc, xv) in yrow.iter_mut().zip(xrow) {
                                    *acc += a * xv;
                                }
                            }
                        }
                    });
            }
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(LogDetError::DimensionMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }
}

fn check_diagonal(diag: impl Iterator<Item = f64>) -> Result<()> {
    for (index, value) in diag.enumerate() {
        if !(value > 0.0) {
            return Err(LogDetError::NonPositiveDiagonal { index, value });
        }
    }
    Ok(())
}
