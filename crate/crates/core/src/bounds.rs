//! Deterministic series truncation, the error bound, and parameter selection.

use serde::{Deserialize, Serialize};

use crate::approx::shifted_step;
use crate::error::{LogDetError, Result};
use crate::matrix::cholesky::factor_dense_in_place;
use crate::matrix::SpdMatrix;

/// `n ln(alpha) - sum_{k=1..m} trace(C^k) / k` with exact traces.
///
/// Traces come from `n` basis-vector recursions, so this costs `n * m`
/// matrix-vector products and is meant for small matrices.
pub fn truncated_series_exact_trace(a: &SpdMatrix, alpha: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(LogDetError::param(
            "m",
            "at least one series term is required",
        ));
    }
    Ok(*truncated_series_partials(a, alpha, m)?
        .last()
        .expect("m >= 1"))
}

/// All truncations `k = 1..=m` of [`truncated_series_exact_trace`].
pub fn truncated_series_partials(a: &SpdMatrix, alpha: f64, m: usize) -> Result<Vec<f64>> {
    let n = a.n();
    check_shift(a, alpha)?;
    let mut traces = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for j in 0..n {
        v.fill(0.0);
        v[j] = 1.0;
        for t in traces.iter_mut() {
            shifted_step(a, alpha, &mut v, &mut w)?;
            *t += v[j];
        }
    }
    let base = n as f64 * alpha.ln();
    let mut acc = 0.0;
    Ok(traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            acc += t / (i + 1) as f64;
            base - acc
        })
        .collect())
}

/// Fails unless `alpha I - A` is positive definite.
fn check_shift(a: &SpdMatrix, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(LogDetError::param("alpha", "must be positive and finite"));
    }
    let n = a.n();
    let mut shifted = a.to_dense();
    for x in shifted.iter_mut() {
        *x = -*x;
    }
    for i in 0..n {
        shifted[i * n + i] += alpha;
    }
    factor_dense_in_place(n, &mut shifted).map_err(|_| {
        LogDetError::param(
            "alpha",
            format!("{alpha} does not exceed the largest eigenvalue"),
        )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundReport {
    /// `lambda_n / alpha`.
    pub gamma_eff: f64,
    /// `lambda_n / lambda_1`.
    pub gamma_paper: f64,
    /// `sum_i ln(5 lambda_1 / lambda_i)`, or `n ln(5 kappa)` without a spectrum.
    pub gamma_sum: f64,
    pub from_spectrum: bool,
    pub kappa: f64,
    /// `(epsilon + (1 - gamma_eff)^m) * gamma_sum`.
    pub bound: f64,
    /// Same with `gamma_paper`; smaller, and not implied when `alpha > lambda_1`.
    pub bound_paper: f64,
}

/// Error bound for [`crate::approx_logdet`] with shift `alpha`.
pub fn error_bound(
    lambda_1: f64,
    lambda_n: f64,
    n: usize,
    alpha: f64,
    m: usize,
    epsilon: f64,
    spectrum: Option<&[f64]>,
) -> Result<ErrorBoundReport> {
    if !(lambda_n > 0.0 && lambda_n <= lambda_1 && lambda_1 < alpha && alpha.is_finite()) {
        return Err(LogDetError::param(
            "spectrum",
            format!("need 0 < lambda_n <= lambda_1 < alpha, got {lambda_n}, {lambda_1}, {alpha}"),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LogDetError::param(
            "epsilon",
            format!("must lie in (0, 1), got {epsilon}"),
        ));
    }
    if n == 0 {
        return Err(LogDetError::param("n", "must be positive"));
    }
    let kappa = lambda_1 / lambda_n;
    let gamma_sum = match spectrum {
        Some(values) => {
            if values.len() != n {
                return Err(LogDetError::DimensionMismatch {
                    expected: n,
                    actual: values.len(),
                });
            }
            if let Some(bad) = values
                .iter()
                .find(|&&l| !(l > 0.0 && l <= lambda_1 * (1.0 + 1e-12)))
            {
                return Err(LogDetError::param(
                    "spectrum",
                    format!("eigenvalue {bad} outside (0, lambda_1]"),
                ));
            }
            values.iter().map(|l| (5.0 * lambda_1 / l).ln()).sum()
        }
        None => n as f64 * (5.0 * kappa).ln(),
    };
    let gamma_eff = lambda_n / alpha;
    let gamma_paper = lambda_n / lambda_1;
    let tail = |g: f64| (1.0 - g).powi(m.min(i32::MAX as usize) as i32);
    Ok(ErrorBoundReport {
        gamma_eff,
        gamma_paper,
        gamma_sum,
        from_spectrum: spectrum.is_some(),
        kappa,
        bound: (epsilon + tail(gamma_eff)) * gamma_sum,
        bound_paper: (epsilon + tail(gamma_paper)) * gamma_sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesParameters {
    pub m: usize,
    pub epsilon: f64,
}

/// Series length and trace accuracy giving `|estimate - log det A| <= target_eps * n`
/// for condition number `kappa`.
pub fn select_parameters(kappa: f64, target_eps: f64) -> Result<SeriesParameters> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(LogDetError::param(
            "kappa",
            format!("must be at least 1, got {kappa}"),
        ));
    }
    if !(target_eps > 0.0 && target_eps < 1.0) {
        return Err(LogDetError::param(
            "target_eps",
            format!("must lie in (0, 1), got {target_eps}"),
        ));
    }
    let log_term = (5.0 * kappa).ln();
    let epsilon = target_eps / (2.0 * log_term);
    let decay = -(-1.0 / (5.0 * kappa)).ln_1p();
    let m = ((2.0 * log_term / target_eps).ln() / decay).ceil().max(1.0) as usize;
    Ok(SeriesParameters { m, epsilon })
}
