//! Randomized log-determinant estimation.
//!
//! With `alpha > lambda_1(A)` and `C = I - A / alpha`,
//!
//! ```text
//! log det A = n ln(alpha) - sum_{k >= 1} trace(C^k) / k
//! ```
//!
//! The estimator takes `alpha` from a power-method estimate of the top
//! eigenvalue, keeps the first `m` terms, and replaces each trace with the
//! mean of `g_i^T C^k g_i` over Gaussian probes. `C` is never formed: each
//! step costs one product with `A` and one scaled subtraction, and
//! `C^k g_i` is carried forward from `C^(k-1) g_i`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LogDetError, Result};
use crate::estimators::{
    boosted_power_method, default_power_iterations, probes_needed, PowerMethodResult, ALPHA_FACTOR,
};
use crate::matrix::{DenseBlock, SpdMatrix};
use crate::rng::{fill_gaussian, RngStream, POWER_STREAM_BASE};
use crate::summation::{dot, pairwise_mean, pairwise_sum};

/// Probes per block when probes are batched through `mat_multivec`.
pub const PROBE_BLOCK: usize = 8;

/// Batching kicks in at this many probes.
const MIN_BATCHED_PROBES: usize = 4;

/// Probes per accumulation chunk on the diagonal fast path.
const DIAGONAL_CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Number of series terms kept.
    pub m: usize,
    /// Relative accuracy of the trace estimates.
    pub epsilon: f64,
    /// Failure probability of the trace estimates.
    pub delta: f64,
    /// Power iterations; `None` means `ceil(log2(4n))`.
    pub t: Option<usize>,
    pub power_repetitions: usize,
    /// Probe count; `None` derives it from `epsilon` and `delta`.
    pub p_override: Option<usize>,
    pub seed: u64,
    /// Push probes through the blocked kernel when there are at least four.
    pub batch_probes: bool,
    /// Retain every `g_i^T C^k g_i`.
    pub keep_diagnostics: bool,
    /// `alpha = alpha_factor * lambda_hat`.
    pub alpha_factor: f64,
}

impl EstimatorConfig {
    pub fn new(m: usize, epsilon: f64) -> Self {
        Self {
            m,
            epsilon,
            delta: 0.01,
            t: None,
            power_repetitions: 3,
            p_override: None,
            seed: 0,
            batch_probes: true,
            keep_diagnostics: false,
            alpha_factor: ALPHA_FACTOR,
        }
    }

    /// Single power-method run, `delta = 0.01`, `alpha = 5 lambda_hat`.
    pub fn single_restart(m: usize, epsilon: f64) -> Self {
        Self {
            power_repetitions: 1,
            ..Self::new(m, epsilon)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_probes(mut self, p: usize) -> Self {
        self.p_override = Some(p);
        self
    }

    pub fn with_power_iterations(mut self, t: usize) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_diagnostics(mut self) -> Self {
        self.keep_diagnostics = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(LogDetError::param(
                "m",
                "at least one series term is required",
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LogDetError::param(
                "epsilon",
                format!("must lie in (0, 1), got {}", self.epsilon),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(LogDetError::param(
                "delta",
                format!("must lie in (0, 1), got {}", self.delta),
            ));
        }
        if self.t == Some(0) {
            return Err(LogDetError::param(
                "t",
                "at least one power iteration is required",
            ));
        }
        if self.power_repetitions == 0 {
            return Err(LogDetError::param(
                "power_repetitions",
                "must be at least 1",
            ));
        }
        if self.p_override == Some(0) {
            return Err(LogDetError::param("p", "at least one probe is required"));
        }
        if !(self.alpha_factor > 0.0 && self.alpha_factor.is_finite()) {
            return Err(LogDetError::param(
                "alpha_factor",
                "must be positive and finite",
            ));
        }
        Ok(())
    }

    pub fn probes(&self) -> Result<usize> {
        match self.p_override {
            Some(p) => Ok(p),
            None => probes_needed(self.epsilon, self.delta),
        }
    }

    pub fn power_iterations(&self, n: usize) -> usize {
        self.t.unwrap_or_else(|| default_power_iterations(n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogDetEstimate {
    /// Estimated natural-log determinant.
    pub value: f64,
    pub alpha: f64,
    pub lambda_hat: f64,
    pub n: usize,
    pub probes: usize,
    /// `partial_by_m[k - 1]` is the estimate truncated after `k` terms.
    pub partial_by_m: Vec<f64>,
    /// Probe means of `g_i^T C^k g_i`, `k = 1..=m`.
    pub term_means: Vec<f64>,
    /// `per_probe_series[i][k - 1] = g_i^T C^k g_i`, when retained.
    pub per_probe_series: Option<Vec<Vec<f64>>>,
    pub power: PowerMethodResult,
    /// Seconds, power method included.
    pub wall_time: f64,
    pub config: EstimatorConfig,
}

impl LogDetEstimate {
    /// Recomputes the estimate from the retained per-probe series using the
    /// same reduction order as the estimator.
    pub fn recompute_from_series(&self) -> Option<f64> {
        let series = self.per_probe_series.as_ref()?;
        let means = column_means(series, self.partial_by_m.len());
        Some(*assemble_partials(self.n, self.alpha, &means).last()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub k: usize,
    pub partial_value: f64,
    /// `|partial_k - partial_m| / |partial_m|`.
    pub relative_change: f64,
}

/// Estimates `ln det A`.
///
/// `A` is assumed SPD and is not checked. Non-finite quadratic forms are
/// reported as [`LogDetError::Numerical`], and forms growing past `n * 10^k`
/// (the signature of a badly underestimated top eigenvalue) as
/// [`LogDetError::ShiftTooSmall`]. Milder violations, such as a slightly
/// indefinite `A`, pass both checks and give a meaningless estimate.
pub fn approx_logdet(a: &SpdMatrix, config: &EstimatorConfig) -> Result<LogDetEstimate> {
    config.validate()?;
    let started = Instant::now();
    let n = a.n();
    let t = config.power_iterations(n);
    let power = boosted_power_method(
        a,
        t,
        config.power_repetitions,
        RngStream::new(config.seed, POWER_STREAM_BASE),
    )?;
    let alpha = config.alpha_factor * power.lambda_hat;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(LogDetError::Numerical(format!(
            "power method returned eigenvalue estimate {}; the matrix is not positive definite",
            power.lambda_hat
        )));
    }
    let p = config.probes()?;
    let probe_stream = RngStream::new(config.seed, 0);

    let (term_means, per_probe_series) = if a.is_diagonal() && !config.keep_diagnostics {
        (
            diagonal_term_means(a, alpha, config.m, p, probe_stream)?,
            None,
        )
    } else {
        let series = if config.batch_probes && p >= MIN_BATCHED_PROBES {
            batched_series(a, alpha, config.m, p, probe_stream)?
        } else {
            (0..p)
                .into_par_iter()
                .map(|i| probe_series(a, alpha, config.m, probe_stream.offset(i as u64)))
                .collect::<Result<Vec<_>>>()?
        };
        check_series(&series, n)?;
        let means = column_means(&series, config.m);
        (means, config.keep_diagnostics.then_some(series))
    };

    let partial_by_m = assemble_partials(n, alpha, &term_means);
    let value = *partial_by_m.last().expect("m >= 1");
    Ok(LogDetEstimate {
        value,
        alpha,
        lambda_hat: power.lambda_hat,
        n,
        probes: p,
        partial_by_m,
        term_means,
        per_probe_series,
        power,
        wall_time: started.elapsed().as_secs_f64(),
        config: config.clone(),
    })
}

/// Per-term running estimates with the relative change to the final one.
pub fn convergence_trace(estimate: &LogDetEstimate) -> Result<Vec<ConvergencePoint>> {
    if !estimate.config.keep_diagnostics {
        return Err(LogDetError::DiagnosticsMissing);
    }
    let last = *estimate
        .partial_by_m
        .last()
        .ok_or(LogDetError::DiagnosticsMissing)?;
    Ok(estimate
        .partial_by_m
        .iter()
        .enumerate()
        .map(|(i, &partial_value)| ConvergencePoint {
            k: i + 1,
            partial_value,
            relative_change: (partial_value - last).abs() / last.abs(),
        })
        .collect())
}

/// `v <- C v = v - A v / alpha`, using `scratch` for `A v`.
#[inline]
pub(crate) fn shifted_step(
    a: &SpdMatrix,
    alpha: f64,
    v: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    a.matvec_into(v, scratch)?;
    for (vi, wi) in v.iter_mut().zip(scratch.iter()) {
        *vi -= wi / alpha;
    }
    Ok(())
}

/// `g^T C^k g` for `k = 1..=m` with `g` drawn from `stream`.
fn probe_series(a: &SpdMatrix, alpha: f64, m: usize, stream: RngStream) -> Result<Vec<f64>> {
    let n = a.n();
    let mut g = vec![0.0; n];
    fill_gaussian(&mut g, stream);
    let mut v = g.clone();
    let mut w = vec![0.0; n];
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        shifted_step(a, alpha, &mut v, &mut w)?;
        out.push(dot(&g, &v));
    }
    Ok(out)
}

/// Same values as [`probe_series`] for every probe, computed a block of
/// probes at a time. Per-entry arithmetic and accumulation order match the
/// single-probe path, so the results are bitwise identical.
fn batched_series(
    a: &SpdMatrix,
    alpha: f64,
    m: usize,
    p: usize,
    stream: RngStream,
) -> Result<Vec<Vec<f64>>> {
    let n = a.n();
    let blocks: Vec<Vec<Vec<f64>>> = (0..p.div_ceil(PROBE_BLOCK))
        .into_par_iter()
        .map(|b| {
            let first = b * PROBE_BLOCK;
            let width = PROBE_BLOCK.min(p - first);
            let mut g = DenseBlock::zeros(n, width);
            let mut col = vec![0.0; n];
            for c in 0..width {
                fill_gaussian(&mut col, stream.offset((first + c) as u64));
                g.set_column(c, &col);
            }
            let mut v = g.clone();
            let mut w = DenseBlock::zeros(n, width);
            let mut series = vec![Vec::with_capacity(m); width];
            let mut acc = vec![0.0; width];
            for _ in 0..m {
                a.mat_multivec_into(&v, &mut w)?;
                for (vi, wi) in v.as_mut_slice().iter_mut().zip(w.as_slice()) {
                    *vi -= wi / alpha;
                }
                acc.fill(0.0);
                for (grow, vrow) in g
                    .as_slice()
                    .chunks_exact(width)
                    .zip(v.as_slice().chunks_exact(width))
                {
                    for ((s, gi), vi) in acc.iter_mut().zip(grow).zip(vrow) {
                        *s += gi * vi;
                    }
                }
                for (s, out) in acc.iter().zip(series.iter_mut()) {
                    out.push(*s);
                }
            }
            Ok(series)
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Probe means of `g_i^T C^k g_i` for a diagonal `A`.
///
/// For diagonal `C`, `g^T C^k g = sum_j g_j^2 c_j^k`, so the probe mean only
/// needs the per-coordinate mean of `g_j^2`. The probes are the same ones the
/// general path draws; only the order of the sums changes.
fn diagonal_term_means(
    a: &SpdMatrix,
    alpha: f64,
    m: usize,
    p: usize,
    stream: RngStream,
) -> Result<Vec<f64>> {
    let n = a.n();
    let d = a.diagonal();
    let chunks: Vec<Vec<f64>> = (0..p.div_ceil(DIAGONAL_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; n];
            let mut g = vec![0.0; n];
            for i in c * DIAGONAL_CHUNK..p.min((c + 1) * DIAGONAL_CHUNK) {
                fill_gaussian(&mut g, stream.offset(i as u64));
                for (s, gi) in acc.iter_mut().zip(&g) {
                    *s += gi * gi;
                }
            }
            acc
        })
        .collect();
    let mut weights = vec![0.0; n];
    for chunk in &chunks {
        for (w, c) in weights.iter_mut().zip(chunk) {
            *w += c;
        }
    }
    weights.iter_mut().for_each(|w| *w /= p as f64);

    let mut means = Vec::with_capacity(m);
    for k in 1..=m {
        for (w, dj) in weights.iter_mut().zip(&d) {
            *w -= dj * *w / alpha;
        }
        let mean = pairwise_sum(&weights);
        check_term(mean, k, n)?;
        means.push(mean);
    }
    Ok(means)
}

fn check_series(series: &[Vec<f64>], n: usize) -> Result<()> {
    for (i, row) in series.iter().enumerate() {
        for (k, &gamma) in row.iter().enumerate() {
            check_term(gamma, k + 1, n).map_err(|e| match e {
                LogDetError::Numerical(msg) => LogDetError::Numerical(format!("{msg} (probe {i})")),
                other => other,
            })?;
        }
    }
    Ok(())
}

fn check_term(gamma: f64, k: usize, n: usize) -> Result<()> {
    if !gamma.is_finite() {
        return Err(LogDetError::Numerical(format!(
            "non-finite quadratic form at term {k}"
        )));
    }
    let limit = n as f64 * 10f64.powi(k.min(400) as i32);
    if gamma.abs() > limit {
        return Err(LogDetError::ShiftTooSmall {
            k,
            magnitude: gamma.abs(),
        });
    }
    Ok(())
}

fn column_means(series: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut column = vec![0.0; series.len()];
    (0..m)
        .map(|k| {
            for (c, row) in column.iter_mut().zip(series) {
                *c = row[k];
            }
            pairwise_mean(&column)
        })
        .collect()
}

fn assemble_partials(n: usize, alpha: f64, term_means: &[f64]) -> Vec<f64> {
    let base = n as f64 * alpha.ln();
    let mut acc = 0.0;
    term_means
        .iter()
        .enumerate()
        .map(|(i, mean)| {
            acc += mean / (i + 1) as f64;
            base - acc
        })
        .collect()
}
