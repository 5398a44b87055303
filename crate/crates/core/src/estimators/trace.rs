use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LogDetError, Result};
use crate::rng::{gaussian_vector, RngStream};
use crate::summation::{dot, pairwise_mean};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub value: f64,
    pub probes_used: usize,
    /// `g_i^T M g_i` for each probe, in probe order.
    pub per_probe_values: Vec<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

/// Probe count for a relative-error `epsilon` guarantee holding with
/// probability `1 - delta`: `ceil(20 ln(2/delta) / epsilon^2)`.
pub fn probes_needed(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(LogDetError::param(
            "epsilon",
            format!("must lie in (0, 1], got {epsilon}"),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LogDetError::param(
            "delta",
            format!("must lie in (0, 1), got {delta}"),
        ));
    }
    let raw = 20.0 * (2.0 / delta).ln() / (epsilon * epsilon);
    // Strip the last few ulps so that exact integers survive rounding noise
    // in the logarithm.
    let p = (raw * (1.0 - 4.0 * f64::EPSILON)).ceil();
    Ok((p as usize).max(1))
}

/// Estimates `trace(M)` as the mean of `g_i^T M g_i` over `p` standard
/// Gaussian probes, where `apply(x, y)` writes `M x` into `y`. Probe `i` draws
/// from `master.offset(i)`; probes run in parallel and are averaged in a fixed
/// order, so the result does not depend on the thread count.
pub fn gaussian_trace<F>(apply: F, n: usize, p: usize, master: RngStream) -> Result<TraceEstimate>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if p == 0 {
        return Err(LogDetError::param("p", "at least one probe is required"));
    }
    let values: Vec<f64> = (0..p)
        .into_par_iter()
        .map(|i| {
            let g = gaussian_vector(n, master.offset(i as u64));
            let mut mg = vec![0.0; n];
            apply(&g, &mut mg);
            dot(&g, &mg)
        })
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(LogDetError::Numerical(format!(
            "operator produced a non-finite quadratic form on probe {i}"
        )));
    }
    Ok(TraceEstimate {
        value: pairwise_mean(&values),
        probes_used: p,
        per_probe_values: values,
        epsilon: None,
        delta: None,
    })
}

/// [`gaussian_trace`] with `p = probes_needed(epsilon, delta)`.
pub fn gaussian_trace_with_accuracy<F>(
    apply: F,
    n: usize,
    epsilon: f64,
    delta: f64,
    master: RngStream,
) -> Result<TraceEstimate>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let p = probes_needed(epsilon, delta)?;
    let mut est = gaussian_trace(apply, n, p, master)?;
    est.epsilon = Some(epsilon);
    est.delta = Some(delta);
    Ok(est)
}
