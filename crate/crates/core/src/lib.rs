//! Randomized log-determinant estimation for symmetric positive definite
//! matrices.
//!
//! The estimator ([`approx_logdet`]) normalizes `A` by a power-method
//! estimate of its top eigenvalue, truncates the series
//! `log det A = n ln(alpha) - sum_k trace(C^k) / k` after `m` terms, and
//! estimates each trace with Gaussian probes. It only touches `A` through
//! matrix-vector products. Exact Cholesky and eigenvalue baselines, seeded
//! matrix generators, error bounds and a benchmark harness live alongside.
//!
//! ```
//! use logdet::{approx_logdet, exact_logdet_cholesky, generators, EstimatorConfig};
//!
//! let a = generators::rand_spd_sparse(2000, 20_000, 7)?;
//! let est = approx_logdet(&a, &EstimatorConfig::new(20, 0.5).with_probes(30))?;
//! let exact = exact_logdet_cholesky(&a)?;
//! assert!((est.value - exact).abs() / exact.abs() < 0.01);
//! # Ok::<(), logdet::LogDetError>(())
//! ```
//!
//! All logarithms are natural.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bench;
pub mod bounds;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod generators;
pub mod matrix;
pub mod report;
pub mod rng;
pub mod summation;

pub use approx::{
    approx_logdet, convergence_trace, ConvergencePoint, EstimatorConfig, LogDetEstimate,
};
pub use bench::{
    cmd_validate, run_benchmark, BenchmarkOutcome, BenchmarkRecord, ExactMethod, InputSource,
    OutputFormat, RunConfig, ValidationReport,
};
pub use bounds::{
    error_bound, select_parameters, truncated_series_exact_trace, ErrorBoundReport,
    SeriesParameters,
};
pub use error::{LogDetError, Result};
pub use estimators::{
    boosted_power_method, gaussian_trace, power_method, probes_needed, PowerMethodResult,
    TraceEstimate,
};
pub use exact::{eigenvalues, exact_logdet_cholesky, exact_logdet_eig};
pub use generators::{Family, GeneratorSpec};
pub use matrix::market::{load_matrix_market, save_matrix_market};
pub use matrix::{DenseBlock, SpdMatrix};
pub use report::{emit_report, read_report};
pub use rng::RngStream;
