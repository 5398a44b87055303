//! Benchmark harness: load or generate a matrix, run the estimator and the
//! exact baseline, aggregate repeats into records.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::approx::{approx_logdet, EstimatorConfig};
use crate::error::{LogDetError, Result};
use crate::exact::{exact_logdet_cholesky_with_budget, exact_logdet_eig};
use crate::generators::GeneratorSpec;
use crate::matrix::market::{load_matrix_market, read_matrix_market};
use crate::matrix::SpdMatrix;
use crate::rng::derive_seed;
use crate::summation::mean_std;

/// Default cap on exact-baseline working storage: 8 GiB.
pub const DEFAULT_EXACT_BUDGET: u64 = 8 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputSource {
    MatrixMarket(PathBuf),
    Generated(GeneratorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    Cholesky,
    Eig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub estimator: EstimatorConfig,
    /// `None` skips the exact baseline.
    pub exact: Option<ExactMethod>,
    pub exact_budget_bytes: u64,
    pub repeats: usize,
    /// Values of `m` to run; `None` runs `estimator.m` only.
    pub sweep: Option<Vec<usize>>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(input: InputSource, estimator: EstimatorConfig) -> Self {
        Self {
            input,
            estimator,
            exact: Some(ExactMethod::Cholesky),
            exact_budget_bytes: DEFAULT_EXACT_BUDGET,
            repeats: 10,
            sweep: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(LogDetError::param("repeats", "must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() || sweep.contains(&0) {
                return Err(LogDetError::param(
                    "sweep",
                    "values must be at least 1 and the list nonempty",
                ));
            }
        }
        if self.threads == Some(0) {
            return Err(LogDetError::param("threads", "must be at least 1"));
        }
        if let InputSource::Generated(spec) = &self.input {
            spec.validate()?;
        }
        self.estimator.validate()
    }

    fn m_values(&self) -> Vec<usize> {
        self.sweep.clone().unwrap_or_else(|| vec![self.estimator.m])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub name: String,
    pub n: usize,
    pub nnz: usize,
    pub m: usize,
    pub p: usize,
    pub t: usize,
    pub seed: u64,
    pub estimate_mean: f64,
    pub estimate_std: f64,
    pub exact_value: Option<f64>,
    /// `100 (exact - estimate_mean) / exact`.
    pub rel_err_pct: Option<f64>,
    pub time_approx_s: f64,
    pub time_exact_s: Option<f64>,
    /// `time_exact_s / time_approx_s`.
    pub speedup: Option<f64>,
}

/// A repeat that produced no estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatFailure {
    pub m: usize,
    pub repeat: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutcome {
    pub records: Vec<BenchmarkRecord>,
    pub failures: Vec<RepeatFailure>,
    /// Why the exact baseline is missing, when it was requested.
    pub exact_error: Option<String>,
}

/// Runs the configured benchmark. Repeat `j` uses seed
/// `derive_seed(seed, j)` for every `m`, so sweep records share probes.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchmarkOutcome> {
    config.validate()?;
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| LogDetError::param("threads", e.to_string()))?
            .install(|| run_inner(config)),
        None => run_inner(config),
    }
}

fn run_inner(config: &RunConfig) -> Result<BenchmarkOutcome> {
    let (name, a) = match &config.input {
        InputSource::MatrixMarket(path) => (file_label(path), load_matrix_market(path)?),
        InputSource::Generated(spec) => (spec.name(), spec.generate()?),
    };
    let n = a.n();
    let p = config.estimator.probes()?;
    let t = config.estimator.power_iterations(n);

    let mut exact_error = None;
    let exact = match config.exact {
        None => None,
        Some(method) => {
            let started = Instant::now();
            match run_exact(&a, method, config.exact_budget_bytes) {
                Ok(v) => Some((v, started.elapsed().as_secs_f64())),
                Err(e) => {
                    exact_error = Some(e.to_string());
                    None
                }
            }
        }
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for m in config.m_values() {
        let mut values = Vec::with_capacity(config.repeats);
        let mut times = Vec::with_capacity(config.repeats);
        for repeat in 0..config.repeats {
            let estimator = EstimatorConfig {
                m,
                seed: derive_seed(config.estimator.seed, repeat as u64),
                ..config.estimator.clone()
            };
            let started = Instant::now();
            match approx_logdet(&a, &estimator) {
                Ok(est) => {
                    times.push(started.elapsed().as_secs_f64());
                    values.push(est.value);
                }
                Err(e @ (LogDetError::ShiftTooSmall { .. } | LogDetError::Numerical(_))) => {
                    failures.push(RepeatFailure {
                        m,
                        repeat,
                        message: e.to_string(),
                    });
                }
                Err(e) => return Err(e),
            }
        }
        if values.is_empty() {
            continue;
        }
        let (estimate_mean, estimate_std) = mean_std(&values);
        let time_approx_s = times.iter().sum::<f64>() / times.len() as f64;
        let exact_value = exact.map(|(v, _)| v);
        let time_exact_s = exact.map(|(_, s)| s);
        records.push(BenchmarkRecord {
            name: name.clone(),
            n,
            nnz: a.nnz(),
            m,
            p,
            t,
            seed: config.estimator.seed,
            estimate_mean,
            estimate_std,
            exact_value,
            rel_err_pct: exact_value.map(|x| 100.0 * (x - estimate_mean) / x),
            time_approx_s,
            time_exact_s,
            speedup: time_exact_s.map(|s| s / time_approx_s),
        });
    }
    if records.is_empty() {
        let detail = failures
            .first()
            .map(|f| f.message.clone())
            .unwrap_or_default();
        return Err(LogDetError::Numerical(format!(
            "every repeat failed: {detail}"
        )));
    }
    Ok(BenchmarkOutcome {
        records,
        failures,
        exact_error,
    })
}

fn run_exact(a: &SpdMatrix, method: ExactMethod, budget: u64) -> Result<f64> {
    match method {
        ExactMethod::Cholesky => exact_logdet_cholesky_with_budget(a, Some(budget)),
        ExactMethod::Eig => {
            let required = (a.n() as u64).pow(2) * 8 * 3;
            if required > budget {
                return Err(LogDetError::BaselineSkipped { required, budget });
            }
            exact_logdet_eig(a)
        }
    }
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Gershgorin sufficient condition for positive definiteness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GershgorinStatus {
    /// Every row is strictly diagonally dominant.
    Definite,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub path: PathBuf,
    pub n: usize,
    /// Stored entries in the file (one triangle).
    pub stored_entries: usize,
    /// Nonzeros of the full symmetric matrix.
    pub nnz: usize,
    pub symmetric: bool,
    pub diagonal_positive: bool,
    /// Minimum over rows of `A_ii - sum_{j != i} |A_ij|`.
    pub gershgorin_margin: f64,
    pub gershgorin: GershgorinStatus,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "file: {}", self.path.display())?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "stored entries: {}", self.stored_entries)?;
        writeln!(f, "nnz: {}", self.nnz)?;
        writeln!(
            f,
            "symmetric: {}",
            if self.symmetric { "yes" } else { "no" }
        )?;
        writeln!(
            f,
            "diagonal positive: {}",
            if self.diagonal_positive { "yes" } else { "no" }
        )?;
        writeln!(f, "gershgorin margin: {:e}", self.gershgorin_margin)?;
        write!(
            f,
            "gershgorin: {}",
            match self.gershgorin {
                GershgorinStatus::Definite => "definite",
                GershgorinStatus::Inconclusive => "inconclusive",
            }
        )
    }
}

/// Loads a Matrix Market file and checks what can be checked cheaply.
/// Files that cannot hold an SPD matrix (missing or non-positive diagonal,
/// duplicate entries, malformed lines) are rejected with an error.
pub fn cmd_validate(path: impl AsRef<Path>) -> Result<ValidationReport> {
    let path = path.as_ref();
    let data = read_matrix_market(path)?;
    let a = SpdMatrix::from_triangle(data.n, &data.entries)?;
    let margin = a.gershgorin_lower_bound();
    Ok(ValidationReport {
        path: path.to_path_buf(),
        n: a.n(),
        stored_entries: data.entries.len(),
        nnz: a.nnz(),
        symmetric: true,
        diagonal_positive: a.diagonal().iter().all(|&d| d > 0.0),
        gershgorin_margin: margin,
        gershgorin: if margin > 0.0 {
            GershgorinStatus::Definite
        } else {
            GershgorinStatus::Inconclusive
        },
    })
}
