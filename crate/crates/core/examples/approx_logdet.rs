//! Randomized log-determinant of a sparse matrix against Cholesky.

use std::time::Instant;

use logdet::{approx_logdet, exact_logdet_cholesky, generators, EstimatorConfig, LogDetError};

fn main() -> Result<(), LogDetError> {
    let a = generators::rand_spd_sparse(4000, 40_000, 5)?;
    let cfg = EstimatorConfig::new(20, 0.5).with_probes(30).with_seed(1);

    let est = approx_logdet(&a, &cfg)?;
    println!(
        "estimate {:.3} (lambda_hat {:.3}, alpha {:.3}, p {}) in {:.2}s",
        est.value, est.lambda_hat, est.alpha, est.probes, est.wall_time
    );

    let t = Instant::now();
    let exact = exact_logdet_cholesky(&a)?;
    println!("exact    {exact:.3} in {:.2?}", t.elapsed());
    println!(
        "relative error {:.3e}",
        (est.value - exact).abs() / exact.abs()
    );
    Ok(())
}
