//! Estimator cost as the series length grows on a sparse matrix.

use logdet::{approx_logdet, generators, EstimatorConfig, LogDetError};

fn main() -> Result<(), LogDetError> {
    let a = generators::rand_spd_sparse(100_000, 1_000_000, 3)?;
    println!("n = {}, nnz = {}", a.n(), a.nnz());
    for m in [5, 10, 20, 40, 80] {
        let est = approx_logdet(&a, &EstimatorConfig::new(m, 0.5).with_probes(30))?;
        println!(
            "m = {m:3}: {:8.3}s  estimate {:.3}",
            est.wall_time, est.value
        );
    }
    Ok(())
}
