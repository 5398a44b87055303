//! Exact log-determinants by Cholesky (dense and envelope-sparse) and by
//! eigenvalues.
//!
//! ```bash
//! cargo run --release --example exact_baselines
//! ```

use std::time::Instant;

use logdet::exact::exact_logdet_cholesky_with_budget;
use logdet::generators::{rand_spd_dense, rand_spd_sparse};
use logdet::{exact_logdet_cholesky, exact_logdet_eig, LogDetError};

fn main() -> Result<(), LogDetError> {
    let dense = rand_spd_dense(300, 1)?;
    println!("dense n=300");
    println!("  cholesky {:.10}", exact_logdet_cholesky(&dense)?);
    println!("  eig      {:.10}", exact_logdet_eig(&dense)?);

    let sparse = rand_spd_sparse(3000, 24_000, 1)?;
    let t = Instant::now();
    let v = exact_logdet_cholesky(&sparse)?;
    println!(
        "sparse n=3000 nnz={}: {v:.6} in {:.2?}",
        sparse.nnz(),
        t.elapsed()
    );

    // Random sparsity has no narrow band, so the envelope grows quickly with n.
    let large = rand_spd_sparse(200_000, 2_000_000, 1)?;
    if let Err(e) = exact_logdet_cholesky_with_budget(&large, Some(1 << 30)) {
        println!("sparse n=200000: {e}");
    }

    // A matrix that is not positive definite names the failing pivot.
    let bad = logdet::SpdMatrix::from_dense(2, vec![1.0, 2.0, 2.0, 1.0])?;
    match exact_logdet_cholesky(&bad) {
        Err(e) => println!("indefinite input: {e}"),
        Ok(v) => println!("unexpected value {v}"),
    }
    Ok(())
}
