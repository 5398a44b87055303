//! Top-eigenvalue estimate used to pick the shift.

use logdet::estimators::default_power_iterations;
use logdet::{boosted_power_method, eigenvalues, generators, power_method, LogDetError, RngStream};

fn main() -> Result<(), LogDetError> {
    let a = generators::rand_spd_dense(400, 3)?;
    let lambda_1 = *eigenvalues(&a).last().unwrap();
    let t = default_power_iterations(a.n());

    for seed in 0..5 {
        let r = power_method(&a, t, RngStream::new(seed, 0))?;
        println!(
            "seed {seed}: lambda_hat = {:.6}  (ratio {:.4})",
            r.lambda_hat,
            r.lambda_hat / lambda_1
        );
    }
    let boosted = boosted_power_method(&a, t, 3, RngStream::new(0, 0))?;
    println!(
        "best of 3: {:.6}, alpha = {:.6}, lambda_1 = {lambda_1:.6}",
        boosted.lambda_hat, boosted.alpha
    );
    Ok(())
}
