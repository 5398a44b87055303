//! Partial sums as more series terms are kept, for two shift choices.

use logdet::{
    approx_logdet, convergence_trace, exact_logdet_cholesky, generators, EstimatorConfig,
    LogDetError,
};

fn main() -> Result<(), LogDetError> {
    let a = generators::rand_spd_dense_dd(800, 1)?;
    let exact = exact_logdet_cholesky(&a)?;
    println!("exact {exact:.4}");

    for factor in [5.0, 1.0] {
        let cfg = EstimatorConfig {
            alpha_factor: factor,
            ..EstimatorConfig::new(12, 0.5)
                .with_probes(60)
                .with_diagnostics()
        };
        let est = approx_logdet(&a, &cfg)?;
        println!("\nalpha = {factor} * lambda_hat");
        println!(" k   estimate      change vs k=12   error vs exact");
        for point in convergence_trace(&est)? {
            println!(
                "{:2}   {:10.4}   {:14.3e}   {:12.3e}",
                point.k,
                point.partial_value,
                point.relative_change,
                (point.partial_value - exact).abs() / exact
            );
        }
    }
    Ok(())
}
