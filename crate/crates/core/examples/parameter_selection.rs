//! Choosing m and epsilon from a condition number and a target error per
//! dimension, then checking the result on a diagonal matrix.

use logdet::{
    approx_logdet, probes_needed, select_parameters, EstimatorConfig, LogDetError, SpdMatrix,
};

fn main() -> Result<(), LogDetError> {
    for kappa in [1.0, 10.0, 100.0] {
        for target in [0.5, 0.25, 0.1] {
            let s = select_parameters(kappa, target)?;
            println!(
                "kappa {kappa:6} target {target:4}: m = {:4}, epsilon = {:.5}, p = {}",
                s.m,
                s.epsilon,
                probes_needed(s.epsilon, 0.01)?
            );
        }
    }

    let n = 1000;
    let kappa = 5.0;
    let spectrum: Vec<f64> = (0..n)
        .map(|i| 1.0 + (kappa - 1.0) * i as f64 / (n - 1) as f64)
        .collect();
    let exact: f64 = spectrum.iter().map(|l| l.ln()).sum();
    let s = select_parameters(kappa, 0.25)?;
    let est = approx_logdet(
        &SpdMatrix::from_diagonal(&spectrum)?,
        &EstimatorConfig::new(s.m, s.epsilon),
    )?;
    println!(
        "n={n}: |error| = {:.3} <= {:.1}",
        (est.value - exact).abs(),
        0.25 * n as f64
    );
    Ok(())
}
