//! Gaussian trace estimation of an implicit operator.

use logdet::estimators::gaussian_trace_with_accuracy;
use logdet::{gaussian_trace, generators, probes_needed, LogDetError, RngStream};

fn main() -> Result<(), LogDetError> {
    let a = generators::rand_spd_sparse(5000, 50_000, 2)?;
    let exact: f64 = a.diagonal().iter().sum();
    let apply = |x: &[f64], y: &mut [f64]| a.matvec_into(x, y).expect("dimensions match");

    for p in [10, 100, 1000] {
        let est = gaussian_trace(apply, a.n(), p, RngStream::new(7, 0))?;
        println!(
            "p={p:5}: {:.2} (rel err {:.2e})",
            est.value,
            (est.value - exact).abs() / exact
        );
    }
    let p = probes_needed(0.1, 0.01)?;
    let est = gaussian_trace_with_accuracy(apply, a.n(), 0.1, 0.01, RngStream::new(7, 0))?;
    println!(
        "eps=0.1 delta=0.01 -> p={p}: {:.2}, exact {exact:.2}",
        est.value
    );
    Ok(())
}
