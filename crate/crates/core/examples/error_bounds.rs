//! Series truncation against its tail bound, and the full error bound for
//! randomized runs.

use logdet::bounds::truncated_series_partials;
use logdet::{
    approx_logdet, eigenvalues, error_bound, exact_logdet_eig, generators, EstimatorConfig,
    LogDetError,
};

fn main() -> Result<(), LogDetError> {
    let a = generators::rand_spd_dense(150, 9)?;
    let spectrum = eigenvalues(&a);
    let (l_n, l_1) = (spectrum[0], *spectrum.last().unwrap());
    let exact = exact_logdet_eig(&a)?;
    let alpha = 5.0 * l_1;

    let partials = truncated_series_partials(&a, alpha, 40)?;
    println!("  m   truncation error   tail bound");
    for m in [1, 5, 10, 20, 40] {
        let r = error_bound(l_1, l_n, a.n(), alpha, m, 0.5, Some(&spectrum))?;
        let tail = r.bound - 0.5 * r.gamma_sum;
        println!("{m:3}   {:16.6e}   {tail:10.6e}", partials[m - 1] - exact);
    }

    let m = 20;
    let est = approx_logdet(&a, &EstimatorConfig::new(m, 0.5).with_seed(2))?;
    let r = error_bound(l_1, l_n, a.n(), est.alpha, m, 0.5, Some(&spectrum))?;
    println!(
        "randomized: |error| = {:.4}, bound = {:.4} (stated-form bound {:.4})",
        (est.value - exact).abs(),
        r.bound,
        r.bound_paper
    );
    Ok(())
}
