use proptest::prelude::*;

use logdet::matrix::market::{read_matrix_market, write_matrix_market};
use logdet::{
    approx_logdet, convergence_trace, error_bound, exact_logdet_cholesky, generators,
    select_parameters, EstimatorConfig, SpdMatrix,
};

/// Symmetric, strictly diagonally dominant lower-triangle entries.
fn dd_triangle() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..24).prop_flat_map(|n| {
        let off = prop::collection::vec((0..n, 0..n, -1.0f64..1.0), 0..3 * n);
        (Just(n), off).prop_map(|(n, off)| {
            let mut seen = std::collections::BTreeMap::new();
            for (i, j, v) in off {
                if i != j {
                    seen.insert((i.max(j), i.min(j)), v);
                }
            }
            let mut entries: Vec<_> = seen.into_iter().map(|((i, j), v)| (i, j, v)).collect();
            let mut row_sum = vec![0.0; n];
            for &(i, j, v) in &entries {
                row_sum[i] += f64::abs(v);
                row_sum[j] += f64::abs(v);
            }
            entries.extend((0..n).map(|i| (i, i, 1.0 + row_sum[i])));
            (n, entries)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matvec_is_symmetric((n, entries) in dd_triangle(), seed in any::<u64>()) {
        let a = SpdMatrix::from_triangle(n, &entries).unwrap();
        let x = logdet::rng::gaussian_vector(n, logdet::RngStream::new(seed, 0));
        let y = logdet::rng::gaussian_vector(n, logdet::RngStream::new(seed, 1));
        let ax = a.matvec(&x).unwrap();
        let ay = a.matvec(&y).unwrap();
        let lhs = logdet::summation::dot(&y, &ax);
        let rhs = logdet::summation::dot(&x, &ay);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn dense_and_sparse_storage_agree((n, entries) in dd_triangle(), seed in any::<u64>()) {
        let sparse = SpdMatrix::from_triangle(n, &entries).unwrap();
        let dense = sparse.to_dense_matrix();
        let x = logdet::rng::gaussian_vector(n, logdet::RngStream::new(seed, 0));
        let ys = sparse.matvec(&x).unwrap();
        let yd = dense.matvec(&x).unwrap();
        for (a, b) in ys.iter().zip(&yd) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
        let ls = exact_logdet_cholesky(&sparse).unwrap();
        let ld = exact_logdet_cholesky(&dense).unwrap();
        prop_assert!((ls - ld).abs() <= 1e-9);
    }

    #[test]
    fn exact_logdet_scales((n, entries) in dd_triangle(), c in 0.01f64..100.0) {
        let a = SpdMatrix::from_triangle(n, &entries).unwrap();
        let diff = exact_logdet_cholesky(&a.scaled(c).unwrap()).unwrap() - exact_logdet_cholesky(&a).unwrap();
        prop_assert!((diff - n as f64 * c.ln()).abs() <= 1e-9);
    }

    #[test]
    fn matrix_market_round_trip((n, entries) in dd_triangle()) {
        let a = SpdMatrix::from_triangle(n, &entries).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        std::fs::write(&path, &buf).unwrap();
        let data = read_matrix_market(&path).unwrap();
        let b = SpdMatrix::from_triangle(data.n, &data.entries).unwrap();
        prop_assert_eq!(a.to_dense(), b.to_dense());
    }

    #[test]
    fn reconstruction_is_bitwise((n, entries) in dd_triangle(), seed in any::<u64>(), m in 1usize..12, p in 1usize..20) {
        let a = SpdMatrix::from_triangle(n, &entries).unwrap();
        let cfg = EstimatorConfig::new(m, 0.5).with_probes(p).with_seed(seed).with_diagnostics();
        let est = approx_logdet(&a, &cfg).unwrap();
        prop_assert_eq!(est.recompute_from_series(), Some(est.value));
        prop_assert_eq!(convergence_trace(&est).unwrap().len(), m);
    }

    #[test]
    fn selected_parameters_bound_target(kappa in 1.0f64..1e4, target in 0.01f64..0.99, n in 1usize..10_000) {
        let s = select_parameters(kappa, target).unwrap();
        let r = error_bound(kappa, 1.0, n, 5.0 * kappa, s.m, s.epsilon, None).unwrap();
        prop_assert!(r.bound <= target * n as f64 * (1.0 + 1e-12));
        prop_assert!(r.bound >= 0.0 && r.gamma_sum <= n as f64 * (5.0 * kappa).ln() * (1.0 + 1e-12));
    }
}

#[test]
fn shift_puts_spectrum_of_c_inside_unit_interval() {
    // Whenever lambda_hat >= lambda_1 / 4, alpha = 5 lambda_hat > lambda_1.
    for seed in 0..20 {
        let a = generators::rand_spd_dense(30, seed).unwrap();
        let est = approx_logdet(
            &a,
            &EstimatorConfig::single_restart(1, 0.5)
                .with_probes(1)
                .with_seed(seed),
        )
        .unwrap();
        let spectrum = logdet::eigenvalues(&a);
        let l1 = *spectrum.last().unwrap();
        if est.lambda_hat >= l1 / 4.0 {
            for l in &spectrum {
                let c = 1.0 - l / est.alpha;
                assert!(c > 0.0 && c < 1.0, "seed {seed}: {c}");
            }
        }
    }
}

#[test]
fn dominant_diagonal_converges_within_three_terms_with_unit_shift() {
    // With alpha at the estimated top eigenvalue, the partial sums of a
    // dominant-diagonal matrix settle after a few terms.
    let a = generators::rand_spd_dense_dd(400, 11).unwrap();
    let cfg = EstimatorConfig {
        alpha_factor: 1.0,
        ..EstimatorConfig::new(10, 0.5)
            .with_probes(30)
            .with_diagnostics()
    };
    let est = approx_logdet(&a, &cfg).unwrap();
    let trace = convergence_trace(&est).unwrap();
    assert!(trace[2].relative_change < 0.01, "{:?}", trace[2]);
    assert_eq!(trace[9].relative_change, 0.0);
}

#[test]
fn bitwise_equal_across_thread_pools() {
    let a = generators::rand_spd_sparse(2000, 20_000, 5).unwrap();
    let cfg = EstimatorConfig::new(7, 0.5)
        .with_probes(41)
        .with_seed(5)
        .with_diagnostics();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| approx_logdet(&a, &cfg).unwrap())
    };
    let one = run(1);
    for threads in [2, 3, 8] {
        let other = run(threads);
        assert_eq!(one.value.to_bits(), other.value.to_bits());
        assert_eq!(one.per_probe_series, other.per_probe_series);
    }
}
