use serde::{Deserialize, Serialize};

use crate::error::{LogDetError, Result};
use crate::matrix::SpdMatrix;
use crate::rng::{rademacher_vector, RngStream};
use crate::summation::{dot, norm2};

/// The shift is this multiple of the estimated top eigenvalue. If the
/// estimate is at least a quarter of the true value, the shift exceeds it.
pub const ALPHA_FACTOR: f64 = 5.0;

/// Restarts tolerated when an iterate underflows to zero.
pub const MAX_RESTARTS: usize = 8;

/// Stream ids reserved for one repetition of the boosted method (the first
/// run plus its underflow restarts).
const STREAMS_PER_REPETITION: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMethodResult {
    pub lambda_hat: f64,
    /// `ALPHA_FACTOR * lambda_hat`.
    pub alpha: f64,
    pub iterations: usize,
    pub repetitions: usize,
    pub stream_ids_used: Vec<u64>,
}

/// `ceil(log2(4n))`: enough iterations for `lambda_hat >= lambda_1 / 4` with
/// probability at least 3/16 from a random sign start.
pub fn default_power_iterations(n: usize) -> usize {
    (4.0 * n as f64).log2().ceil().max(1.0) as usize
}

/// Power iteration from a uniform random sign vector.
///
/// Runs `x <- A x / ||A x||` for `t` steps and returns the Rayleigh quotient
/// `x^T A x / x^T x` of the final iterate. The quotient never exceeds the top
/// eigenvalue. If an iterate underflows, the run restarts from the next
/// stream id; after [`MAX_RESTARTS`] failures the call errors.
pub fn power_method(a: &SpdMatrix, t: usize, stream: RngStream) -> Result<PowerMethodResult> {
    if t == 0 {
        return Err(LogDetError::param(
            "t",
            "at least one iteration is required",
        ));
    }
    let n = a.n();
    let mut y = vec![0.0; n];
    let mut used = Vec::new();
    for restart in 0..=MAX_RESTARTS as u64 {
        let s = stream.offset(restart);
        used.push(s.stream_id);
        let mut x = rademacher_vector(n, s);
        let mut ok = true;
        for _ in 0..t {
            a.matvec_into(&x, &mut y)?;
            let norm = norm2(&y);
            if !(norm > 0.0 && norm.is_finite()) {
                ok = false;
                break;
            }
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / norm;
            }
        }
        if !ok {
            continue;
        }
        a.matvec_into(&x, &mut y)?;
        let lambda_hat = dot(&x, &y) / dot(&x, &x);
        if !(lambda_hat > 0.0 && lambda_hat.is_finite()) {
            continue;
        }
        return Ok(PowerMethodResult {
            lambda_hat,
            alpha: ALPHA_FACTOR * lambda_hat,
            iterations: t,
            repetitions: 1,
            stream_ids_used: used,
        });
    }
    Err(LogDetError::Numerical(format!(
        "power iteration underflowed in {} consecutive restarts",
        MAX_RESTARTS + 1
    )))
}

/// Runs `repetitions` independent power iterations and keeps the largest
/// estimate. Every estimate is a lower bound on the top eigenvalue, so the
/// maximum is too, and it misses the quarter threshold with probability at
/// most `(13/16)^repetitions`.
pub fn boosted_power_method(
    a: &SpdMatrix,
    t: usize,
    repetitions: usize,
    master: RngStream,
) -> Result<PowerMethodResult> {
    if repetitions == 0 {
        return Err(LogDetError::param(
            "repetitions",
            "at least one repetition is required",
        ));
    }
    let mut best: Option<PowerMethodResult> = None;
    let mut used = Vec::new();
    for r in 0..repetitions as u64 {
        let run = power_method(a, t, master.offset(r * STREAMS_PER_REPETITION))?;
        used.extend_from_slice(&run.stream_ids_used);
        if best
            .as_ref()
            .map_or(true, |b| run.lambda_hat > b.lambda_hat)
        {
            best = Some(run);
        }
    }
    let best = best.expect("at least one repetition ran");
    Ok(PowerMethodResult {
        repetitions,
        stream_ids_used: used,
        ..best
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::eigenvalues;
    use crate::generators;

    fn stream(seed: u64) -> RngStream {
        RngStream::new(seed, crate::rng::POWER_STREAM_BASE)
    }

    #[test]
    fn identity_is_exact() {
        let a = SpdMatrix::identity(5).unwrap();
        for t in [1, 3, 10] {
            let r = power_method(&a, t, stream(t as u64)).unwrap();
            assert_eq!(r.lambda_hat, 1.0);
            assert_eq!(r.alpha, 5.0);
        }
        let dense = a.to_dense_matrix();
        assert_eq!(power_method(&dense, 4, stream(0)).unwrap().lambda_hat, 1.0);
    }

    #[test]
    fn scaled_identity() {
        let a = SpdMatrix::from_diagonal(&[3.0; 6]).unwrap();
        for seed in 0..20 {
            let r = power_method(&a, 5, stream(seed)).unwrap();
            assert_eq!(r.lambda_hat, 3.0, "seed {seed}");
        }
    }

    #[test]
    fn converges_on_separated_spectrum() {
        // Error contracts like (1/4)^t, so t = 40 leaves nothing measurable.
        let a = SpdMatrix::from_diagonal(&[4.0, 1.0, 1.0]).unwrap();
        let hits = (0..1000)
            .filter(|&s| {
                let l = power_method(&a, 40, stream(s)).unwrap().lambda_hat;
                (4.0 - 1e-6..=4.0).contains(&l)
            })
            .count();
        assert!(hits >= 990, "{hits}");
    }

    #[test]
    fn never_exceeds_top_eigenvalue() {
        for seed in 0..10 {
            let a = generators::rand_spd_dense(60, seed).unwrap();
            let top = *eigenvalues(&a).last().unwrap();
            for t in [1, 2, 8] {
                let l = power_method(&a, t, stream(seed)).unwrap().lambda_hat;
                assert!(l > 0.0 && l <= top * (1.0 + 1e-9), "{l} vs {top}");
            }
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let a = SpdMatrix::identity(2).unwrap();
        assert!(power_method(&a, 0, stream(0)).is_err());
        assert!(boosted_power_method(&a, 1, 0, stream(0)).is_err());
    }

    #[test]
    fn underflow_exhausts_restarts() {
        // Entries this small underflow to zero after one product.
        let a = SpdMatrix::from_diagonal(&[1e-300, 1e-300]).unwrap();
        let err = power_method(&a, 3, stream(0)).unwrap_err();
        assert!(matches!(err, LogDetError::Numerical(_)));
    }

    #[test]
    fn single_repetition_matches_plain_run() {
        let a = generators::rand_spd_sparse(200, 2000, 4).unwrap();
        let plain = power_method(&a, 9, stream(7)).unwrap();
        let boosted = boosted_power_method(&a, 9, 1, stream(7)).unwrap();
        assert_eq!(plain, boosted);
    }

    #[test]
    fn boosted_is_max_of_restarts() {
        let a = SpdMatrix::from_diagonal(&[4.0, 1.0, 0.5, 0.25]).unwrap();
        let r = boosted_power_method(&a, 1, 6, stream(3)).unwrap();
        for k in 0..6 {
            let single = power_method(&a, 1, stream(3).offset(k * STREAMS_PER_REPETITION)).unwrap();
            assert!(r.lambda_hat >= single.lambda_hat);
        }
        assert_eq!(r.repetitions, 6);
        assert_eq!(r.stream_ids_used.len(), 6);
    }

    #[test]
    fn boosting_reaches_quarter_threshold() {
        // With diag(4, 1) any start gives lambda_hat >= 1; the check is that
        // boosting never lowers it.
        let a = SpdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let hits = (0..10_000)
            .filter(|&s| {
                boosted_power_method(&a, 20, 8, stream(s))
                    .unwrap()
                    .lambda_hat
                    >= 1.0
            })
            .count();
        assert!(hits >= 9990, "{hits}");
    }

    #[test]
    fn default_iterations() {
        assert_eq!(default_power_iterations(1), 2);
        assert_eq!(default_power_iterations(100), 9);
        assert_eq!(default_power_iterations(1000), 12);
        assert_eq!(default_power_iterations(256), 10);
    }
}
