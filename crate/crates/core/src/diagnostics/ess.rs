//! Effective sample size: B / (1 + 2 sum_k gamma(k)) with the
//! autocorrelation sum truncated by Geyer's initial-positive-sequence rule
//! (stop at the first adjacent pair of autocorrelations whose sum goes
//! nonpositive). Autocorrelations use direct sums with the biased 1/B
//! normalization; chains at this scale are short enough that no FFT is
//! warranted.

use super::DiagnosticsError;
use ndarray::ArrayView2;

/// ESS of a single scalar chain.
pub fn ess(chain: &[f64]) -> Result<f64, DiagnosticsError> {
    let b = chain.len();
    if b < 10 {
        return Err(DiagnosticsError::TooShort { got: b, need: 10 });
    }
    let mean = chain.iter().sum::<f64>() / b as f64;
    let c0 = chain.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / b as f64;
    if c0 <= 0.0 || !c0.is_finite() {
        return Err(DiagnosticsError::DegenerateChain);
    }
    let rho = |k: usize| -> f64 {
        if k >= b {
            return 0.0;
        }
        let mut acc = 0.0;
        for t in 0..(b - k) {
            acc += (chain[t] - mean) * (chain[t + k] - mean);
        }
        acc / (b as f64 * c0)
    };

    let mut sum = 0.0;
    let mut k = 1usize;
    while k + 1 < b {
        let pair = rho(k) + rho(k + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        k += 2;
    }
    Ok(b as f64 / (1.0 + 2.0 * sum))
}

/// Per-coordinate mean ESS of a T x d chain.
pub fn mean_ess(samples: ArrayView2<f64>) -> Result<f64, DiagnosticsError> {
    let d = samples.ncols();
    if d == 0 {
        return Err(DiagnosticsError::DegenerateChain);
    }
    let mut acc = 0.0;
    for j in 0..d {
        let col: Vec<f64> = samples.column(j).to_vec();
        acc += ess(&col)?;
    }
    Ok(acc / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ar1(rho: f64, b: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let innov_sd = (1.0 - rho * rho).sqrt();
        let mut x = rng.sample::<f64, _>(StandardNormal);
        (0..b)
            .map(|_| {
                x = rho * x + innov_sd * rng.sample::<f64, _>(StandardNormal);
                x
            })
            .collect()
    }

    #[test]
    fn iid_chain_ess_is_near_b() {
        let chain = ar1(0.0, 10_000, 1);
        let e = ess(&chain).unwrap();
        assert!(
            (e - 10_000.0).abs() <= 0.2 * 10_000.0,
            "iid ESS {} not within 20% of B",
            e
        );
    }

    #[test]
    fn ar1_ess_matches_closed_form() {
        // asymptotic ESS of AR(1): B (1 - rho) / (1 + rho)
        let b = 100_000;
        let chain = ar1(0.9, b, 2);
        let e = ess(&chain).unwrap();
        let want = b as f64 * (1.0 - 0.9) / (1.0 + 0.9);
        assert!(
            (e - want).abs() <= 0.25 * want,
            "AR(1) ESS {} not within 25% of {}",
            e,
            want
        );
    }

    #[test]
    fn ess_decreases_with_autocorrelation() {
        let b = 20_000;
        let mut last = f64::INFINITY;
        for (i, rho) in [0.0, 0.5, 0.9].iter().enumerate() {
            let e = ess(&ar1(*rho, b, 3 + i as u64)).unwrap();
            assert!(e < last, "ESS should fall as rho grows");
            last = e;
        }
    }

    #[test]
    fn degenerate_chains_error() {
        assert!(matches!(
            ess(&vec![2.5; 100]),
            Err(DiagnosticsError::DegenerateChain)
        ));
        assert!(matches!(
            ess(&[1.0, 2.0, 3.0]),
            Err(DiagnosticsError::TooShort { .. })
        ));
    }

    #[test]
    fn mean_ess_averages_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let samples =
            Array2::from_shape_fn((5000, 3), |_| rng.sample::<f64, _>(StandardNormal));
        let m = mean_ess(samples.view()).unwrap();
        assert!((m - 5000.0).abs() < 0.2 * 5000.0);
    }
}
