//! Monte Carlo estimate of the expected squared score distance between the
//! surrogate and the target, evaluated on a set of sample points.

use super::network::Surrogate;
use crate::models::{ModelError, Potential};
use ndarray::ArrayView2;

/// (1/2T) sum_t || grad z(theta_t) - grad U(theta_t) ||^2 over the rows of
/// `samples`.
pub fn empirical_score_distance<P: Potential>(
    surrogate: &Surrogate,
    target: &P,
    samples: ArrayView2<f64>,
) -> Result<f64, ModelError> {
    if samples.nrows() == 0 {
        return Err(ModelError::InvalidArgument("empty sample set".into()));
    }
    let mut acc = 0.0;
    for row in samples.rows() {
        let gz = surrogate.grad(row);
        let gu = target.grad_potential(row)?;
        let d = &gz - &gu;
        acc += d.dot(&d);
    }
    Ok(acc / (2.0 * samples.nrows() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{GaussianTarget, LaplaceApprox};
    use crate::surrogate::RandomBasis;
    use ndarray::{Array1, Array2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::sync::Arc;

    #[test]
    fn zero_weights_on_gaussian_gives_mean_squared_norm() {
        let target = GaussianTarget::standard(3);
        let basis = RandomBasis::sample(5, 3, &LaplaceApprox::identity(3), 1);
        let sur = Surrogate::zeroed(Arc::new(basis));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples =
            Array2::from_shape_fn((40, 3), |_| rng.sample::<f64, _>(StandardNormal));
        let got = empirical_score_distance(&sur, &target, samples.view()).unwrap();
        let want: f64 = samples
            .rows()
            .into_iter()
            .map(|r| r.dot(&r))
            .sum::<f64>()
            / (2.0 * 40.0);
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn perfect_surrogate_scores_zero() {
        // target potential built to equal the surrogate exactly
        let basis = Arc::new(RandomBasis::sample(6, 2, &LaplaceApprox::identity(2), 3));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = Array1::from_shape_fn(6, |_| rng.sample::<f64, _>(StandardNormal));
        let sur = Surrogate::new(basis.clone(), v.clone());
        let twin = Surrogate::new(basis, v);
        let samples =
            Array2::from_shape_fn((10, 2), |_| rng.sample::<f64, _>(StandardNormal));
        let d = empirical_score_distance(&sur, &twin, samples.view()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn matches_naive_two_loop_oracle() {
        let target = GaussianTarget::standard(2);
        let basis = Arc::new(RandomBasis::sample(7, 2, &LaplaceApprox::identity(2), 5));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let v = Array1::from_shape_fn(7, |_| rng.sample::<f64, _>(StandardNormal));
        let sur = Surrogate::new(basis, v);
        let samples =
            Array2::from_shape_fn((25, 2), |_| rng.sample::<f64, _>(StandardNormal));

        let mut acc = 0.0;
        for t in 0..25 {
            let row = samples.row(t);
            let gz = sur.grad(row);
            let gu = target.grad_potential(row).unwrap();
            for j in 0..2 {
                let d = gz[j] - gu[j];
                acc += d * d;
            }
        }
        let want = acc / 50.0;
        let got = empirical_score_distance(&sur, &target, samples.view()).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn empty_sample_set_is_rejected() {
        let target = GaussianTarget::standard(2);
        let basis = RandomBasis::sample(3, 2, &LaplaceApprox::identity(2), 7);
        let sur = Surrogate::zeroed(Arc::new(basis));
        let samples = Array2::<f64>::zeros((0, 2));
        assert!(empirical_score_distance(&sur, &target, samples.view()).is_err());
    }
}
