//! Bayesian probit regression: P(y = 1 | x, theta) = Phi(theta' x) with a
//! N(0, prior_variance * I) prior. The log CDF is evaluated through its
//! asymptotic tail expansion far into the left tail, where the direct
//! complementary-error-function form underflows.

use super::{ModelError, Potential, TargetModel};
use ndarray::{Array1, Array2, ArrayView1};
use statrs::function::erf::erfc;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const TAIL_SWITCH: f64 = -8.0;

/// log Phi(z), finite for any finite z. Direct erfc form for z >= -8, the
/// standard Mills-ratio asymptotic series below.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z >= TAIL_SWITCH {
        (0.5 * erfc(-z / std::f64::consts::SQRT_2)).ln()
    } else {
        -0.5 * z * z - HALF_LN_2PI - (-z).ln() + tail_series(z).ln()
    }
}

/// phi(z) / Phi(z), the inverse Mills ratio, stable in the left tail.
pub fn inverse_mills(z: f64) -> f64 {
    if z >= TAIL_SWITCH {
        let log_pdf = -0.5 * z * z - HALF_LN_2PI;
        (log_pdf - log_normal_cdf(z)).exp()
    } else {
        -z / tail_series(z)
    }
}

/// 1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8, the expansion factor in
/// Phi(z) = phi(z)/(-z) * series for z -> -inf.
fn tail_series(z: f64) -> f64 {
    let w = 1.0 / (z * z);
    1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * 105.0)))
}

#[derive(Debug, Clone)]
pub struct ProbitModel {
    x: Array2<f64>,
    y: Vec<f64>,
    prior_variance: f64,
}

impl ProbitModel {
    pub fn new(x: Array2<f64>, y: Vec<f64>, prior_variance: f64) -> Result<Self, ModelError> {
        if x.nrows() != y.len() {
            return Err(ModelError::InvalidArgument(format!(
                "{} rows vs {} labels",
                x.nrows(),
                y.len()
            )));
        }
        if !(prior_variance > 0.0) {
            return Err(ModelError::InvalidArgument("prior variance must be positive".into()));
        }
        if y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(ModelError::InvalidArgument("labels must be 0/1".into()));
        }
        Ok(ProbitModel { x, y, prior_variance })
    }

    fn datum_neg_log_lik(&self, n: usize, theta: ArrayView1<f64>) -> f64 {
        let s = self.x.row(n).dot(&theta);
        let q = 2.0 * self.y[n] - 1.0;
        -log_normal_cdf(q * s)
    }

    fn datum_grad_into(&self, n: usize, theta: ArrayView1<f64>, out: &mut Array1<f64>) {
        let s = self.x.row(n).dot(&theta);
        let q = 2.0 * self.y[n] - 1.0;
        let w = -q * inverse_mills(q * s);
        out.scaled_add(w, &self.x.row(n));
    }
}

impl Potential for ProbitModel {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        let mut u = theta.dot(&theta) / (2.0 * self.prior_variance);
        for n in 0..self.y.len() {
            u += self.datum_neg_log_lik(n, theta);
        }
        Ok(u)
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        let mut g = theta.to_owned() / self.prior_variance;
        for n in 0..self.y.len() {
            self.datum_grad_into(n, theta, &mut g);
        }
        Ok(g)
    }
}

impl TargetModel for ProbitModel {
    fn data_len(&self) -> usize {
        self.y.len()
    }

    fn minibatch_grad(
        &self,
        theta: ArrayView1<f64>,
        batch: &[usize],
    ) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        self.check_batch(batch)?;
        let scale = self.data_len() as f64 / batch.len() as f64;
        let mut lik = Array1::<f64>::zeros(self.dim());
        for &n in batch {
            self.datum_grad_into(n, theta, &mut lik);
        }
        Ok(theta.to_owned() / self.prior_variance + scale * &lik)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_model(n: usize, d: usize, seed: u64) -> (ProbitModel, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, d), |_| rng.sample::<f64, _>(StandardNormal));
        let y: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect();
        (ProbitModel::new(x, y, 100.0).unwrap(), rng)
    }

    #[test]
    fn deep_tail_log_cdf_is_finite_and_matches_expansion() {
        let z = -40.0;
        let v = log_normal_cdf(z);
        assert!(v.is_finite());
        let expansion = -0.5 * z * z - HALF_LN_2PI - (-z).ln() + tail_series(z).ln();
        assert!((v - expansion).abs() < 1e-6);
    }

    #[test]
    fn log_cdf_is_continuous_at_the_switch_point() {
        for &z in &[-8.0 - 1e-9, -8.0, -8.0 + 1e-9] {
            let direct = (0.5 * erfc(-z / std::f64::consts::SQRT_2)).ln();
            assert!((log_normal_cdf(z) - direct).abs() < 1e-9 * direct.abs());
        }
    }

    #[test]
    fn inverse_mills_agrees_across_switch() {
        for &z in &[-8.5, -8.0, -7.5] {
            let series = -z / tail_series(z);
            assert!(((inverse_mills(z) - series) / series).abs() < 1e-6);
        }
    }

    #[test]
    fn potential_is_finite_with_extreme_linear_predictor() {
        let x = Array2::from_shape_vec((1, 1), vec![1.0]).unwrap();
        let model = ProbitModel::new(x, vec![1.0], 100.0).unwrap();
        let u = model.potential(array![-40.0].view()).unwrap();
        assert!(u.is_finite());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (model, mut rng) = random_model(40, 5, 3);
        for _ in 0..20 {
            let theta =
                Array1::from_shape_fn(5, |_| 0.8 * rng.sample::<f64, _>(StandardNormal));
            let g = model.grad_potential(theta.view()).unwrap();
            let fd =
                numdiff::central_grad(|t| model.potential(t).unwrap(), theta.view(), 6e-6);
            assert!(numdiff::grad_rel_error(g.view(), fd.view()) <= 1e-5);
        }
    }

    #[test]
    fn minibatch_partition_average_equals_full_gradient() {
        let (model, mut rng) = random_model(8, 3, 5);
        let theta = Array1::from_shape_fn(3, |_| rng.sample::<f64, _>(StandardNormal));
        let full = model.grad_potential(theta.view()).unwrap();
        let mut acc = Array1::<f64>::zeros(3);
        let batches: Vec<Vec<usize>> = (0..4).map(|k| vec![2 * k, 2 * k + 1]).collect();
        for b in &batches {
            acc += &model.minibatch_grad(theta.view(), b).unwrap();
        }
        acc /= batches.len() as f64;
        for (a, b) in acc.iter().zip(full.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
