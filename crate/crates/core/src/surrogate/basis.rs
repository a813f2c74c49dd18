//! Frozen random hidden layer. Node parameters are drawn once and never
//! trained; only the output weights of the [`super::Surrogate`] are fitted.
//! Inputs are whitened through the Laplace approximation (shift by the MAP
//! point, scale by the inverse Cholesky factor of the Hessian) so a single
//! node-parameter law serves targets of any scale and correlation.

use crate::linalg;
use crate::models::LaplaceApprox;
use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

/// Overflow-safe softplus sigma(u) = log(1 + exp(u)).
pub fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// sigma'(u) = logistic(u), in (0, 1).
pub fn softplus_prime(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct RandomBasis {
    /// Node weights, one row per hidden unit (s x dim).
    weights: Array2<f64>,
    /// Node biases, length s.
    biases: Array1<f64>,
    /// Whitening transform.
    laplace: LaplaceApprox,
    /// Precomputed L^-T W', dim x s: column i is the chain-rule direction of
    /// node i in the original (unwhitened) coordinates.
    back_weights: Array2<f64>,
}

impl RandomBasis {
    /// Node weights iid standard Normal, biases iid Uniform(-2, 2), applied
    /// to Laplace-whitened inputs. Deterministic in the seed.
    pub fn sample(s: usize, dim: usize, laplace: &LaplaceApprox, seed: u64) -> Self {
        assert!(s >= 1, "need at least one hidden unit");
        assert_eq!(laplace.dim(), dim, "whitening dimension mismatch");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights =
            Array2::from_shape_fn((s, dim), |_| rng.sample::<f64, _>(StandardNormal));
        let biases = Array1::from_shape_fn(s, |_| rng.random_range(-2.0..2.0));
        Self::from_parts(weights, biases, laplace.clone())
    }

    /// Build from explicit node parameters (used by tests and
    /// deserialization).
    pub fn from_parts(weights: Array2<f64>, biases: Array1<f64>, laplace: LaplaceApprox) -> Self {
        assert_eq!(weights.nrows(), biases.len());
        assert_eq!(weights.ncols(), laplace.dim());
        let dim = weights.ncols();
        let s = weights.nrows();
        let mut back = Array2::<f64>::zeros((dim, s));
        for i in 0..s {
            let col = linalg::solve_lower_transpose(laplace.chol.view(), weights.row(i));
            back.column_mut(i).assign(&col);
        }
        RandomBasis { weights, biases, laplace, back_weights: back }
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn biases(&self) -> &Array1<f64> {
        &self.biases
    }

    pub fn laplace(&self) -> &LaplaceApprox {
        &self.laplace
    }

    pub fn whiten(&self, theta: ArrayView1<f64>) -> Array1<f64> {
        self.laplace.whiten(theta)
    }

    /// Node pre-activations u_i = w_i . whiten(theta) + d_i.
    pub fn preactivations(&self, theta: ArrayView1<f64>) -> Array1<f64> {
        let white = self.whiten(theta);
        self.weights.dot(&white) + &self.biases
    }

    /// Feature Jacobian A(theta), dim x s: column i is
    /// sigma'(u_i) * L^-T w_i. The gradient of any surrogate with output
    /// weights v is A(theta) v.
    pub fn feature_jacobian(&self, theta: ArrayView1<f64>) -> Array2<f64> {
        let u = self.preactivations(theta);
        let mut a = self.back_weights.clone();
        for (i, &ui) in u.iter().enumerate() {
            let scale = softplus_prime(ui);
            a.column_mut(i).mapv_inplace(|x| x * scale);
        }
        a
    }

    /// Evaluate z(theta) = sum_i v_i sigma(u_i) for the given output weights.
    pub fn eval(&self, v: ArrayView1<f64>, theta: ArrayView1<f64>) -> f64 {
        let u = self.preactivations(theta);
        u.iter().zip(v.iter()).map(|(&ui, &vi)| vi * softplus(ui)).sum()
    }

    /// Gradient of `eval` with respect to theta:
    /// back_weights (v elementwise sigma'(u)).
    pub fn grad(&self, v: ArrayView1<f64>, theta: ArrayView1<f64>) -> Array1<f64> {
        let u = self.preactivations(theta);
        let scaled =
            Array1::from_shape_fn(self.len(), |i| v[i] * softplus_prime(u[i]));
        self.back_weights.dot(&scaled)
    }
}

/// Shared handle: a frozen basis may be shared across chains.
pub type SharedBasis = Arc<RandomBasis>;

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softplus_is_overflow_safe() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert_eq!(softplus(-1000.0), 0.0);
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((softplus_prime(0.0) - 0.5).abs() < 1e-15);
        assert!(softplus_prime(800.0) <= 1.0 && softplus_prime(-800.0) >= 0.0);
    }

    #[test]
    fn sampled_shapes_and_determinism() {
        let lap = LaplaceApprox::identity(5);
        let a = RandomBasis::sample(100, 5, &lap, 12);
        assert_eq!(a.weights().dim(), (100, 5));
        assert_eq!(a.biases().len(), 100);
        let b = RandomBasis::sample(100, 5, &lap, 12);
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.biases(), b.biases());
        let c = RandomBasis::sample(100, 5, &lap, 13);
        assert_ne!(a.weights(), c.weights());
        assert!(a.biases().iter().all(|&d| (-2.0..2.0).contains(&d)));
    }

    #[test]
    fn whitened_input_vanishes_at_map_point() {
        let lap = LaplaceApprox::from_hessian(
            array![0.7, -1.1],
            array![[3.0, 0.5], [0.5, 2.0]],
            0.0,
        )
        .unwrap();
        let basis = RandomBasis::sample(7, 2, &lap, 3);
        let u = basis.preactivations(array![0.7, -1.1].view());
        for (ui, di) in u.iter().zip(basis.biases().iter()) {
            assert!((ui - di).abs() < 1e-14);
        }
    }
}
