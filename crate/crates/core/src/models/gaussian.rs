//! Gaussian test target with known moments, used throughout the test suites
//! as the analytically tractable reference.

use super::{ModelError, Potential, TargetModel};
use ndarray::{Array1, Array2, ArrayView1};

/// U(theta) = 0.5 (theta - mean)' P (theta - mean), so the potential is zero
/// at the mode.
#[derive(Debug, Clone)]
pub struct GaussianTarget {
    mean: Array1<f64>,
    precision: Array2<f64>,
}

impl GaussianTarget {
    pub fn new(mean: Array1<f64>, precision: Array2<f64>) -> Self {
        assert_eq!(mean.len(), precision.nrows());
        assert_eq!(precision.nrows(), precision.ncols());
        GaussianTarget { mean, precision }
    }

    /// Standard normal N(0, I_dim).
    pub fn standard(dim: usize) -> Self {
        GaussianTarget::new(Array1::zeros(dim), Array2::eye(dim))
    }

    pub fn mean(&self) -> ArrayView1<f64> {
        self.mean.view()
    }

    pub fn precision(&self) -> &Array2<f64> {
        &self.precision
    }
}

impl Potential for GaussianTarget {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        let d = &theta.to_owned() - &self.mean;
        Ok(0.5 * d.dot(&self.precision.dot(&d)))
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        let d = &theta.to_owned() - &self.mean;
        Ok(self.precision.dot(&d))
    }
}

impl TargetModel for GaussianTarget {
    fn data_len(&self) -> usize {
        0
    }

    /// No likelihood terms to subsample; the estimator is the exact gradient.
    fn minibatch_grad(
        &self,
        theta: ArrayView1<f64>,
        _batch: &[usize],
    ) -> Result<Array1<f64>, ModelError> {
        self.grad_potential(theta)
    }
}
