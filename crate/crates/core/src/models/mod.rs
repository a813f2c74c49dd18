//! Target posteriors. Every model exposes its potential energy (negative log
//! unnormalized posterior), the analytic gradient, and a minibatch gradient
//! estimator for the stochastic-gradient baseline.

mod beta_binomial;
mod gaussian;
mod ica;
mod laplace;
mod logistic;
mod probit;

pub use beta_binomial::BetaBinomialModel;
pub use gaussian::GaussianTarget;
pub use ica::{natural_gradient, IcaModel};
pub use laplace::{find_map, jittered_cholesky, LaplaceApprox, MapError, MapOptions};
pub use logistic::LogisticModel;
pub use probit::{inverse_mills, log_normal_cdf, ProbitModel};

use ndarray::{Array1, ArrayView1};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point outside the model domain: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Anything Hamiltonian dynamics can run on: a potential energy and its
/// gradient. Implemented by the target models and by the surrogates.
pub trait Potential {
    fn dim(&self) -> usize;

    /// Potential energy U(theta), up to an additive constant that is fixed
    /// per instance.
    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError>;

    /// Analytic gradient of the potential.
    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError>;

    fn check_dim(&self, theta: ArrayView1<f64>) -> Result<(), ModelError> {
        if theta.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// A posterior target backed by observations. Adds the data-dependent
/// estimators on top of [`Potential`].
pub trait TargetModel: Potential {
    /// Number of likelihood terms (observations).
    fn data_len(&self) -> usize;

    /// Unbiased gradient estimator over a uniformly drawn index batch:
    /// (N / |batch|) * sum of per-datum likelihood gradients, negated, plus
    /// the full prior gradient.
    fn minibatch_grad(
        &self,
        theta: ArrayView1<f64>,
        batch: &[usize],
    ) -> Result<Array1<f64>, ModelError>;

    /// Geometry-aware preconditioning used by the stochastic-gradient
    /// baselines. Models without a natural-gradient form reject the call.
    fn precondition_gradient(
        &self,
        _theta: ArrayView1<f64>,
        _grad: Array1<f64>,
    ) -> Result<Array1<f64>, ModelError> {
        Err(ModelError::InvalidArgument(
            "natural gradient is not defined for this model".into(),
        ))
    }

    fn check_batch(&self, batch: &[usize]) -> Result<(), ModelError> {
        if batch.is_empty() {
            return Err(ModelError::InvalidArgument("empty minibatch".into()));
        }
        if let Some(&i) = batch.iter().find(|&&i| i >= self.data_len()) {
            return Err(ModelError::InvalidArgument(format!(
                "batch index {} out of range (N = {})",
                i,
                self.data_len()
            )));
        }
        Ok(())
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        (**self).potential(theta)
    }
    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        (**self).grad_potential(theta)
    }
}
