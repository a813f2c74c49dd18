//! Laplace-regularized transition potential
//!
//!   V_t(theta) = mu_t z_t(theta)
//!              + 1/2 (1 - mu_t)(theta - theta_map)' H (theta - theta_map)
//!
//! with the schedule mu_t = 1 - exp(-t / n_s). Early in a run the quadratic
//! carries the chain; as training data accumulates the learned surrogate
//! takes over. Once frozen (training stopped) the potential is exactly the
//! surrogate and the chain is plain HMC on it.

use super::network::Surrogate;
use crate::models::{LaplaceApprox, ModelError, Potential};
use ndarray::{Array1, ArrayView1};
use std::sync::Arc;

/// mu_t = 1 - exp(-t / n_s), in [0, 1), nondecreasing in t.
pub fn transition_mu(t: u64, n_s: f64) -> f64 {
    assert!(n_s > 0.0, "transition scale must be positive");
    1.0 - (-(t as f64) / n_s).exp()
}

#[derive(Debug, Clone)]
pub struct RegularizedSurrogate {
    surrogate: Surrogate,
    laplace: Arc<LaplaceApprox>,
    n_s: f64,
    t: u64,
    frozen: bool,
}

impl RegularizedSurrogate {
    pub fn new(surrogate: Surrogate, laplace: Arc<LaplaceApprox>, n_s: f64) -> Self {
        assert!(n_s > 0.0, "transition scale must be positive");
        assert_eq!(surrogate.dim(), laplace.dim());
        RegularizedSurrogate { surrogate, laplace, n_s, t: 0, frozen: false }
    }

    pub fn surrogate(&self) -> &Surrogate {
        &self.surrogate
    }

    pub fn surrogate_mut(&mut self) -> &mut Surrogate {
        &mut self.surrogate
    }

    pub fn into_surrogate(self) -> Surrogate {
        self.surrogate
    }

    pub fn laplace(&self) -> &LaplaceApprox {
        &self.laplace
    }

    pub fn step(&self) -> u64 {
        self.t
    }

    pub fn set_step(&mut self, t: u64) {
        self.t = t;
    }

    /// Pin the blend to the pure surrogate; the chain thereafter targets
    /// q_v ~ exp(-z) exactly.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn mu(&self) -> f64 {
        if self.frozen {
            1.0
        } else {
            transition_mu(self.t, self.n_s)
        }
    }

    pub fn value(&self, theta: ArrayView1<f64>) -> f64 {
        let mu = self.mu();
        let mut v = mu * self.surrogate.eval(theta);
        if mu < 1.0 {
            v += (1.0 - mu) * self.laplace.quadratic(theta);
        }
        v
    }

    pub fn grad(&self, theta: ArrayView1<f64>) -> Array1<f64> {
        let mu = self.mu();
        let mut g = mu * &self.surrogate.grad(theta);
        if mu < 1.0 {
            g.scaled_add(1.0 - mu, &self.laplace.quadratic_grad(theta));
        }
        g
    }
}

impl Potential for RegularizedSurrogate {
    fn dim(&self) -> usize {
        self.surrogate.dim()
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        Ok(self.value(theta))
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        Ok(self.grad(theta))
    }
}
