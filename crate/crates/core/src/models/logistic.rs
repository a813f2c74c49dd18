//! Bayesian logistic regression: P(y = 1 | x, beta) = 1/(1 + exp(-x' beta))
//! with a N(0, prior_variance * I) prior.

use super::{ModelError, Potential, TargetModel};
use ndarray::{Array1, Array2, ArrayView1};

fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct LogisticModel {
    x: Array2<f64>,
    y: Vec<f64>,
    prior_variance: f64,
}

impl LogisticModel {
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
        Ok(LogisticModel { x, y, prior_variance })
    }

    pub fn design(&self) -> &Array2<f64> {
        &self.x
    }
}

impl Potential for LogisticModel {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        let mut u = theta.dot(&theta) / (2.0 * self.prior_variance);
        let s = self.x.dot(&theta);
        for (n, &sn) in s.iter().enumerate() {
            let q = 2.0 * self.y[n] - 1.0;
            u += softplus(-q * sn);
        }
        Ok(u)
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        let s = self.x.dot(&theta);
        // -(y_n - sigma(s_n)) stacked through the design matrix
        let w = Array1::from_shape_fn(self.y.len(), |n| sigmoid(s[n]) - self.y[n]);
        Ok(self.x.t().dot(&w) + &(theta.to_owned() / self.prior_variance))
    }
}

impl TargetModel for LogisticModel {
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
            let s = self.x.row(n).dot(&theta);
            lik.scaled_add(sigmoid(s) - self.y[n], &self.x.row(n));
        }
        Ok(theta.to_owned() / self.prior_variance + scale * &lik)
    }
}
