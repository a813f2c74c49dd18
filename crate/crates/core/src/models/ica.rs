//! Posterior over the unmixing matrix W of an independent component
//! analysis model: p(x | W) = |det W| * prod_i p_i(w_i' x) with the
//! heavy-tailed component density p_i(u) = [4 cosh(u/2)]^-1 and a
//! N(0, sigma) prior (sigma a variance) on each entry of W.
//!
//! The parameter vector is W flattened row-major, so dim = d^2.

use super::{ModelError, Potential, TargetModel};
use crate::linalg;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

#[derive(Debug, Clone)]
pub struct IcaModel {
    x: Array2<f64>,
    prior_variance: f64,
    d: usize,
}

/// ln cosh(a) without overflow: |a| + ln(1 + exp(-2|a|)) - ln 2.
fn ln_cosh(a: f64) -> f64 {
    a.abs() + (-2.0 * a.abs()).exp().ln_1p() - std::f64::consts::LN_2
}

impl IcaModel {
    pub fn new(x: Array2<f64>, prior_variance: f64) -> Result<Self, ModelError> {
        let d = x.ncols();
        if d == 0 || x.nrows() == 0 {
            return Err(ModelError::InvalidArgument("empty data matrix".into()));
        }
        if !(prior_variance > 0.0) {
            return Err(ModelError::InvalidArgument("prior variance must be positive".into()));
        }
        Ok(IcaModel { x, prior_variance, d })
    }

    pub fn channels(&self) -> usize {
        self.d
    }

    fn unflatten(&self, theta: ArrayView1<f64>) -> Array2<f64> {
        Array2::from_shape_vec((self.d, self.d), theta.to_vec()).unwrap()
    }

    /// Likelihood gradient of the given rows only, as a d x d matrix of
    /// source terms sum_n tanh(u_ni / 2)/2 * x_nj.
    fn source_terms(&self, w: &Array2<f64>, batch: Option<&[usize]>) -> Array2<f64> {
        let mut out = Array2::<f64>::zeros((self.d, self.d));
        let rows: Box<dyn Iterator<Item = usize>> = match batch {
            Some(b) => Box::new(b.iter().copied()),
            None => Box::new(0..self.x.nrows()),
        };
        for n in rows {
            let xn = self.x.row(n);
            let u = w.dot(&xn);
            for i in 0..self.d {
                let t = 0.5 * (0.5 * u[i]).tanh();
                for j in 0..self.d {
                    out[[i, j]] += t * xn[j];
                }
            }
        }
        out
    }
}

impl Potential for IcaModel {
    fn dim(&self) -> usize {
        self.d * self.d
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        let w = self.unflatten(theta);
        let lu = linalg::lu_decompose(w.view())
            .map_err(|_| ModelError::Domain("singular unmixing matrix".into()))?;
        let n = self.x.nrows() as f64;
        let mut u = -n * lu.log_abs_det();
        for xn in self.x.rows() {
            let s = w.dot(&xn);
            for i in 0..self.d {
                u += ln_cosh(0.5 * s[i]);
            }
        }
        u += theta.dot(&theta) / (2.0 * self.prior_variance);
        if !u.is_finite() {
            return Err(ModelError::Domain("non-finite potential".into()));
        }
        Ok(u)
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        let w = self.unflatten(theta);
        let lu = linalg::lu_decompose(w.view())
            .map_err(|_| ModelError::Domain("singular unmixing matrix".into()))?;
        let w_inv_t = lu.inverse().t().to_owned();
        let n = self.x.nrows() as f64;
        let grad = -n * &w_inv_t + &self.source_terms(&w, None)
            + &(w.to_owned() / self.prior_variance);
        Ok(Array1::from_iter(grad.iter().copied()))
    }
}

impl TargetModel for IcaModel {
    fn data_len(&self) -> usize {
        self.x.nrows()
    }

    fn minibatch_grad(
        &self,
        theta: ArrayView1<f64>,
        batch: &[usize],
    ) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        self.check_batch(batch)?;
        let w = self.unflatten(theta);
        let lu = linalg::lu_decompose(w.view())
            .map_err(|_| ModelError::Domain("singular unmixing matrix".into()))?;
        let w_inv_t = lu.inverse().t().to_owned();
        let n = self.x.nrows() as f64;
        let scale = n / batch.len() as f64;
        // The -log|det W| term is identical for every datum, so subsampling
        // leaves it exact.
        let grad = -n * &w_inv_t + &(scale * &self.source_terms(&w, Some(batch)))
            + &(w.to_owned() / self.prior_variance);
        Ok(Array1::from_iter(grad.iter().copied()))
    }

    fn precondition_gradient(
        &self,
        theta: ArrayView1<f64>,
        grad: Array1<f64>,
    ) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        natural_gradient(theta, grad.view())
    }
}

/// Natural-gradient preconditioning for the unmixing-matrix manifold:
/// reshape the flattened gradient G and return G W' W, flattened.
pub fn natural_gradient(
    w_flat: ArrayView1<f64>,
    raw_grad: ArrayView1<f64>,
) -> Result<Array1<f64>, ModelError> {
    let d2 = w_flat.len();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 || raw_grad.len() != d2 {
        return Err(ModelError::InvalidArgument(
            "natural gradient needs a flattened square matrix".into(),
        ));
    }
    let w = Array2::from_shape_vec((d, d), w_flat.to_vec()).unwrap();
    if linalg::lu_decompose(w.view()).is_err() {
        return Err(ModelError::Domain("singular unmixing matrix".into()));
    }
    let g = Array2::from_shape_vec((d, d), raw_grad.to_vec()).unwrap();
    let out = g.dot(&w.t().dot(&w));
    Ok(Array1::from_iter(out.iter().copied()))
}

/// Convenience view of a flattened parameter vector as a d x d matrix.
pub fn as_matrix(theta: ArrayView1<f64>, d: usize) -> ArrayView2<f64> {
    theta.into_shape_with_order((d, d)).unwrap()
}
