//! The surrogate network itself: a frozen [`RandomBasis`] plus trainable
//! output weights. Induces the unnormalized density q_v ~ exp(-z).

use super::basis::{RandomBasis, SharedBasis};
use crate::models::{LaplaceApprox, ModelError, Potential};
use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const SURROGATE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Surrogate {
    basis: SharedBasis,
    v: Array1<f64>,
    /// Ridge coefficient and training count carried for provenance.
    pub lambda: f64,
    pub trained_points: u64,
}

impl Surrogate {
    pub fn new(basis: SharedBasis, v: Array1<f64>) -> Self {
        assert_eq!(basis.len(), v.len());
        Surrogate { basis, v, lambda: 0.0, trained_points: 0 }
    }

    pub fn zeroed(basis: SharedBasis) -> Self {
        let s = basis.len();
        Surrogate::new(basis, Array1::zeros(s))
    }

    pub fn basis(&self) -> &SharedBasis {
        &self.basis
    }

    pub fn weights(&self) -> ArrayView1<f64> {
        self.v.view()
    }

    pub fn set_weights(&mut self, v: Array1<f64>) {
        assert_eq!(v.len(), self.basis.len());
        self.v = v;
    }

    pub fn eval(&self, theta: ArrayView1<f64>) -> f64 {
        self.basis.eval(self.v.view(), theta)
    }

    pub fn grad(&self, theta: ArrayView1<f64>) -> Array1<f64> {
        self.basis.grad(self.v.view(), theta)
    }

    /// Flat record from which evaluation reconstructs bit-exactly.
    pub fn to_record(&self) -> SurrogateRecord {
        let basis = &*self.basis;
        SurrogateRecord {
            format: SURROGATE_FORMAT_VERSION,
            s: basis.len(),
            dim: basis.dim(),
            weights: basis.weights().iter().copied().collect(),
            biases: basis.biases().to_vec(),
            v: self.v.to_vec(),
            theta_map: basis.laplace().theta_map.to_vec(),
            chol: basis.laplace().chol.iter().copied().collect(),
            lambda: self.lambda,
            trained_points: self.trained_points,
        }
    }

    pub fn from_record(rec: SurrogateRecord) -> Result<Self, ModelError> {
        if rec.format != SURROGATE_FORMAT_VERSION {
            return Err(ModelError::InvalidArgument(format!(
                "unsupported surrogate format {} (expected {})",
                rec.format, SURROGATE_FORMAT_VERSION
            )));
        }
        let check = |name: &str, got: usize, want: usize| {
            if got != want {
                return Err(ModelError::InvalidArgument(format!(
                    "surrogate record field {}: {} values, expected {}",
                    name, got, want
                )));
            }
            Ok(())
        };
        check("weights", rec.weights.len(), rec.s * rec.dim)?;
        check("biases", rec.biases.len(), rec.s)?;
        check("v", rec.v.len(), rec.s)?;
        check("theta_map", rec.theta_map.len(), rec.dim)?;
        check("chol", rec.chol.len(), rec.dim * rec.dim)?;

        let weights = Array2::from_shape_vec((rec.s, rec.dim), rec.weights).unwrap();
        let chol = Array2::from_shape_vec((rec.dim, rec.dim), rec.chol).unwrap();
        let hessian = chol.dot(&chol.t());
        let laplace = LaplaceApprox {
            theta_map: Array1::from(rec.theta_map),
            hessian,
            chol,
            jitter: 0.0,
            grad_norm: 0.0,
        };
        let basis = RandomBasis::from_parts(weights, Array1::from(rec.biases), laplace);
        let mut sur = Surrogate::new(Arc::new(basis), Array1::from(rec.v));
        sur.lambda = rec.lambda;
        sur.trained_points = rec.trained_points;
        Ok(sur)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("surrogate record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        let rec: SurrogateRecord = serde_json::from_str(s)
            .map_err(|e| ModelError::InvalidArgument(format!("surrogate json: {}", e)))?;
        Surrogate::from_record(rec)
    }
}

impl Potential for Surrogate {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        Ok(self.eval(theta))
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        Ok(self.grad(theta))
    }
}

/// Serialized surrogate: everything evaluation needs, row-major matrices,
/// versioned with a format tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurrogateRecord {
    pub format: u32,
    pub s: usize,
    pub dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub v: Vec<f64>,
    pub theta_map: Vec<f64>,
    pub chol: Vec<f64>,
    pub lambda: f64,
    pub trained_points: u64,
}
