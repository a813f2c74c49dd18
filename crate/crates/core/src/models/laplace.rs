//! MAP search and the Laplace approximation: the quadratic expansion of the
//! potential at its minimum, used both to regularize the early sampling phase
//! and to whiten surrogate inputs.

use super::{ModelError, Potential};
use crate::linalg::{self, LinalgError};
use crate::numdiff;
use ndarray::{Array1, Array2, ArrayView1};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error(
        "MAP search stopped after {iters} iterations with gradient norm {grad_norm:e} > tol {tol:e}"
    )]
    NoConvergence {
        iters: usize,
        grad_norm: f64,
        tol: f64,
        /// Best iterate seen, so callers can inspect or restart.
        best: Array1<f64>,
    },
    #[error("line search could not find a decrease step at iteration {iter}")]
    LineSearchFailed { iter: usize, best: Array1<f64> },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// MAP point with curvature. `hessian` is the finite-difference Hessian of
/// the potential at `theta_map`, symmetrized and jittered until positive
/// definite; `chol` is its lower Cholesky factor.
#[derive(Debug, Clone)]
pub struct LaplaceApprox {
    pub theta_map: Array1<f64>,
    pub hessian: Array2<f64>,
    pub chol: Array2<f64>,
    pub jitter: f64,
    pub grad_norm: f64,
}

impl LaplaceApprox {
    /// Build from a precomputed (possibly indefinite) Hessian: symmetrize,
    /// then add delta*I with delta doubling from 1e-8 * trace/dim until the
    /// Cholesky factorization succeeds.
    pub fn from_hessian(
        theta_map: Array1<f64>,
        hessian: Array2<f64>,
        grad_norm: f64,
    ) -> Result<Self, LinalgError> {
        let mut h = hessian;
        linalg::symmetrize(&mut h);
        let (chol, jitter, h) = jittered_cholesky(h)?;
        Ok(LaplaceApprox {
            theta_map,
            hessian: h,
            chol,
            jitter,
            grad_norm,
        })
    }

    /// Unit Gaussian placeholder: theta_map = 0, H = I. Handy wherever a
    /// whitening transform is required but no model has been fit.
    pub fn identity(dim: usize) -> Self {
        LaplaceApprox {
            theta_map: Array1::zeros(dim),
            hessian: Array2::eye(dim),
            chol: Array2::eye(dim),
            jitter: 0.0,
            grad_norm: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta_map.len()
    }

    /// Whitened coordinates: solve L w = theta - theta_map.
    pub fn whiten(&self, theta: ArrayView1<f64>) -> Array1<f64> {
        let diff = &theta.to_owned() - &self.theta_map;
        linalg::solve_lower(self.chol.view(), diff.view())
    }

    /// Quadratic form 0.5 (theta - theta_map)' H (theta - theta_map).
    pub fn quadratic(&self, theta: ArrayView1<f64>) -> f64 {
        let w = self.whiten(theta);
        0.5 * w.dot(&w)
    }

    /// Gradient of the quadratic form: H (theta - theta_map).
    pub fn quadratic_grad(&self, theta: ArrayView1<f64>) -> Array1<f64> {
        let diff = &theta.to_owned() - &self.theta_map;
        self.hessian.dot(&diff)
    }
}

/// Add delta*I, doubling delta from 1e-8 * trace/dim, until Cholesky
/// succeeds. Returns (L, delta used, jittered matrix).
pub fn jittered_cholesky(h: Array2<f64>) -> Result<(Array2<f64>, f64, Array2<f64>), LinalgError> {
    if let Ok(l) = linalg::cholesky_lower(h.view()) {
        return Ok((l, 0.0, h));
    }
    let n = h.nrows();
    let trace: f64 = (0..n).map(|i| h[[i, i]]).sum();
    let base = (1e-8 * trace / n as f64).abs().max(1e-12);
    let mut delta = base;
    for _ in 0..64 {
        let mut jittered = h.clone();
        for i in 0..n {
            jittered[[i, i]] += delta;
        }
        if let Ok(l) = linalg::cholesky_lower(jittered.view()) {
            return Ok((l, delta, jittered));
        }
        delta *= 2.0;
    }
    Err(LinalgError::NotPositiveDefinite { index: 0, pivot: f64::NAN })
}

#[derive(Debug, Clone)]
pub struct MapOptions {
    pub tol: Option<f64>,
    pub max_iters: usize,
    /// Relative step for the finite-difference Hessian.
    pub hessian_step: f64,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { tol: None, max_iters: 50_000, hessian_step: 1e-5 }
    }
}

struct MapStats {
    grad_evals: usize,
    pot_evals: usize,
}

/// Gradient descent with backtracking line search (sufficient-decrease 1e-4,
/// shrink 0.5), followed by a finite-difference Hessian of the analytic
/// gradient. Default tolerance is 1e-6 * dim on the gradient norm.
pub fn find_map<P: Potential>(
    model: &P,
    init: ArrayView1<f64>,
    opts: &MapOptions,
) -> Result<LaplaceApprox, MapError> {
    let tol = opts.tol.unwrap_or(1e-6 * model.dim() as f64);
    let mut stats = MapStats { grad_evals: 0, pot_evals: 0 };
    let theta = descend(model, init, tol, opts.max_iters, &mut stats)?;
    let grad_norm = norm(&model.grad_potential(theta.view())?);
    let hessian = fd_hessian(model, theta.view(), opts.hessian_step)?;
    let _ = (stats.grad_evals, stats.pot_evals);
    Ok(LaplaceApprox::from_hessian(theta, hessian, grad_norm)?)
}

fn descend<P: Potential>(
    model: &P,
    init: ArrayView1<f64>,
    tol: f64,
    max_iters: usize,
    stats: &mut MapStats,
) -> Result<Array1<f64>, MapError> {
    const ARMIJO: f64 = 1e-4;
    const SHRINK: f64 = 0.5;
    let mut theta = init.to_owned();
    let mut value = model.potential(theta.view())?;
    stats.pot_evals += 1;
    let mut step = 1.0f64;
    let mut best = theta.clone();
    let mut best_grad = f64::INFINITY;

    for iter in 0..max_iters {
        let grad = model.grad_potential(theta.view())?;
        stats.grad_evals += 1;
        let gnorm = norm(&grad);
        if gnorm < best_grad {
            best_grad = gnorm;
            best = theta.clone();
        }
        if gnorm <= tol {
            return Ok(theta);
        }
        let g2 = grad.dot(&grad);
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &theta - &(alpha * &grad);
            match model.potential(candidate.view()) {
                Ok(v) if v.is_finite() && v <= value - ARMIJO * alpha * g2 => {
                    stats.pot_evals += 1;
                    theta = candidate;
                    value = v;
                    accepted = true;
                    break;
                }
                _ => {
                    stats.pot_evals += 1;
                    alpha *= SHRINK;
                }
            }
        }
        if !accepted {
            return Err(MapError::LineSearchFailed { iter, best });
        }
        // Let the step grow back so the search is not stuck at a scale set
        // by one bad region.
        step = (alpha * 2.0).min(1e6);
    }
    Err(MapError::NoConvergence { iters: max_iters, grad_norm: best_grad, tol, best })
}

/// Central finite differences of the analytic gradient, with per-coordinate
/// step h_i = rel_step * (1 + |theta_i|), symmetrized.
pub(crate) fn fd_hessian<P: Potential>(
    model: &P,
    theta: ArrayView1<f64>,
    rel_step: f64,
) -> Result<Array2<f64>, ModelError> {
    let mut err = None;
    let mut h = numdiff::central_jacobian(
        |t| match model.grad_potential(t) {
            Ok(g) => g,
            Err(e) => {
                err = Some(e);
                Array1::zeros(theta.len())
            }
        },
        theta,
        rel_step,
    );
    if let Some(e) = err {
        return Err(e);
    }
    linalg::symmetrize(&mut h);
    Ok(h)
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GaussianTarget;
    use ndarray::array;

    #[test]
    fn gaussian_map_is_mean_with_identity_hessian() {
        let model = GaussianTarget::standard(3);
        let lap = find_map(&model, array![2.0, -1.0, 0.5].view(), &MapOptions::default()).unwrap();
        assert!(lap.grad_norm <= 1e-6 * 3.0);
        for i in 0..3 {
            assert!(lap.theta_map[i].abs() < 1e-6);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((lap.hessian[[i, j]] - want).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn indefinite_hessian_gets_jittered() {
        let h = array![[1.0, 0.0], [0.0, -0.5]];
        let lap = LaplaceApprox::from_hessian(array![0.0, 0.0], h, 0.0).unwrap();
        assert!(lap.jitter > 0.5);
        // Jittered matrix admits a Cholesky factorization.
        let back = lap.chol.dot(&lap.chol.t());
        for (a, b) in back.iter().zip(lap.hessian.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn whiten_cancels_shift_at_map_point() {
        let h = array![[2.0, 0.3], [0.3, 1.0]];
        let lap = LaplaceApprox::from_hessian(array![1.5, -0.5], h, 0.0).unwrap();
        let w = lap.whiten(array![1.5, -0.5].view());
        assert!(w.iter().all(|v| v.abs() < 1e-14));
    }
}
