//! Score-matching trainers for the output weights: the recursive
//! least-squares update applied one (theta, grad U) pair at a time, and the
//! batch ridge solve it must agree with.
//!
//! State is the running estimator v and the inverse regularized Gram matrix
//! C = (sum_n A(theta_n)' A(theta_n) + lambda I)^-1, updated by the
//! Sherman-Morrison-Woodbury identity at O(d^3 + d s^2) per point with
//! O(s^2) storage independent of the number of points seen.

use super::basis::RandomBasis;
use crate::linalg::{self, LinalgError};
use ndarray::{Array1, Array2, ArrayView1};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("ridge coefficient must be positive, got {0}")]
    BadLambda(f64),
    #[error("update system became numerically singular: {0}")]
    Linalg(#[from] LinalgError),
    #[error("gradient has {got} entries, basis input dimension is {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite training gradient")]
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct TrainerState {
    v: Array1<f64>,
    c: Array2<f64>,
    lambda: f64,
    t: u64,
    recent_rel_change: VecDeque<f64>,
    window: usize,
}

impl TrainerState {
    /// v = 0, C = (1/lambda) I.
    pub fn init(s: usize, lambda: f64) -> Result<Self, TrainError> {
        if !(lambda > 0.0) {
            return Err(TrainError::BadLambda(lambda));
        }
        Ok(TrainerState {
            v: Array1::zeros(s),
            c: Array2::eye(s) / lambda,
            lambda,
            t: 0,
            recent_rel_change: VecDeque::new(),
            window: 100,
        })
    }

    /// Default ridge coefficient 1e-4 * s: keeps the first updates
    /// well-conditioned without visibly biasing the converged fit.
    pub fn default_lambda(s: usize) -> f64 {
        1e-4 * s as f64
    }

    pub fn weights(&self) -> ArrayView1<f64> {
        self.v.view()
    }

    pub fn inverse_gram(&self) -> &Array2<f64> {
        &self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn count(&self) -> u64 {
        self.t
    }

    /// Fold in one observed pair (theta, grad U(theta)):
    ///   W = C A' [I_d + A C A']^-1
    ///   v <- v + W (grad U - A v)
    ///   C <- C - W A C, symmetrized.
    pub fn update(
        &mut self,
        basis: &RandomBasis,
        theta: ArrayView1<f64>,
        grad_u: ArrayView1<f64>,
    ) -> Result<(), TrainError> {
        let d = basis.dim();
        if grad_u.len() != d || theta.len() != d {
            return Err(TrainError::Dimension { expected: d, got: grad_u.len() });
        }
        if grad_u.iter().any(|g| !g.is_finite()) {
            return Err(TrainError::NonFinite);
        }
        let a = basis.feature_jacobian(theta); // d x s
        let ac = a.dot(&self.c); // d x s
        let mut gram = ac.dot(&a.t()); // d x d
        for i in 0..d {
            gram[[i, i]] += 1.0;
        }
        let l = linalg::cholesky_lower(gram.view())?;
        // X = [I + A C A']^-1 (A C), W = X'
        let mut x = Array2::<f64>::zeros((d, self.v.len()));
        for (j, col) in ac.columns().into_iter().enumerate() {
            x.column_mut(j).assign(&linalg::cholesky_solve(l.view(), col));
        }
        let residual = &grad_u.to_owned() - &a.dot(&self.v);
        let delta = x.t().dot(&residual);
        self.v += &delta;
        self.c -= &x.t().dot(&ac);
        linalg::symmetrize(&mut self.c);
        self.t += 1;

        let rel = norm(&delta) / norm(&self.v).max(1e-12);
        if self.recent_rel_change.len() == self.window {
            self.recent_rel_change.pop_front();
        }
        self.recent_rel_change.push_back(rel);
        Ok(())
    }

    /// True once the trailing-window relative change in v has dropped below
    /// tol for a full window of updates.
    pub fn converged(&self, tol: f64) -> bool {
        self.recent_rel_change.len() == self.window
            && self.recent_rel_change.iter().all(|&r| r < tol)
    }
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

/// Direct ridge solution over a batch of training pairs:
/// v = argmin 1/2 sum ||A(theta_n) v - grad U(theta_n)||^2 + lambda/2 ||v||^2
/// by Cholesky on the s x s normal equations.
pub fn batch_solve(
    points: &[(Array1<f64>, Array1<f64>)],
    basis: &RandomBasis,
    lambda: f64,
) -> Result<Array1<f64>, TrainError> {
    if !(lambda > 0.0) {
        return Err(TrainError::BadLambda(lambda));
    }
    let s = basis.len();
    let mut gram = Array2::<f64>::zeros((s, s));
    let mut rhs = Array1::<f64>::zeros(s);
    for (theta, grad_u) in points {
        let a = basis.feature_jacobian(theta.view());
        gram += &a.t().dot(&a);
        rhs += &a.t().dot(grad_u);
    }
    for i in 0..s {
        gram[[i, i]] += lambda;
    }
    let l = linalg::cholesky_lower(gram.view())?;
    Ok(linalg::cholesky_solve(l.view(), rhs.view()))
}

/// Regularized Gram inverse (sum A'A + lambda I)^-1 for the same batch;
/// the quantity the online C must track.
pub fn batch_inverse_gram(
    points: &[(Array1<f64>, Array1<f64>)],
    basis: &RandomBasis,
    lambda: f64,
) -> Result<Array2<f64>, TrainError> {
    let s = basis.len();
    let mut gram = Array2::<f64>::zeros((s, s));
    for (theta, _) in points {
        let a = basis.feature_jacobian(theta.view());
        gram += &a.t().dot(&a);
    }
    for i in 0..s {
        gram[[i, i]] += lambda;
    }
    Ok(linalg::spd_inverse(gram.view())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LaplaceApprox;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_points(
        n: usize,
        dim: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<(Array1<f64>, Array1<f64>)> {
        (0..n)
            .map(|_| {
                (
                    Array1::from_shape_fn(dim, |_| 2.0 * rng.sample::<f64, _>(StandardNormal)),
                    Array1::from_shape_fn(dim, |_| rng.sample::<f64, _>(StandardNormal)),
                )
            })
            .collect()
    }

    #[test]
    fn init_matches_spec() {
        let st = TrainerState::init(3, 1.0).unwrap();
        assert_eq!(st.inverse_gram(), &Array2::eye(3));
        assert!(st.weights().iter().all(|&v| v == 0.0));
        let st = TrainerState::init(2, 10.0).unwrap();
        assert!((st.inverse_gram()[[0, 0]] - 0.1).abs() < 1e-15);
        assert!(TrainerState::init(2, 0.0).is_err());
        assert!(TrainerState::init(2, -1.0).is_err());
    }

    #[test]
    fn first_update_has_closed_form() {
        let lap = LaplaceApprox::identity(2);
        let basis = RandomBasis::sample(4, 2, &lap, 8);
        let lambda = 0.7;
        let mut st = TrainerState::init(4, lambda).unwrap();
        let theta = array![0.3, -0.5];
        let g = array![1.0, 2.0];
        st.update(&basis, theta.view(), g.view()).unwrap();

        // v1 = (1/lambda) A' [I + (1/lambda) A A']^-1 g
        let a = basis.feature_jacobian(theta.view());
        let mut m = a.dot(&a.t()) / lambda;
        for i in 0..2 {
            m[[i, i]] += 1.0;
        }
        let sol = linalg::spd_solve(m.view(), g.view()).unwrap();
        let want = a.t().dot(&sol) / lambda;
        for (x, y) in st.weights().iter().zip(want.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_residual_update_leaves_weights_unchanged() {
        let lap = LaplaceApprox::identity(2);
        let basis = RandomBasis::sample(5, 2, &lap, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut st = TrainerState::init(5, 0.5).unwrap();
        for (theta, g) in random_points(3, 2, &mut rng) {
            st.update(&basis, theta.view(), g.view()).unwrap();
        }
        let v_before = st.weights().to_owned();
        let theta = array![0.9, 0.1];
        let g = basis.feature_jacobian(theta.view()).dot(&v_before);
        st.update(&basis, theta.view(), g.view()).unwrap();
        for (a, b) in st.weights().iter().zip(v_before.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn online_matches_batch_solution_and_inverse_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..5 {
            let dim = 1 + (trial % 3);
            let s = 8 + 3 * trial;
            let lap = LaplaceApprox::identity(dim);
            let basis = RandomBasis::sample(s, dim, &lap, 100 + trial as u64);
            let lambda = TrainerState::default_lambda(s);
            let points = random_points(60, dim, &mut rng);

            let mut st = TrainerState::init(s, lambda).unwrap();
            for (theta, g) in &points {
                st.update(&basis, theta.view(), g.view()).unwrap();
            }
            let vb = batch_solve(&points, &basis, lambda).unwrap();
            let cb = batch_inverse_gram(&points, &basis, lambda).unwrap();
            let dv = st
                .weights()
                .iter()
                .zip(vb.iter())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let dc = st
                .inverse_gram()
                .iter()
                .zip(cb.iter())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(dv <= 1e-8, "weight drift {}", dv);
            assert!(dc <= 1e-8, "inverse-gram drift {}", dc);
        }
    }

    #[test]
    fn batch_solution_is_permutation_invariant() {
        let lap = LaplaceApprox::identity(2);
        let basis = RandomBasis::sample(10, 2, &lap, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut points = random_points(40, 2, &mut rng);
        let v1 = batch_solve(&points, &basis, 0.01).unwrap();
        points.reverse();
        points.swap(0, 17);
        let v2 = batch_solve(&points, &basis, 0.01).unwrap();
        for (a, b) in v1.iter().zip(v2.iter()) {
            assert!((a - b).abs() <= 1e-10);
        }

        // online updates land on the same solution in any order
        let mut st = TrainerState::init(10, 0.01).unwrap();
        for (theta, g) in &points {
            st.update(&basis, theta.view(), g.view()).unwrap();
        }
        for (a, b) in st.weights().iter().zip(v1.iter()) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn scalar_basis_has_closed_form() {
        let basis = RandomBasis::from_parts(
            array![[1.0]],
            array![0.3],
            LaplaceApprox::identity(1),
        );
        let theta = array![0.7];
        let g = array![2.0];
        let lambda = 0.2;
        let v = batch_solve(&[(theta.clone(), g.clone())], &basis, lambda).unwrap();
        let a = basis.feature_jacobian(theta.view())[[0, 0]];
        let want = a * 2.0 / (a * a + lambda);
        assert!((v[0] - want).abs() < 1e-14);
    }

    #[test]
    fn large_ridge_shrinks_weights_monotonically() {
        let lap = LaplaceApprox::identity(2);
        let basis = RandomBasis::sample(6, 2, &lap, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let points = random_points(30, 2, &mut rng);
        let mut last = f64::INFINITY;
        for lambda in [1e-3, 1e-1, 10.0, 1e3, 1e5] {
            let v = batch_solve(&points, &basis, lambda).unwrap();
            let n = v.dot(&v).sqrt();
            assert!(n < last, "||v|| should shrink as lambda grows");
            last = n;
        }
        assert!(last < 1e-3);
    }
}
