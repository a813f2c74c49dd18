//! Central finite differences. Used for the Laplace Hessian and as the
//! independent oracle the gradient tests check analytic derivatives against.

use ndarray::{Array1, Array2, ArrayView1};

/// Per-coordinate step h_i = rel_step * (1 + |theta_i|).
pub fn steps(theta: ArrayView1<f64>, rel_step: f64) -> Array1<f64> {
    theta.mapv(|t| rel_step * (1.0 + t.abs()))
}

/// Central-difference gradient of a scalar function.
pub fn central_grad<F>(mut f: F, theta: ArrayView1<f64>, rel_step: f64) -> Array1<f64>
where
    F: FnMut(ArrayView1<f64>) -> f64,
{
    let h = steps(theta, rel_step);
    let mut g = Array1::<f64>::zeros(theta.len());
    let mut work = theta.to_owned();
    for i in 0..theta.len() {
        let orig = work[i];
        work[i] = orig + h[i];
        let fp = f(work.view());
        work[i] = orig - h[i];
        let fm = f(work.view());
        work[i] = orig;
        g[i] = (fp - fm) / (2.0 * h[i]);
    }
    g
}

/// Central-difference Jacobian of a vector function; row r holds
/// d out_r / d theta_c in column c.
pub fn central_jacobian<F>(mut f: F, theta: ArrayView1<f64>, rel_step: f64) -> Array2<f64>
where
    F: FnMut(ArrayView1<f64>) -> Array1<f64>,
{
    let h = steps(theta, rel_step);
    let mut work = theta.to_owned();
    let out_dim = f(theta).len();
    let mut jac = Array2::<f64>::zeros((out_dim, theta.len()));
    for c in 0..theta.len() {
        let orig = work[c];
        work[c] = orig + h[c];
        let fp = f(work.view());
        work[c] = orig - h[c];
        let fm = f(work.view());
        work[c] = orig;
        for r in 0..out_dim {
            jac[[r, c]] = (fp[r] - fm[r]) / (2.0 * h[c]);
        }
    }
    jac
}

/// Relative error between an analytic gradient and its finite-difference
/// estimate, measured in norm.
pub fn grad_rel_error(analytic: ArrayView1<f64>, fd: ArrayView1<f64>) -> f64 {
    let diff = (&analytic.to_owned() - &fd.to_owned()).mapv(f64::abs);
    let num = diff.iter().fold(0.0f64, |a, b| a.max(*b));
    let den = analytic
        .iter()
        .fold(0.0f64, |a, b| a.max(b.abs()))
        .max(1.0);
    num / den
}
