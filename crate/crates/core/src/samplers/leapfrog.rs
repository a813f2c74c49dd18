//! Leapfrog integration of Hamiltonian dynamics with identity mass matrix:
//! half momentum kick, position drift, half kick, composed over L steps.
//! Symmetric and symplectic, hence reversible and volume preserving.

use ndarray::{Array1, ArrayView1};

/// Integration failed: a gradient evaluation left the model domain or the
/// state stopped being finite. The proposal is treated as rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence;

/// Run `steps` leapfrog steps of size `epsilon` from (theta, r). The
/// gradient closure returns `None` for out-of-domain points.
pub fn leapfrog<F>(
    grad: &mut F,
    theta: ArrayView1<f64>,
    r: ArrayView1<f64>,
    epsilon: f64,
    steps: usize,
) -> Result<(Array1<f64>, Array1<f64>), Divergence>
where
    F: FnMut(ArrayView1<f64>) -> Option<Array1<f64>>,
{
    assert!(epsilon > 0.0, "leapfrog stepsize must be positive");
    assert!(steps >= 1, "need at least one leapfrog step");
    let mut theta = theta.to_owned();
    let mut r = r.to_owned();

    let g = eval(grad, &theta)?;
    r.scaled_add(-0.5 * epsilon, &g);
    for l in 1..=steps {
        theta.scaled_add(epsilon, &r);
        if !finite(&theta) {
            return Err(Divergence);
        }
        let g = eval(grad, &theta)?;
        let kick = if l == steps { 0.5 * epsilon } else { epsilon };
        r.scaled_add(-kick, &g);
        if !finite(&r) {
            return Err(Divergence);
        }
    }
    Ok((theta, r))
}

fn eval<F>(grad: &mut F, theta: &Array1<f64>) -> Result<Array1<f64>, Divergence>
where
    F: FnMut(ArrayView1<f64>) -> Option<Array1<f64>>,
{
    match grad(theta.view()) {
        Some(g) if finite(&g) => Ok(g),
        _ => Err(Divergence),
    }
}

fn finite(v: &Array1<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}
