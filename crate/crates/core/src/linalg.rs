//! Small dense linear algebra: Cholesky and LU factorizations with the
//! triangular solves the rest of the crate needs. Problem sizes here are
//! modest (dimensions up to a few dozen, feature counts up to a few
//! thousand), so straightforward loops are plenty.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky_lower(a: ArrayView2<f64>) -> Result<Array2<f64>, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::Shape(format!("{}x{} not square", n, a.ncols())));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(LinalgError::NotPositiveDefinite { index: i, pivot: sum });
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// Solve L x = b with L lower triangular (forward substitution).
pub fn solve_lower(l: ArrayView2<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = b.to_owned();
    for i in 0..n {
        let mut sum = x[i];
        for k in 0..i {
            sum -= l[[i, k]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    x
}

/// Solve L' x = b with L lower triangular (back substitution on the transpose).
pub fn solve_lower_transpose(l: ArrayView2<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = b.to_owned();
    for i in (0..n).rev() {
        let mut sum = x[i];
        for k in (i + 1)..n {
            sum -= l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    x
}

/// Solve (L L') x = b given the Cholesky factor L.
pub fn cholesky_solve(l: ArrayView2<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    let y = solve_lower(l, b);
    solve_lower_transpose(l, y.view())
}

/// Solve A x = b for symmetric positive-definite A.
pub fn spd_solve(a: ArrayView2<f64>, b: ArrayView1<f64>) -> Result<Array1<f64>, LinalgError> {
    let l = cholesky_lower(a)?;
    Ok(cholesky_solve(l.view(), b))
}

/// Solve A X = B column by column for symmetric positive-definite A.
pub fn spd_solve_mat(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<Array2<f64>, LinalgError> {
    let l = cholesky_lower(a)?;
    let mut x = Array2::<f64>::zeros(b.raw_dim());
    for (j, col) in b.columns().into_iter().enumerate() {
        x.column_mut(j).assign(&cholesky_solve(l.view(), col));
    }
    Ok(x)
}

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(a: ArrayView2<f64>) -> Result<Array2<f64>, LinalgError> {
    let n = a.nrows();
    spd_solve_mat(a, Array2::eye(n).view())
}

/// LU factorization with partial pivoting, for the small general matrices
/// (unmixing matrices, numerical Jacobians) that are not SPD.
pub struct Lu {
    lu: Array2<f64>,
    pivots: Vec<usize>,
    sign: f64,
}

pub fn lu_decompose(a: ArrayView2<f64>) -> Result<Lu, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::Shape(format!("{}x{} not square", n, a.ncols())));
    }
    let mut lu = a.to_owned();
    let mut pivots = vec![0usize; n];
    let mut sign = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut max = lu[[k, k]].abs();
        for i in (k + 1)..n {
            if lu[[i, k]].abs() > max {
                max = lu[[i, k]].abs();
                p = i;
            }
        }
        if !(max > 0.0) || !max.is_finite() {
            return Err(LinalgError::Singular);
        }
        pivots[k] = p;
        if p != k {
            for j in 0..n {
                lu.swap([k, j], [p, j]);
            }
            sign = -sign;
        }
        for i in (k + 1)..n {
            let f = lu[[i, k]] / lu[[k, k]];
            lu[[i, k]] = f;
            for j in (k + 1)..n {
                lu[[i, j]] -= f * lu[[k, j]];
            }
        }
    }
    Ok(Lu { lu, pivots, sign })
}

impl Lu {
    pub fn log_abs_det(&self) -> f64 {
        (0..self.lu.nrows()).map(|i| self.lu[[i, i]].abs().ln()).sum()
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for i in 0..self.lu.nrows() {
            d *= self.lu[[i, i]];
        }
        d
    }

    pub fn solve(&self, b: ArrayView1<f64>) -> Array1<f64> {
        let n = self.lu.nrows();
        let mut x = b.to_owned();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        for i in 0..n {
            let mut sum = x[i];
            for k in 0..i {
                sum -= self.lu[[i, k]] * x[k];
            }
            x[i] = sum;
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            for k in (i + 1)..n {
                sum -= self.lu[[i, k]] * x[k];
            }
            x[i] = sum / self.lu[[i, i]];
        }
        x
    }

    pub fn inverse(&self) -> Array2<f64> {
        let n = self.lu.nrows();
        let mut inv = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut e = Array1::<f64>::zeros(n);
            e[j] = 1.0;
            inv.column_mut(j).assign(&self.solve(e.view()));
        }
        inv
    }
}

/// Symmetrize in place: a <- (a + a') / 2.
pub fn symmetrize(a: &mut Array2<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }
}
