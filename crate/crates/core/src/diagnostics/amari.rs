//! Amari distance between unmixing matrices: zero exactly when one is a
//! scaled row permutation of the other, matching the symmetry of the ICA
//! likelihood. With R = W_bar W0^-1,
//!
//!   d_A = 1/(2d) [ sum_i (sum_j |R_ij| / max_j |R_ij| - 1)
//!                + sum_j (sum_i |R_ij| / max_i |R_ij| - 1) ]

use super::DiagnosticsError;
use crate::linalg;
use ndarray::ArrayView2;

pub fn amari_distance(
    w_bar: ArrayView2<f64>,
    w0: ArrayView2<f64>,
) -> Result<f64, DiagnosticsError> {
    let d = w0.nrows();
    if w0.ncols() != d || w_bar.dim() != (d, d) {
        return Err(DiagnosticsError::Shape(format!(
            "expected matching square matrices, got {:?} and {:?}",
            w_bar.dim(),
            w0.dim()
        )));
    }
    let lu = linalg::lu_decompose(w0).map_err(|_| DiagnosticsError::SingularReference)?;
    let r = w_bar.dot(&lu.inverse());

    let mut total = 0.0;
    for i in 0..d {
        let row = r.row(i);
        let max = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max == 0.0 {
            return Err(DiagnosticsError::SingularReference);
        }
        total += row.iter().map(|x| x.abs()).sum::<f64>() / max - 1.0;
    }
    for j in 0..d {
        let col = r.column(j);
        let max = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max == 0.0 {
            return Err(DiagnosticsError::SingularReference);
        }
        total += col.iter().map(|x| x.abs()).sum::<f64>() / max - 1.0;
    }
    Ok(total / (2.0 * d as f64))
}
