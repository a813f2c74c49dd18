//! Running relative errors of the sample mean and covariance against
//! reference moments, plus the RMSE-to-truth summary.
//!
//! With beta_bar_t and C_t the running mean and covariance (1/t
//! normalization) up to time t:
//!
//!   REM_t = sum_i |beta_bar_i^t - beta_i| / sum_i |beta_i|
//!   REC_t = sum_ij |C_ij^t - C_ij| / sum_ij |C_ij|

use super::DiagnosticsError;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Reference quantities a run is scored against, with a provenance note
/// (how they were produced: run length, seed, or "generating parameter").
#[derive(Debug, Clone)]
pub enum GroundTruth {
    /// Long-run reference mean and covariance.
    Moments { mean: Array1<f64>, cov: Array2<f64>, provenance: String },
    /// True generating parameter (synthetic data).
    Parameter { beta: Array1<f64>, provenance: String },
    /// Reference unmixing matrix.
    Unmixing { w0: Array2<f64>, provenance: String },
}

impl GroundTruth {
    pub fn provenance(&self) -> &str {
        match self {
            GroundTruth::Moments { provenance, .. }
            | GroundTruth::Parameter { provenance, .. }
            | GroundTruth::Unmixing { provenance, .. } => provenance,
        }
    }
}

/// Running REM_t and REC_t for every prefix of the chain.
pub fn rem_rec_series(
    samples: ArrayView2<f64>,
    ref_mean: ArrayView1<f64>,
    ref_cov: ArrayView2<f64>,
) -> Result<(Vec<f64>, Vec<f64>), DiagnosticsError> {
    let (t_max, d) = samples.dim();
    if t_max < 1 {
        return Err(DiagnosticsError::TooShort { got: t_max, need: 1 });
    }
    if ref_mean.len() != d || ref_cov.dim() != (d, d) {
        return Err(DiagnosticsError::Shape(format!(
            "reference moments do not match dimension {}",
            d
        )));
    }
    let denom_mean: f64 = ref_mean.iter().map(|x| x.abs()).sum();
    let denom_cov: f64 = ref_cov.iter().map(|x| x.abs()).sum();
    if denom_mean == 0.0 || denom_cov == 0.0 {
        return Err(DiagnosticsError::ZeroDenominator);
    }

    let mut sum = Array1::<f64>::zeros(d);
    let mut scatter = Array2::<f64>::zeros((d, d));
    let mut rem = Vec::with_capacity(t_max);
    let mut rec = Vec::with_capacity(t_max);
    for t in 0..t_max {
        let row = samples.row(t);
        sum += &row;
        for i in 0..d {
            for j in 0..d {
                scatter[[i, j]] += row[i] * row[j];
            }
        }
        let tf = (t + 1) as f64;
        let mut num_mean = 0.0;
        for i in 0..d {
            num_mean += (sum[i] / tf - ref_mean[i]).abs();
        }
        rem.push(num_mean / denom_mean);

        let mut num_cov = 0.0;
        for i in 0..d {
            for j in 0..d {
                let c = scatter[[i, j]] / tf - (sum[i] / tf) * (sum[j] / tf);
                num_cov += (c - ref_cov[[i, j]]).abs();
            }
        }
        rec.push(num_cov / denom_cov);
    }
    Ok((rem, rec))
}

/// Root mean squared error between an estimate and the true parameter.
pub fn rmse_to_truth(
    estimate: ArrayView1<f64>,
    truth: ArrayView1<f64>,
) -> Result<f64, DiagnosticsError> {
    if estimate.len() != truth.len() {
        return Err(DiagnosticsError::Shape(format!(
            "{} vs {} entries",
            estimate.len(),
            truth.len()
        )));
    }
    let d = estimate.len() as f64;
    let ss: f64 = estimate
        .iter()
        .zip(truth.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / d).sqrt())
}
