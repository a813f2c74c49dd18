//! Chi-square goodness of fit of a sample against given bin probabilities,
//! used to check stationarity of a chain against its quadrature-normalized
//! target density.

use super::DiagnosticsError;
use ndarray::ArrayView1;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins_used: usize,
}

/// Bin `samples` by `edges` (len = bins + 1, strictly increasing) and test
/// the counts against `probs` (bin probabilities summing to ~1). Samples
/// outside the edge range land in the first/last bin.
pub fn chi_square_gof(
    samples: &[f64],
    edges: &[f64],
    probs: ArrayView1<f64>,
) -> Result<GofResult, DiagnosticsError> {
    let bins = edges.len().saturating_sub(1);
    if bins < 2 || probs.len() != bins {
        return Err(DiagnosticsError::Shape(format!(
            "{} edges vs {} probabilities",
            edges.len(),
            probs.len()
        )));
    }
    let n = samples.len();
    if n < 10 * bins {
        return Err(DiagnosticsError::TooShort { got: n, need: 10 * bins });
    }
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let mut idx = match edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if idx >= bins {
            idx = bins - 1;
        }
        counts[idx] += 1;
    }
    let mut stat = 0.0;
    let mut used = 0usize;
    for b in 0..bins {
        let expected = probs[b] * n as f64;
        if expected < 5.0 {
            // tiny-expectation bins destabilize the statistic; fold them out
            continue;
        }
        used += 1;
        let diff = counts[b] as f64 - expected;
        stat += diff * diff / expected;
    }
    if used < 2 {
        return Err(DiagnosticsError::Shape("too few usable bins".into()));
    }
    let dof = used - 1;
    let dist = ChiSquared::new(dof as f64).expect("dof >= 1");
    let p_value = 1.0 - dist.cdf(stat);
    Ok(GofResult { statistic: stat, dof, p_value, bins_used: used })
}
