//! Quantitative diagnostics: effective sample size, relative moment errors
//! against reference moments, grid KL and score-matching distances, RMSE to
//! generating parameters, Amari distance, and a chi-square stationarity
//! check. All pure functions over in-memory arrays.

mod amari;
mod ess;
mod gof;
mod grid;
mod moments;

pub use amari::amari_distance;
pub use ess::{ess, mean_ess};
pub use gof::{chi_square_gof, GofResult};
pub use grid::{
    bin_probabilities, cdf_1d, equal_probability_edges, grid_kl_1d, grid_kl_2d, grid_sm_2d,
    normalize_1d, normalize_2d, Grid1d, Grid2d, Normalized1d, Normalized2d,
};
pub use moments::{rem_rec_series, rmse_to_truth, GroundTruth};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("chain too short: {got} draws, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("degenerate chain (zero variance)")]
    DegenerateChain,
    #[error("reference moments sum to zero; relative errors undefined")]
    ZeroDenominator,
    #[error(
        "boundary mass {mass:e} of {what} exceeds {limit:e}; use a wider grid"
    )]
    BoundaryMass { mass: f64, limit: f64, what: String },
    #[error("singular reference matrix")]
    SingularReference,
    #[error("shape mismatch: {0}")]
    Shape(String),
}
