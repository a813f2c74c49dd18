//! Bayesian sampling with a surrogate-accelerated Hamiltonian Monte Carlo
//! kernel.
//!
//! The sampler family implemented here drives Hamiltonian dynamics with a
//! cheap random-feature network fitted online to the gradient of the target
//! potential (score matching), blending in a Laplace quadratic while the fit
//! is still cold. Plain HMC and stochastic gradient Langevin dynamics are
//! included as baselines, together with the diagnostics used to compare them
//! (effective sample size, relative moment errors, grid divergences, Amari
//! distance).

pub mod data;
pub mod diagnostics;
pub mod linalg;
pub mod models;
pub mod numdiff;
pub mod samplers;
pub mod surrogate;

pub use models::{Potential, TargetModel};
