//! Samplers: the leapfrog integrator, plain HMC, the surrogate-driven chain,
//! and the stochastic gradient Langevin dynamics baseline.

mod adapt;
mod hmc;
mod leapfrog;
mod sgld;
mod trace;
mod vhmc;

pub use adapt::StepSizeAdapter;
pub use hmc::{draw_momentum, hmc_step, run_hmc, HmcConfig, HmcRun, SamplerError, StepOutcome};
pub use leapfrog::{leapfrog, Divergence};
pub use sgld::{sgld_run, SgldConfig, StepSchedule};
pub use trace::Trace;
pub use vhmc::{vhmc_run, VhmcConfig, VhmcOutput};
