//! Hamiltonian Monte Carlo with identity mass matrix: momentum resampled
//! every iteration, leapfrog proposal, Metropolis-Hastings correction with
//! rho = exp(H(theta, r) - H(theta*, r*)).

use super::adapt::StepSizeAdapter;
use super::leapfrog::leapfrog;
use super::trace::Trace;
use crate::models::{ModelError, Potential};
use ndarray::{Array1, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("model evaluation failed at the current state: {0}")]
    Model(#[from] ModelError),
    #[error("invalid sampler configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone)]
pub struct HmcConfig {
    /// Leapfrog stepsize.
    pub epsilon: f64,
    /// Leapfrog steps per proposal.
    pub leapfrog_steps: usize,
    /// Steps considered warmup; stepsize adaptation only runs here.
    pub warmup: usize,
    pub target_accept: f64,
    pub adapt: bool,
    pub adapt_window: usize,
    /// |Delta H| beyond this is treated as a divergence and auto-rejected.
    pub divergence_threshold: f64,
}

impl Default for HmcConfig {
    fn default() -> Self {
        HmcConfig {
            epsilon: 0.1,
            leapfrog_steps: 10,
            warmup: 0,
            target_accept: 0.8,
            adapt: false,
            adapt_window: 50,
            divergence_threshold: 1000.0,
        }
    }
}

impl HmcConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.epsilon > 0.0) {
            return Err(SamplerError::Config(format!("epsilon = {} not positive", self.epsilon)));
        }
        if self.leapfrog_steps == 0 {
            return Err(SamplerError::Config("leapfrog_steps must be >= 1".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(SamplerError::Config(format!(
                "target_accept = {} outside (0,1)",
                self.target_accept
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub theta: Array1<f64>,
    pub accepted: bool,
    pub delta_h: f64,
    pub diverged: bool,
    /// Gradient evaluations spent on the trajectory (L + 1, or fewer on
    /// divergence).
    pub grad_evals: u64,
}

/// One transition of the chain. Draws exactly dim + 1 random values
/// (momentum, then the MH uniform) regardless of acceptance or divergence,
/// so chains driven by the same RNG stream stay aligned.
pub fn hmc_step<P: Potential, R: Rng>(
    target: &P,
    theta: ArrayView1<f64>,
    epsilon: f64,
    leapfrog_steps: usize,
    divergence_threshold: f64,
    rng: &mut R,
) -> Result<StepOutcome, SamplerError> {
    let dim = target.dim();
    let r0 = draw_momentum(rng, dim);
    let u: f64 = rng.random();

    let h0 = target.potential(theta)? + 0.5 * r0.dot(&r0);
    if !h0.is_finite() {
        return Err(SamplerError::Model(ModelError::Domain(
            "non-finite Hamiltonian at the current state".into(),
        )));
    }

    let mut grad_evals = 0u64;
    let mut grad = |t: ArrayView1<f64>| {
        grad_evals += 1;
        target.grad_potential(t).ok()
    };
    let proposal = leapfrog(&mut grad, theta, r0.view(), epsilon, leapfrog_steps);

    let (accepted, delta_h, diverged, theta_next) = match proposal {
        Ok((theta_star, r_star)) => match target.potential(theta_star.view()) {
            Ok(u_star) if u_star.is_finite() => {
                let h1 = u_star + 0.5 * r_star.dot(&r_star);
                let dh = h1 - h0;
                if !dh.is_finite() || dh.abs() > divergence_threshold {
                    (false, dh, true, theta.to_owned())
                } else if u < (-dh).exp().min(1.0) {
                    (true, dh, false, theta_star)
                } else {
                    (false, dh, false, theta.to_owned())
                }
            }
            _ => (false, f64::INFINITY, true, theta.to_owned()),
        },
        Err(_) => (false, f64::INFINITY, true, theta.to_owned()),
    };

    Ok(StepOutcome { theta: theta_next, accepted, delta_h, diverged, grad_evals })
}

pub fn draw_momentum<R: Rng>(rng: &mut R, dim: usize) -> Array1<f64> {
    Array1::from_shape_fn(dim, |_| rng.sample::<f64, _>(StandardNormal))
}

#[derive(Debug)]
pub struct HmcRun {
    pub trace: Trace,
    /// Stepsize after warmup adaptation.
    pub epsilon: f64,
}

/// Run the chain for `steps` transitions (including `cfg.warmup`).
pub fn run_hmc<P: Potential, R: Rng>(
    target: &P,
    cfg: &HmcConfig,
    theta0: Array1<f64>,
    rng: &mut R,
    steps: usize,
) -> Result<HmcRun, SamplerError> {
    cfg.validate()?;
    let mut theta = theta0;
    let mut epsilon = cfg.epsilon;
    let mut adapter = StepSizeAdapter::new(cfg.target_accept, cfg.adapt_window);
    let mut trace = Trace::with_capacity(target.dim(), steps);
    let mut grad_total = 0u64;

    for t in 1..=steps {
        let started = Instant::now();
        let out = hmc_step(
            target,
            theta.view(),
            epsilon,
            cfg.leapfrog_steps,
            cfg.divergence_threshold,
            rng,
        )?;
        theta = out.theta;
        grad_total += out.grad_evals;
        if cfg.adapt && t <= cfg.warmup {
            if let Some(mult) = adapter.observe(out.accepted) {
                epsilon *= mult;
            }
        }
        trace.push(
            theta.view(),
            out.accepted,
            out.delta_h,
            grad_total,
            started.elapsed().as_secs_f64() * 1e3,
        );
    }
    Ok(HmcRun { trace, epsilon })
}
