//! The surrogate-driven sampling loop.
//!
//! Each iteration proposes with leapfrog on the regularized transition
//! potential V_t and applies the Metropolis-Hastings correction under V_t
//! itself; the expensive true gradient is evaluated only when an accepted
//! state is acquired as a training point, and never after training stops.
//! After the stopping time the chain is plain HMC on the frozen surrogate.

use super::adapt::StepSizeAdapter;
use super::hmc::{hmc_step, HmcConfig, SamplerError};
use super::trace::Trace;
use crate::models::TargetModel;
use crate::surrogate::{RegularizedSurrogate, Surrogate, TrainerState};
use ndarray::Array1;
use rand::Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct VhmcConfig {
    pub hmc: HmcConfig,
    /// Transition scale n_s of mu_t = 1 - exp(-t / n_s). May be infinite,
    /// which pins the chain to the Laplace quadratic.
    pub n_s: f64,
    /// Fixed stopping time. `None` selects the automatic rule: stop once
    /// mu_t >= mu_stop and the trainer's trailing-window weight change has
    /// settled below stop_tol.
    pub t0: Option<u64>,
    pub mu_stop: f64,
    pub stop_tol: f64,
}

impl VhmcConfig {
    pub fn new(hmc: HmcConfig, n_s: f64) -> Self {
        VhmcConfig { hmc, n_s, t0: None, mu_stop: 0.99, stop_tol: 1e-3 }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        self.hmc.validate()?;
        if !(self.n_s > 0.0) {
            return Err(SamplerError::Config(format!("n_s = {} not positive", self.n_s)));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct VhmcOutput {
    pub trace: Trace,
    /// The frozen surrogate after the run.
    pub surrogate: Surrogate,
    pub trainer: TrainerState,
    /// Step at which training stopped, if it did.
    pub stopped_at: Option<u64>,
    /// Stepsize after warmup adaptation.
    pub epsilon: f64,
}

/// Run `steps` iterations. `reg` carries the surrogate and the Laplace
/// regularizer; `trainer` owns the score-matching state. The chain starts at
/// `theta0`, defaulting to the MAP point.
pub fn vhmc_run<M: TargetModel, R: Rng>(
    model: &M,
    mut trainer: TrainerState,
    mut reg: RegularizedSurrogate,
    cfg: &VhmcConfig,
    theta0: Option<Array1<f64>>,
    rng: &mut R,
    steps: usize,
) -> Result<VhmcOutput, SamplerError> {
    cfg.validate()?;
    let mut theta = theta0.unwrap_or_else(|| reg.laplace().theta_map.clone());
    let mut epsilon = cfg.hmc.epsilon;
    let mut adapter = StepSizeAdapter::new(cfg.hmc.target_accept, cfg.hmc.adapt_window);
    let mut trace = Trace::with_capacity(model.dim(), steps);
    let mut true_grad_evals = 0u64;
    let mut stopped_at: Option<u64> = None;

    if cfg.t0 == Some(0) {
        reg.freeze();
        stopped_at = Some(0);
    }

    for t in 1..=steps as u64 {
        if !reg.is_frozen() {
            let stop_now = match cfg.t0 {
                Some(t0) => t >= t0,
                None => reg.mu() >= cfg.mu_stop && trainer.converged(cfg.stop_tol),
            };
            if stop_now {
                reg.freeze();
                stopped_at = Some(t);
            } else {
                reg.set_step(t);
            }
        }

        let started = Instant::now();
        let out = hmc_step(
            &reg,
            theta.view(),
            epsilon,
            cfg.hmc.leapfrog_steps,
            cfg.hmc.divergence_threshold,
            rng,
        )?;
        theta = out.theta;

        // Acquire (theta_{t+1}, grad U(theta_{t+1})) only on acceptance and
        // only while training is live; rejected or post-stop steps carry
        // (v, C) forward unchanged.
        if out.accepted && !reg.is_frozen() {
            let grad_u = model.grad_potential(theta.view())?;
            true_grad_evals += 1;
            trainer
                .update(reg.surrogate().basis(), theta.view(), grad_u.view())
                .map_err(|e| SamplerError::Config(format!("trainer update failed: {}", e)))?;
            reg.surrogate_mut().set_weights(trainer.weights().to_owned());
            let sur = reg.surrogate_mut();
            sur.lambda = trainer.lambda();
            sur.trained_points = trainer.count();
        }

        if cfg.hmc.adapt && t <= cfg.hmc.warmup as u64 {
            if let Some(mult) = adapter.observe(out.accepted) {
                epsilon *= mult;
            }
        }

        trace.push(
            theta.view(),
            out.accepted,
            out.delta_h,
            true_grad_evals,
            started.elapsed().as_secs_f64() * 1e3,
        );
    }

    Ok(VhmcOutput {
        trace,
        surrogate: reg.into_surrogate(),
        trainer,
        stopped_at,
        epsilon,
    })
}
