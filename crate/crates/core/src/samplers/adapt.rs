//! Warmup stepsize control: multiplicative Robbins-Monro updates applied at
//! window boundaries, eps <- eps * exp(kappa * (acc_rate - target)) with
//! kappa = 0.1 / sqrt(window index). Frozen once warmup ends.

#[derive(Debug, Clone)]
pub struct StepSizeAdapter {
    target: f64,
    window: usize,
    accepted: usize,
    seen: usize,
    windows_done: usize,
}

impl StepSizeAdapter {
    pub fn new(target: f64, window: usize) -> Self {
        assert!((0.0..1.0).contains(&target), "target acceptance must be in (0,1)");
        assert!(window >= 1);
        StepSizeAdapter { target, window, accepted: 0, seen: 0, windows_done: 0 }
    }

    /// Record one transition; at window boundaries returns the multiplier to
    /// apply to the stepsize.
    pub fn observe(&mut self, accepted: bool) -> Option<f64> {
        self.seen += 1;
        if accepted {
            self.accepted += 1;
        }
        if self.seen < self.window {
            return None;
        }
        let rate = self.accepted as f64 / self.seen as f64;
        self.windows_done += 1;
        self.seen = 0;
        self.accepted = 0;
        let kappa = 0.1 / (self.windows_done as f64).sqrt();
        Some((kappa * (rate - self.target)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_target_rate_leaves_stepsize_unchanged() {
        let mut ad = StepSizeAdapter::new(0.5, 4);
        let mut mult = None;
        for i in 0..4 {
            mult = ad.observe(i % 2 == 0);
        }
        assert_eq!(mult, Some(1.0));
    }

    #[test]
    fn full_acceptance_grows_the_stepsize() {
        let mut ad = StepSizeAdapter::new(0.8, 5);
        let mut eps = 0.1;
        for _ in 0..20 {
            if let Some(m) = ad.observe(true) {
                assert!(m > 1.0);
                eps *= m;
            }
        }
        assert!(eps > 0.1);
    }

    #[test]
    fn gain_decays_with_window_index() {
        let mut ad = StepSizeAdapter::new(0.5, 2);
        let m1 = [ad.observe(true), ad.observe(true)][1].unwrap();
        let m2 = [ad.observe(true), ad.observe(true)][1].unwrap();
        assert!((m1.ln() / m2.ln() - 2.0f64.sqrt()).abs() < 1e-12);
    }
}
