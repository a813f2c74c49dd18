//! Beta-binomial model for overdispersed count pairs (n_j, y_j) with mean m
//! and precision K, sampled in the transformed coordinates
//! x1 = logit(m), x2 = log(K) where the posterior is well behaved.
//!
//! The improper prior p(m, K) = 1 / (m(1-m)(1+K)^2) combines with the
//! Jacobian of the transform (m(1-m) * K) so the transformed negative log
//! density is
//!
//!   U(x1, x2) = -sum_j l_j(m, K) - log K + 2 log(1 + K)
//!
//! with l_j the log Beta-function likelihood ratio. Binomial coefficients
//! are constants and dropped.

use super::{ModelError, Potential, TargetModel};
use ndarray::{Array1, ArrayView1};
use statrs::function::gamma::{digamma, ln_gamma};

/// 20 city pairs (y = cancer deaths, n = population at risk) shipped with
/// the crate; originally distributed in the R package LearnBayes as
/// `cancermortality`.
const CANCER_MORTALITY_CSV: &str = include_str!("data/cancer_mortality.csv");

#[derive(Debug, Clone)]
pub struct BetaBinomialModel {
    y: Vec<f64>,
    n: Vec<f64>,
}

impl BetaBinomialModel {
    pub fn new(pairs: &[(u64, u64)]) -> Result<Self, ModelError> {
        if pairs.is_empty() {
            return Err(ModelError::InvalidArgument("no (n, y) pairs".into()));
        }
        for &(n, y) in pairs {
            if y > n {
                return Err(ModelError::InvalidArgument(format!(
                    "y = {} exceeds n = {}",
                    y, n
                )));
            }
        }
        Ok(BetaBinomialModel {
            y: pairs.iter().map(|&(_, y)| y as f64).collect(),
            n: pairs.iter().map(|&(n, _)| n as f64).collect(),
        })
    }

    /// The stomach-cancer mortality data (20 Missouri cities).
    pub fn cancer_mortality() -> Self {
        let pairs: Vec<(u64, u64)> = CANCER_MORTALITY_CSV
            .lines()
            .skip(1)
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let mut it = l.split(',');
                let y: u64 = it.next().unwrap().trim().parse().unwrap();
                let n: u64 = it.next().unwrap().trim().parse().unwrap();
                (n, y)
            })
            .collect();
        BetaBinomialModel::new(&pairs).unwrap()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.n.iter().copied().zip(self.y.iter().copied())
    }

    /// Moment-based starting point (logit of the pooled rate, log K = 100).
    pub fn default_init(&self) -> Array1<f64> {
        let sy: f64 = self.y.iter().sum();
        let sn: f64 = self.n.iter().sum();
        let m = (sy / sn).clamp(1e-12, 1.0 - 1e-12);
        Array1::from(vec![(m / (1.0 - m)).ln(), 100.0f64.ln()])
    }

    fn unpack(theta: ArrayView1<f64>) -> (f64, f64, f64) {
        let (x1, x2) = (theta[0], theta[1]);
        // sigmoid and its complement, each computed without cancellation
        let m = sigmoid(x1);
        let one_m = sigmoid(-x1);
        let k = x2.exp();
        (m, one_m, k)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Potential for BetaBinomialModel {
    fn dim(&self) -> usize {
        2
    }

    fn potential(&self, theta: ArrayView1<f64>) -> Result<f64, ModelError> {
        self.check_dim(theta)?;
        let (m, one_m, k) = Self::unpack(theta);
        if !(k.is_finite() && k > 0.0 && m > 0.0 && one_m > 0.0) {
            return Err(ModelError::Domain(format!(
                "transformed point ({}, {}) leaves (m, K) representable range",
                theta[0], theta[1]
            )));
        }
        let a = k * m;
        let b = k * one_m;
        let mut log_lik = 0.0;
        for (n, y) in self.pairs() {
            log_lik += ln_gamma(a + y) + ln_gamma(b + n - y) - ln_gamma(k + n)
                - ln_gamma(a) - ln_gamma(b) + ln_gamma(k);
        }
        let u = -log_lik - k.ln() + 2.0 * (1.0 + k).ln();
        if !u.is_finite() {
            return Err(ModelError::Domain(format!(
                "non-finite potential at ({}, {})",
                theta[0], theta[1]
            )));
        }
        Ok(u)
    }

    fn grad_potential(&self, theta: ArrayView1<f64>) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        let (m, one_m, k) = Self::unpack(theta);
        if !(k.is_finite() && k > 0.0 && m > 0.0 && one_m > 0.0) {
            return Err(ModelError::Domain("outside representable range".into()));
        }
        let a = k * m;
        let b = k * one_m;
        let mut dl_dm = 0.0;
        let mut dl_dk = 0.0;
        for (n, y) in self.pairs() {
            let da = digamma(a + y) - digamma(a);
            let db = digamma(b + n - y) - digamma(b);
            dl_dm += k * (da - db);
            dl_dk += m * da + one_m * db + digamma(k) - digamma(k + n);
        }
        // U = -log_lik - log K + 2 log(1+K); chain rule through the transform.
        let du_dm = -dl_dm;
        let du_dk = -dl_dk - 1.0 / k + 2.0 / (1.0 + k);
        let g1 = m * one_m * du_dm;
        let g2 = k * du_dk;
        if !(g1.is_finite() && g2.is_finite()) {
            return Err(ModelError::Domain("non-finite gradient".into()));
        }
        Ok(Array1::from(vec![g1, g2]))
    }
}

impl TargetModel for BetaBinomialModel {
    fn data_len(&self) -> usize {
        self.y.len()
    }

    fn minibatch_grad(
        &self,
        theta: ArrayView1<f64>,
        batch: &[usize],
    ) -> Result<Array1<f64>, ModelError> {
        self.check_dim(theta)?;
        self.check_batch(batch)?;
        let (m, one_m, k) = Self::unpack(theta);
        if !(k.is_finite() && k > 0.0 && m > 0.0 && one_m > 0.0) {
            return Err(ModelError::Domain("outside representable range".into()));
        }
        let a = k * m;
        let b = k * one_m;
        let scale = self.data_len() as f64 / batch.len() as f64;
        let mut dl_dm = 0.0;
        let mut dl_dk = 0.0;
        for &j in batch {
            let (n, y) = (self.n[j], self.y[j]);
            let da = digamma(a + y) - digamma(a);
            let db = digamma(b + n - y) - digamma(b);
            dl_dm += k * (da - db);
            dl_dk += m * da + one_m * db + digamma(k) - digamma(k + n);
        }
        let du_dm = -scale * dl_dm;
        let du_dk = -scale * dl_dk - 1.0 / k + 2.0 / (1.0 + k);
        Ok(Array1::from(vec![m * one_m * du_dm, k * du_dk]))
    }
}
