//! Random-basis surrogate of the potential energy: a single hidden layer of
//! frozen softplus nodes whose output weights are fitted by online score
//! matching, plus the Laplace-regularized transition potential the sampler
//! actually runs on while the fit warms up.

mod basis;
mod network;
mod regularized;
mod score;
mod trainer;

pub use basis::{softplus, softplus_prime, RandomBasis, SharedBasis};
pub use network::{Surrogate, SurrogateRecord, SURROGATE_FORMAT_VERSION};
pub use regularized::{transition_mu, RegularizedSurrogate};
pub use score::empirical_score_distance;
pub use trainer::{batch_inverse_gram, batch_solve, TrainError, TrainerState};
