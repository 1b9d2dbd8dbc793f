//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use linbai_core::instances::{multivariate_arms, soare_instance};
use linbai_core::{ArmSet, Environment, NoiseModel, ParameterSequence};

/// The stationary Soare benchmark over `horizon` rounds.
pub fn soare_env(d: usize, omega: f64, horizon: usize) -> Environment {
    let (arms, theta) = soare_instance(d, omega).expect("valid Soare parameters");
    Environment::new(Arc::new(arms), ParameterSequence::stationary(theta, horizon), NoiseModel::Uniform)
        .expect("consistent environment")
}

/// Multivariate-testing arms for `slots` slots with the usual interaction weights.
pub fn multivariate(slots: usize) -> Arc<ArmSet> {
    Arc::new(multivariate_arms(slots, 1.0, 0.5, 1 << 12).expect("valid slot count"))
}
