//! Fixed-budget best-arm identification for linear bandits whose reward
//! parameter may drift over time.
//!
//! The crate is organized by concern:
//!
//! * [`design`]: designs over arms, their covariances, and Frank-Wolfe
//!   solvers for G-optimal and XY-optimal designs;
//! * [`instances`]: arm sets, parameter sequences and noise models;
//! * [`estimation`]: the running inverse-propensity-score estimator;
//! * [`algorithms`]: G-BAI, P1-RAGE, P1-Peace, Mixed-Peace and baselines;
//! * [`complexity`]: problem-complexity measures for reporting;
//! * [`harness`]: configs, presets and the parallel Monte Carlo runner.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
    }};
}

pub mod algorithms;
pub mod complexity;
pub mod design;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod instances;

pub use algorithms::{AlgoConfig, AlgorithmKind, BaiAlgorithm, DesignContext};
pub use complexity::ComplexityReport;
pub use design::{mahalanobis_sq, mix, ArmSet, Design, Direction, FwSettings, Solution};
pub use error::{Error, Result};
pub use estimation::EstimatorState;
pub use harness::{ExperimentConfig, ResultRow};
pub use instances::{Environment, GapProfile, NoiseModel, ParameterSequence};
