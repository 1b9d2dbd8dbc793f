use thiserror::Error;

/// Errors raised by the design solvers, instance builders, estimators and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm set needs at least 2 arms, got {0}")]
    TooFewArms(usize),
    #[error("arm {index} has a non-finite coordinate")]
    NonFiniteArm { index: usize },
    #[error("arms have inconsistent dimensions: expected {expected}, arm {index} has {found}")]
    RaggedArms { index: usize, expected: usize, found: usize },
    #[error("arm set does not span R^{dim} (rank {rank})")]
    RankDeficient { dim: usize, rank: usize },
    #[error("shape mismatch: expected length {expected}, got {found}")]
    Shape { expected: usize, found: usize },
    #[error("covariance of design `{design}` is singular after regularization")]
    SingularDesign { design: String },
    #[error("non-finite objective in {0}")]
    NonFinite(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("best arm is not unique: arms {first} and {second} tie at {value}")]
    NonUniqueBest { first: usize, second: usize, value: f64 },
    #[error("zero gap: complexity is infinite")]
    ZeroGap,
    #[error("arm {arm} has zero probability under the sampling design")]
    ZeroPropensity { arm: usize },
    #[error("round {t} outside horizon 1..={horizon}")]
    RoundOutOfRange { t: usize, horizon: usize },
    #[error("estimator has absorbed no rounds")]
    EmptyEstimator,
    #[error("budget {budget} too small for {phases} phases")]
    BudgetTooSmall { budget: usize, phases: usize },
    #[error("instance construction failed after {attempts} attempts: {config}")]
    InstanceConstruction { attempts: usize, config: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by user input (bad configs, unknown presets),
    /// as opposed to failures during a run.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownPreset { .. } | Error::Json(_) | Error::Precondition(_)
        )
    }
}
