//! Fixed-budget BAI procedures behind one sequential interface.
//!
//! Every algorithm samples arms i.i.d. from a design, keeps an IPS estimate
//! of the averaged parameter, and (except the Peace baseline) recommends
//! `argmax_x xᵀθ̂_T` over the full arm set.

pub mod context;
pub mod elimination;
mod fixed;
mod mixed_peace;
mod p1;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::design::{Design, FwSettings};
use crate::error::{Error, Result};
use crate::instances::Environment;

pub use context::{DesignContext, SamplingDesign};
pub use elimination::{
    largest_halving_prefix, peace_elimination, rage_elimination, Elimination, HALVING_SLACK,
};
pub use fixed::FixedDesign;
pub use mixed_peace::MixedPeace;
pub use p1::{EliminationRule, P1Bai};

/// The sequential protocol: `choose`/`observe` for `t = 1..=T`, then
/// `recommend` once.
pub trait BaiAlgorithm: Send {
    fn kind(&self) -> AlgorithmKind;

    /// Draw the arm for round `t`.
    fn choose(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize>;

    /// Absorb round `t`'s reward for the arm returned by `choose`.
    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<()>;

    fn recommend(&self) -> Result<usize>;

    /// The design the next `choose` samples from.
    fn design(&self) -> &Design;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    GBai,
    P1Rage,
    P1Peace,
    MixedPeace,
    PeaceBaseline,
    Uniform,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        Self::GBai,
        Self::P1Rage,
        Self::P1Peace,
        Self::MixedPeace,
        Self::PeaceBaseline,
        Self::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GBai => "g_bai",
            Self::P1Rage => "p1_rage",
            Self::P1Peace => "p1_peace",
            Self::MixedPeace => "mixed_peace",
            Self::PeaceBaseline => "peace_baseline",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Tunables shared by the adaptive algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgoConfig {
    /// Cap on virtual RAGE phases; the loop runs for `i = 0..=m`.
    pub m: usize,
    pub fw_iters: usize,
    pub fw_tol: f64,
    /// Refresh the P1-RAGE design once per epoch instead of every round.
    pub epoch_sync: bool,
    /// Weight on the G-optimal design `λ*` in every mixed design.
    pub mix_weight: f64,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        let fw = FwSettings::default();
        Self { m: 15, fw_iters: fw.iters, fw_tol: fw.tol, epoch_sync: true, mix_weight: 0.5 }
    }
}

impl AlgoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mix_weight) {
            return Err(Error::Config(format!("mix_weight {} outside [0, 1]", self.mix_weight)));
        }
        if self.fw_iters < 1 {
            return Err(Error::Config("fw_iters must be at least 1".into()));
        }
        if !(self.fw_tol.is_finite() && self.fw_tol >= 0.0) {
            return Err(Error::Config(format!("fw_tol {} must be finite and non-negative", self.fw_tol)));
        }
        Ok(())
    }

    pub fn fw_settings(&self) -> FwSettings {
        FwSettings { iters: self.fw_iters, tol: self.fw_tol, ..FwSettings::default() }
    }
}

/// Instantiate `kind` for a `horizon`-round episode. The Peace baseline
/// always uses `mix_weight = 0`.
pub fn build(
    kind: AlgorithmKind,
    ctx: Arc<DesignContext>,
    horizon: usize,
    config: &AlgoConfig,
) -> Result<Box<dyn BaiAlgorithm>> {
    config.validate()?;
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    Ok(match kind {
        AlgorithmKind::GBai => Box::new(FixedDesign::g_bai(&ctx)?),
        AlgorithmKind::Uniform => Box::new(FixedDesign::uniform(&ctx)?),
        AlgorithmKind::P1Rage => {
            let rule = EliminationRule::Rage { m: config.m };
            Box::new(P1Bai::new(ctx, rule, horizon, config.epoch_sync, config.mix_weight)?)
        }
        AlgorithmKind::P1Peace => {
            Box::new(P1Bai::new(ctx, EliminationRule::Peace, horizon, true, config.mix_weight)?)
        }
        AlgorithmKind::MixedPeace => Box::new(MixedPeace::new(ctx, horizon, config.mix_weight)?),
        AlgorithmKind::PeaceBaseline => Box::new(MixedPeace::baseline(ctx, horizon)?),
    })
}

/// Play `T = env.horizon()` rounds and return the recommendation.
pub fn run_episode(
    algo: &mut dyn BaiAlgorithm,
    env: &Environment,
    rng: &mut dyn RngCore,
) -> Result<usize> {
    if algo.design().arms().len() != env.arms().len() {
        return Err(Error::Shape { expected: env.arms().len(), found: algo.design().arms().len() });
    }
    for t in 1..=env.horizon() {
        let arm = algo.choose(t, rng)?;
        let reward = env.reward(t, arm, rng);
        algo.observe(t, arm, reward)?;
    }
    algo.recommend()
}

/// Build `kind` on a fresh context for `env` and play one episode.
pub fn run(
    kind: AlgorithmKind,
    env: &Environment,
    config: &AlgoConfig,
    rng: &mut dyn RngCore,
) -> Result<usize> {
    let ctx = Arc::new(DesignContext::new(env.arms().clone(), config.fw_settings())?);
    let mut algo = build(kind, ctx, env.horizon(), config)?;
    run_episode(algo.as_mut(), env, rng)
}

pub fn run_gbai(env: &Environment, rng: &mut dyn RngCore) -> Result<usize> {
    run(AlgorithmKind::GBai, env, &AlgoConfig::default(), rng)
}

pub fn run_p1rage(env: &Environment, config: &AlgoConfig, rng: &mut dyn RngCore) -> Result<usize> {
    run(AlgorithmKind::P1Rage, env, config, rng)
}

pub fn run_p1peace(env: &Environment, config: &AlgoConfig, rng: &mut dyn RngCore) -> Result<usize> {
    run(AlgorithmKind::P1Peace, env, config, rng)
}

pub fn run_mixed_peace(
    env: &Environment,
    config: &AlgoConfig,
    rng: &mut dyn RngCore,
) -> Result<usize> {
    run(AlgorithmKind::MixedPeace, env, config, rng)
}

pub fn run_uniform(env: &Environment, rng: &mut dyn RngCore) -> Result<usize> {
    run(AlgorithmKind::Uniform, env, &AlgoConfig::default(), rng)
}
