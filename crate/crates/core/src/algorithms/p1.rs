use std::sync::Arc;

use rand::RngCore;

use super::context::{DesignContext, SamplingDesign};
use super::elimination::{peace_elimination, rage_elimination};
use super::fixed::check_round;
use super::{AlgorithmKind, BaiAlgorithm};
use crate::design::{argmax, Design};
use crate::error::Result;
use crate::estimation::EstimatorState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminationRule {
    Rage { m: usize },
    Peace,
}

/// P1-RAGE and P1-Peace: start from `λ*`, and after round `t` with
/// `t − 1 ≡ 0 (mod R)` replace the design by the mixed output of virtual
/// elimination on `θ̂_t`. Without epoch synchronization `R = 1`.
pub struct P1Bai {
    ctx: Arc<DesignContext>,
    rule: EliminationRule,
    mix_weight: f64,
    horizon: usize,
    epoch: usize,
    sampling: SamplingDesign,
    estimator: EstimatorState,
    updates: Vec<usize>,
}

impl P1Bai {
    pub fn new(
        ctx: Arc<DesignContext>,
        rule: EliminationRule,
        horizon: usize,
        epoch_sync: bool,
        mix_weight: f64,
    ) -> Result<Self> {
        let epoch = if epoch_sync { epoch_length(horizon, ctx.full_rho()) } else { 1 };
        let sampling = SamplingDesign::new(ctx.g_design().clone())?;
        let estimator = EstimatorState::new(ctx.arms().dim());
        Ok(Self { ctx, rule, mix_weight, horizon, epoch, sampling, estimator, updates: Vec::new() })
    }

    /// `R`: rounds between design refreshes.
    pub fn epoch_length(&self) -> usize {
        self.epoch
    }

    /// Rounds `t` after which the design was refreshed.
    pub fn update_rounds(&self) -> &[usize] {
        &self.updates
    }

    fn refresh(&mut self) -> Result<()> {
        let theta = self.estimator.estimate()?;
        let out = match self.rule {
            EliminationRule::Rage { m } => rage_elimination(&self.ctx, &theta, m, self.mix_weight)?,
            EliminationRule::Peace => peace_elimination(&self.ctx, &theta, self.mix_weight)?,
        };
        self.sampling = SamplingDesign::new(out.design)?;
        Ok(())
    }
}

/// `⌊T / log₂ ρ⌋`, or 1 when that is not a positive count.
pub fn epoch_length(horizon: usize, rho: f64) -> usize {
    let r = (horizon as f64 / rho.log2()).floor();
    if r.is_finite() && r >= 1.0 {
        r as usize
    } else {
        log::warn!("epoch length for T={horizon}, rho={rho} is not positive; using 1");
        1
    }
}

impl BaiAlgorithm for P1Bai {
    fn kind(&self) -> AlgorithmKind {
        match self.rule {
            EliminationRule::Rage { .. } => AlgorithmKind::P1Rage,
            EliminationRule::Peace => AlgorithmKind::P1Peace,
        }
    }

    fn choose(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        check_round(t, self.estimator.rounds())?;
        Ok(self.sampling.sample(rng))
    }

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<()> {
        self.sampling.absorb(&mut self.estimator, arm, reward)?;
        if t < self.horizon && (t - 1).is_multiple_of(self.epoch) {
            self.refresh()?;
            self.updates.push(t);
        }
        Ok(())
    }

    fn recommend(&self) -> Result<usize> {
        let theta = self.estimator.estimate()?;
        Ok(argmax(self.ctx.arms().values(&theta).as_slice()))
    }

    fn design(&self) -> &Design {
        self.sampling.design()
    }
}
