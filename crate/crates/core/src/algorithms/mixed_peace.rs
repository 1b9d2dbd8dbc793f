use std::sync::Arc;

use rand::RngCore;

use super::context::{DesignContext, SamplingDesign};
use super::elimination::largest_halving_prefix;
use super::fixed::check_round;
use super::{AlgorithmKind, BaiAlgorithm};
use crate::design::{argmax, mix, Design};
use crate::error::{Error, Result};
use crate::estimation::EstimatorState;

/// Mixed-Peace: `R + 1` phases of `N = ⌊T/R⌋` rounds (the last one takes the
/// remainder) with `R = ⌈log₂ inf ρ(𝒳)⌉`. Each phase samples from
/// `mix(λ*, λ_XY(𝒳_r), w)` and ends with a hard halving elimination of the
/// active set.
///
/// With `w = 0` this is the stationary Peace-style baseline, which also
/// restricts its recommendation to the surviving arms.
pub struct MixedPeace {
    ctx: Arc<DesignContext>,
    mix_weight: f64,
    baseline: bool,
    phases: usize,
    phase_len: usize,
    phase: usize,
    active: Vec<usize>,
    sampling: SamplingDesign,
    estimator: EstimatorState,
}

impl MixedPeace {
    pub fn new(ctx: Arc<DesignContext>, horizon: usize, mix_weight: f64) -> Result<Self> {
        Self::build(ctx, horizon, mix_weight, false)
    }

    pub fn baseline(ctx: Arc<DesignContext>, horizon: usize) -> Result<Self> {
        Self::build(ctx, horizon, 0.0, true)
    }

    fn build(ctx: Arc<DesignContext>, horizon: usize, mix_weight: f64, baseline: bool) -> Result<Self> {
        let phases = phase_count(ctx.full_rho());
        let phase_len = horizon / phases;
        if phase_len == 0 {
            return Err(Error::BudgetTooSmall { budget: horizon, phases });
        }
        let active: Vec<usize> = (0..ctx.arms().len()).collect();
        let sampling = SamplingDesign::new(phase_design(&ctx, &active, mix_weight)?)?;
        let estimator = EstimatorState::new(ctx.arms().dim());
        Ok(Self { ctx, mix_weight, baseline, phases, phase_len, phase: 0, active, sampling, estimator })
    }

    /// `R`; phases are numbered `0..=R`.
    pub fn phases(&self) -> usize {
        self.phases
    }

    /// `N`.
    pub fn phase_length(&self) -> usize {
        self.phase_len
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    fn advance(&mut self) -> Result<()> {
        if self.active.len() > 1 {
            let theta = self.estimator.estimate()?;
            let values = self.ctx.arms().values(&theta);
            let mut order = self.active.clone();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
            let target = 0.5 * self.ctx.rho(&order)?;
            let keep = largest_halving_prefix(&self.ctx, &order, target)?;
            order.truncate(keep);
            self.active = order;
        }
        self.phase += 1;
        self.sampling = SamplingDesign::new(phase_design(&self.ctx, &self.active, self.mix_weight)?)?;
        Ok(())
    }
}

/// `⌈log₂ ρ⌉`, at least 1. A value within rounding of a power of two is
/// treated as that power.
pub fn phase_count(rho: f64) -> usize {
    let r = (rho.log2() - 1e-9).ceil();
    if r.is_finite() && r >= 1.0 {
        r as usize
    } else {
        1
    }
}

/// `mix(λ*, λ_XY(active), w)`; a single surviving arm has no XY design, so
/// the phase samples from `λ*`.
fn phase_design(ctx: &DesignContext, active: &[usize], w: f64) -> Result<Design> {
    if active.len() < 2 {
        return Ok(ctx.g_design().clone());
    }
    mix(ctx.g_design(), &ctx.xy(active)?.design, w)
}

impl BaiAlgorithm for MixedPeace {
    fn kind(&self) -> AlgorithmKind {
        if self.baseline {
            AlgorithmKind::PeaceBaseline
        } else {
            AlgorithmKind::MixedPeace
        }
    }

    fn choose(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        check_round(t, self.estimator.rounds())?;
        let phase = ((t - 1) / self.phase_len).min(self.phases);
        while self.phase < phase {
            self.advance()?;
        }
        Ok(self.sampling.sample(rng))
    }

    fn observe(&mut self, _t: usize, arm: usize, reward: f64) -> Result<()> {
        self.sampling.absorb(&mut self.estimator, arm, reward)
    }

    fn recommend(&self) -> Result<usize> {
        let theta = self.estimator.estimate()?;
        let values = self.ctx.arms().values(&theta);
        if !self.baseline {
            return Ok(argmax(values.as_slice()));
        }
        let mut best = self.active[0];
        for &k in &self.active[1..] {
            if values[k] > values[best] || (values[k] == values[best] && k < best) {
                best = k;
            }
        }
        Ok(best)
    }

    fn design(&self) -> &Design {
        self.sampling.design()
    }
}
