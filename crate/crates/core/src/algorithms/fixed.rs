use rand::RngCore;

use super::context::{DesignContext, SamplingDesign};
use super::{AlgorithmKind, BaiAlgorithm};
use crate::design::{argmax, Design};
use crate::error::{Error, Result};
use crate::estimation::EstimatorState;

/// Samples every round from one design chosen up front: `λ*` for G-BAI,
/// uniform for the uniform baseline.
pub struct FixedDesign {
    kind: AlgorithmKind,
    sampling: SamplingDesign,
    estimator: EstimatorState,
}

impl FixedDesign {
    pub fn g_bai(ctx: &DesignContext) -> Result<Self> {
        Self::new(AlgorithmKind::GBai, ctx.g_design().clone())
    }

    pub fn uniform(ctx: &DesignContext) -> Result<Self> {
        Self::new(AlgorithmKind::Uniform, Design::uniform(ctx.arms().clone())?)
    }

    fn new(kind: AlgorithmKind, design: Design) -> Result<Self> {
        let estimator = EstimatorState::new(design.arms().dim());
        Ok(Self { kind, sampling: SamplingDesign::new(design)?, estimator })
    }
}

impl BaiAlgorithm for FixedDesign {
    fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    fn choose(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        check_round(t, self.estimator.rounds())?;
        Ok(self.sampling.sample(rng))
    }

    fn observe(&mut self, _t: usize, arm: usize, reward: f64) -> Result<()> {
        self.sampling.absorb(&mut self.estimator, arm, reward)
    }

    fn recommend(&self) -> Result<usize> {
        let theta = self.estimator.estimate()?;
        Ok(argmax(self.sampling.design().arms().values(&theta).as_slice()))
    }

    fn design(&self) -> &Design {
        self.sampling.design()
    }
}

/// `choose(t)` must follow exactly `t − 1` observed rounds.
pub(super) fn check_round(t: usize, absorbed: usize) -> Result<()> {
    if t != absorbed + 1 {
        return Err(Error::Precondition(format!(
            "round {t} requested after {absorbed} observed rounds"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{ArmSet, FwSettings};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn canonical_g_bai_pulls_uniformly() {
        let k = 5;
        let ctx =
            DesignContext::new(Arc::new(ArmSet::canonical(k).unwrap()), FwSettings::default())
                .unwrap();
        let mut algo = FixedDesign::g_bai(&ctx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let horizon = 10_000;
        let mut counts = vec![0usize; k];
        for t in 1..=horizon {
            let arm = algo.choose(t, &mut rng).unwrap();
            counts[arm] += 1;
            algo.observe(t, arm, 0.0).unwrap();
        }
        let p = 1.0 / k as f64;
        let se = (p * (1.0 - p) / horizon as f64).sqrt();
        for c in counts {
            assert!((c as f64 / horizon as f64 - p).abs() <= 3.0 * se, "{c}");
        }
    }

    #[test]
    fn canonical_g_bai_matches_uniform_design() {
        let ctx =
            DesignContext::new(Arc::new(ArmSet::canonical(4).unwrap()), FwSettings::default())
                .unwrap();
        let g = FixedDesign::g_bai(&ctx).unwrap();
        let u = FixedDesign::uniform(&ctx).unwrap();
        for (a, b) in g.design().weights().iter().zip(u.design().weights()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_order_rounds_are_rejected() {
        let ctx =
            DesignContext::new(Arc::new(ArmSet::canonical(2).unwrap()), FwSettings::default())
                .unwrap();
        let mut algo = FixedDesign::uniform(&ctx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(algo.choose(2, &mut rng).is_err());
        assert!(matches!(algo.recommend(), Err(Error::EmptyEstimator)));
    }
}
