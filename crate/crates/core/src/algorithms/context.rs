use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DVector;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::RngCore;

use crate::design::{self, ArmSet, Design, FwSettings, Solution};
use crate::error::{Error, Result};
use crate::estimation::EstimatorState;

/// Everything about an arm set that the algorithms solve for once and share
/// across trials: the G-optimal design, `inf_λ ρ(𝒳, λ)`, and a cache of
/// XY-optimal designs keyed by active set.
///
/// Solves are deterministic functions of the active set, so the cache
/// returns the same answer regardless of which trial filled it.
pub struct DesignContext {
    arms: Arc<ArmSet>,
    fw: FwSettings,
    g_optimal: Solution,
    full_rho: f64,
    xy_cache: Mutex<HashMap<Vec<usize>, Arc<Solution>>>,
}

impl DesignContext {
    pub fn new(arms: Arc<ArmSet>, fw: FwSettings) -> Result<Self> {
        let g_optimal = design::g_optimal(&arms, &fw)?;
        let all: Vec<usize> = (0..arms.len()).collect();
        let full = design::xy_optimal(&arms, &all, &fw)?;
        let full_rho = full.value;
        let mut cache = HashMap::new();
        cache.insert(all, Arc::new(full));
        Ok(Self { arms, fw, g_optimal, full_rho, xy_cache: Mutex::new(cache) })
    }

    pub fn arms(&self) -> &Arc<ArmSet> {
        &self.arms
    }

    pub fn fw_settings(&self) -> &FwSettings {
        &self.fw
    }

    /// `λ*` and its objective.
    pub fn g_optimal(&self) -> &Solution {
        &self.g_optimal
    }

    pub fn g_design(&self) -> &Design {
        &self.g_optimal.design
    }

    /// `inf_λ ρ(𝒳, λ)` over the full arm set.
    pub fn full_rho(&self) -> f64 {
        self.full_rho
    }

    /// XY-optimal design for `active` (any order), cached.
    pub fn xy(&self, active: &[usize]) -> Result<Arc<Solution>> {
        let mut key = active.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(hit) = self.xy_cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let solved = Arc::new(design::xy_optimal(&self.arms, &key, &self.fw)?);
        self.xy_cache.lock().expect("cache lock").entry(key).or_insert(solved.clone());
        Ok(solved)
    }

    /// `inf_λ ρ(set, λ)`; zero for sets with fewer than two arms.
    pub fn rho(&self, set: &[usize]) -> Result<f64> {
        if set.len() < 2 {
            return Ok(0.0);
        }
        Ok(self.xy(set)?.value)
    }

    pub fn cached_designs(&self) -> usize {
        self.xy_cache.lock().expect("cache lock").len()
    }
}

/// A design prepared for sampling and estimation: an alias-free weighted
/// sampler plus `A(λ)⁻¹ x_k` for every arm, computed from one factorization.
pub struct SamplingDesign {
    design: Design,
    solved: Vec<DVector<f64>>,
    sampler: WeightedIndex<f64>,
}

impl SamplingDesign {
    pub fn new(design: Design) -> Result<Self> {
        let sampler = WeightedIndex::new(design.weights())
            .map_err(|e| Error::Precondition(format!("cannot sample from design: {e}")))?;
        let solved: Vec<DVector<f64>> =
            design.arms().arms().iter().map(|x| design.solve(x)).collect();
        if solved.iter().flat_map(|v| v.iter()).any(|v| !v.is_finite()) {
            return Err(Error::SingularDesign { design: format!("{design:?}") });
        }
        debug_assert!((0..solved.len())
            .all(|k| crate::estimation::cauchy_schwarz_holds(&design, k, &solved[k])));
        Ok(Self { design, solved, sampler })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> usize {
        self.sampler.sample(rng)
    }

    /// IPS update with this design as the propensity.
    pub fn absorb(&self, estimator: &mut EstimatorState, arm: usize, reward: f64) -> Result<()> {
        if self.design.weights()[arm] <= 0.0 {
            return Err(Error::ZeroPropensity { arm });
        }
        estimator.absorb(&self.solved[arm], reward);
        Ok(())
    }
}
