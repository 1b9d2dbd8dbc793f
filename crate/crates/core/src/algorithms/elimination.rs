//! Virtual elimination: arms are dropped only while building a sampling
//! design, never from play. Both subroutines average the XY-optimal designs
//! of the shrinking active sets and mix the average with `λ*`.

use nalgebra::DVector;

use super::context::DesignContext;
use crate::design::{mix, normalize, Design};
use crate::error::Result;

/// Relative slack when testing `inf ρ(prefix) ≤ ½·inf ρ(active)`. Both sides
/// come from an iterative solver, so a prefix whose exact value sits on the
/// boundary would otherwise fail on solver error alone.
pub const HALVING_SLACK: f64 = 0.02;

/// Outcome of one elimination pass.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// `mix_weight·λ* + (1 − mix_weight)·λ̄`.
    pub design: Design,
    /// The active sets whose XY designs were averaged into `λ̄`, in order.
    pub active_sets: Vec<Vec<usize>>,
    /// Arms still active when the loop stopped.
    pub survivors: Vec<usize>,
}

/// RAGE-style elimination: with `x̂* = argmax xᵀθ̂`, phase `i` keeps the arms
/// whose estimated gap to `x̂*` is at most `2^{−i}`. Runs while more than
/// one arm is active and `i ≤ m`.
pub fn rage_elimination(
    ctx: &DesignContext,
    theta_hat: &DVector<f64>,
    m: usize,
    mix_weight: f64,
) -> Result<Elimination> {
    let arms = ctx.arms();
    let values = arms.values(theta_hat);
    let best = crate::design::argmax(values.as_slice());
    let mut active: Vec<usize> = (0..arms.len()).collect();
    let mut active_sets = Vec::new();
    let mut designs = Vec::new();
    let mut i = 0usize;
    while active.len() > 1 && i <= m {
        designs.push(ctx.xy(&active)?);
        active_sets.push(active.clone());
        let threshold = 0.5f64.powi(i as i32);
        active.retain(|&k| values[best] - values[k] <= threshold);
        i += 1;
    }
    let bar = average(ctx, designs.iter().map(|s| &s.design))?;
    Ok(Elimination { design: mix(ctx.g_design(), &bar, mix_weight)?, active_sets, survivors: active })
}

/// Peace-style elimination: arms are ranked by `xᵀθ̂` and each phase keeps
/// the largest top-`k` prefix whose XY value is at most half the current one.
pub fn peace_elimination(
    ctx: &DesignContext,
    theta_hat: &DVector<f64>,
    mix_weight: f64,
) -> Result<Elimination> {
    let ranking = ctx.arms().ranking(theta_hat);
    let mut n = ranking.len();
    let mut active_sets = Vec::new();
    let mut designs = Vec::new();
    while n > 1 {
        let solved = ctx.xy(&ranking[..n])?;
        active_sets.push(ranking[..n].to_vec());
        let target = 0.5 * solved.value;
        designs.push(solved);
        n = largest_halving_prefix(ctx, &ranking[..n], target)?;
    }
    let bar = average(ctx, designs.iter().map(|s| &s.design))?;
    Ok(Elimination {
        design: mix(ctx.g_design(), &bar, mix_weight)?,
        active_sets,
        survivors: ranking[..n].to_vec(),
    })
}

/// Largest `k < order.len()` with `inf ρ(order[..k]) ≤ target` (up to
/// [`HALVING_SLACK`]). `ρ` of a prefix grows with `k`, so this is a binary
/// search; `k = 1` always qualifies.
pub fn largest_halving_prefix(ctx: &DesignContext, order: &[usize], target: f64) -> Result<usize> {
    let limit = target * (1.0 + HALVING_SLACK);
    let (mut lo, mut hi) = (1usize, order.len().saturating_sub(1).max(1));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if ctx.rho(&order[..mid])? <= limit {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

fn average<'a>(
    ctx: &DesignContext,
    designs: impl ExactSizeIterator<Item = &'a Design>,
) -> Result<Design> {
    let count = designs.len();
    if count == 0 {
        return Ok(ctx.g_design().clone());
    }
    let mut weights = vec![0.0; ctx.arms().len()];
    for d in designs {
        for (acc, w) in weights.iter_mut().zip(d.weights()) {
            *acc += w / count as f64;
        }
    }
    normalize(&mut weights);
    Design::new(ctx.arms().clone(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{ArmSet, FwSettings};
    use crate::instances::soare_instance;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn canonical_ctx(k: usize) -> DesignContext {
        DesignContext::new(Arc::new(ArmSet::canonical(k).unwrap()), FwSettings::default()).unwrap()
    }

    #[test]
    fn rage_worked_example() {
        let ctx = canonical_ctx(3);
        let theta = DVector::from_vec(vec![1.0, 0.6, 0.1]);
        let out = rage_elimination(&ctx, &theta, 5, 0.5).unwrap();
        assert_eq!(out.active_sets, vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1]]);
        assert_eq!(out.survivors, vec![0]);
        for (got, want) in out.design.weights().iter().zip([13.0 / 36.0, 13.0 / 36.0, 5.0 / 18.0]) {
            assert!((got - want).abs() < 1e-3, "{:?}", out.design.weights());
        }
    }

    #[test]
    fn rage_with_flat_estimate_repeats_full_design() {
        let ctx = canonical_ctx(3);
        let out = rage_elimination(&ctx, &DVector::zeros(3), 4, 0.0).unwrap();
        assert_eq!(out.active_sets.len(), 5);
        let full = ctx.xy(&[0, 1, 2]).unwrap();
        for (a, b) in out.design.weights().iter().zip(full.design.weights()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rage_per_phase_designs_are_uniform_on_survivors() {
        let ctx = canonical_ctx(5);
        let theta = DVector::from_vec(vec![0.1, 0.9, 0.55, 0.3, 0.8]);
        let out = rage_elimination(&ctx, &theta, 15, 0.5).unwrap();
        for set in &out.active_sets {
            let w = ctx.xy(set).unwrap();
            for k in 0..5 {
                let want = if set.contains(&k) { 1.0 / set.len() as f64 } else { 0.0 };
                assert!((w.design.weights()[k] - want).abs() < 0.02, "{set:?}: {:?}", w.design);
            }
        }
    }

    #[test]
    fn peace_canonical_four() {
        let ctx = canonical_ctx(4);
        let theta = DVector::from_vec(vec![0.9, 0.7, 0.4, 0.1]);
        let out = peace_elimination(&ctx, &theta, 0.5).unwrap();
        let sizes: Vec<usize> = out.active_sets.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 2]);
        assert_eq!(out.survivors, vec![0]);
    }

    #[test]
    fn peace_two_arms_single_design() {
        let ctx = canonical_ctx(2);
        let out = peace_elimination(&ctx, &DVector::from_vec(vec![0.2, 0.4]), 0.0).unwrap();
        assert_eq!(out.active_sets, vec![vec![1, 0]]);
        let only = ctx.xy(&[0, 1]).unwrap();
        for (a, b) in out.design.weights().iter().zip(only.design.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn peace_phase_count_is_logarithmic() {
        let (arms, _) = soare_instance(6, 0.3).unwrap();
        let ctx = DesignContext::new(Arc::new(arms), FwSettings::default()).unwrap();
        let theta = DVector::from_vec(vec![0.5, 0.1, -0.2, 0.3, 0.0, 0.45]);
        let out = peace_elimination(&ctx, &theta, 0.5).unwrap();
        assert!(out.active_sets.len() <= ctx.full_rho().log2().ceil() as usize);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn estimated_best_arm_is_never_eliminated(
            theta in proptest::collection::vec(-1.0f64..1.0, 4),
        ) {
            let (arms, _) = soare_instance(4, 0.4).unwrap();
            let ctx = DesignContext::new(Arc::new(arms), FwSettings::default()).unwrap();
            let theta = DVector::from_vec(theta);
            let best = ctx.arms().best_arm(&theta);
            let rage = rage_elimination(&ctx, &theta, 15, 0.5).unwrap();
            prop_assert!(rage.active_sets.iter().all(|s| s.contains(&best)));
            prop_assert!(rage.survivors.contains(&best));
            let peace = peace_elimination(&ctx, &theta, 0.5).unwrap();
            prop_assert!(peace.active_sets.iter().all(|s| s[0] == best));
            prop_assert_eq!(peace.survivors[0], best);
        }
    }
}
