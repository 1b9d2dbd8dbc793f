//! Problem-complexity measures, reported alongside experiment results.
//!
//! None of these feed back into the algorithms. The minimax quantities are
//! solved with the same Frank-Wolfe routine as the designs, using directions
//! `x − x₍₁₎` rescaled by a power of the gap.

use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use crate::design::{minimax_design, ArmSet, Direction, FwSettings};
use crate::error::{Error, Result};
use crate::instances::{gap_profile, GapProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub min_gap: f64,
    pub h_gbai: f64,
    pub rho_star: f64,
    pub m: usize,
    pub i0: usize,
    pub h_p1rage: f64,
    /// Only defined for canonical (multi-armed) arm sets.
    pub h_bob: Option<f64>,
}

impl ComplexityReport {
    pub fn compute(
        arms: &Arc<ArmSet>,
        theta_bar: &DVector<f64>,
        m: usize,
        fw: &FwSettings,
    ) -> Result<Self> {
        let gaps = nonzero_gaps(arms, theta_bar)?;
        let i0 = i0(gaps.min_gap)?;
        if m < i0 {
            log::warn!("m = {m} is below i0 = {i0} for minimum gap {}", gaps.min_gap);
        }
        Ok(Self {
            min_gap: gaps.min_gap,
            h_gbai: h_gbai(arms, theta_bar)?,
            rho_star: rho_star(arms, theta_bar, fw)?,
            m,
            i0,
            h_p1rage: h_p1rage(arms, theta_bar, m, fw)?,
            h_bob: if is_canonical(arms) { Some(h_bob(&gaps)?) } else { None },
        })
    }
}

/// `⌈log₂(1/Δ₍₁₎)⌉ + 1`.
pub fn i0(min_gap: f64) -> Result<usize> {
    if !(min_gap > 0.0) {
        return Err(Error::ZeroGap);
    }
    let v = (1.0 / min_gap).log2().ceil() + 1.0;
    Ok(v.max(1.0) as usize)
}

/// `d / Δ₍₁₎²`.
pub fn h_gbai(arms: &ArmSet, theta_bar: &DVector<f64>) -> Result<f64> {
    let gaps = nonzero_gaps(arms, theta_bar)?;
    Ok(arms.dim() as f64 / (gaps.min_gap * gaps.min_gap))
}

/// `inf_λ max_{x ≠ x₍₁₎} ‖x − x₍₁₎‖²_{A(λ)⁻¹} / Δ_x²`.
pub fn rho_star(arms: &Arc<ArmSet>, theta_bar: &DVector<f64>, fw: &FwSettings) -> Result<f64> {
    let gaps = nonzero_gaps(arms, theta_bar)?;
    let dirs = gap_directions(&gaps, |g| 1.0 / g);
    Ok(minimax_design(arms, &dirs, fw)?.value)
}

/// `(m·i₀/Δ₍₁₎)·inf_λ max ‖x − x₍₁₎‖²/Δ_x + (m·√d/Δ₍₁₎)·inf_λ max ‖x − x₍₁₎‖`,
/// norms in `A(λ)⁻¹`, each infimum solved separately.
pub fn h_p1rage(
    arms: &Arc<ArmSet>,
    theta_bar: &DVector<f64>,
    m: usize,
    fw: &FwSettings,
) -> Result<f64> {
    if m < 1 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let gaps = nonzero_gaps(arms, theta_bar)?;
    let i0 = i0(gaps.min_gap)? as f64;
    let m = m as f64;
    let weighted = minimax_design(arms, &gap_directions(&gaps, |g| 1.0 / g.sqrt()), fw)?.value;
    let plain = minimax_design(arms, &gap_directions(&gaps, |_| 1.0), fw)?.value.sqrt();
    let d = arms.dim() as f64;
    Ok(m * i0 / gaps.min_gap * weighted + m * d.sqrt() / gaps.min_gap * plain)
}

/// `(1/Δ₍₁₎)·max_k k/Δ₍ₖ₎` over the sorted gaps.
pub fn h_bob(gaps: &GapProfile) -> Result<f64> {
    let sorted = gaps.sorted_gaps();
    if sorted.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::ZeroGap);
    }
    let worst = sorted
        .iter()
        .enumerate()
        .map(|(i, g)| (i + 1) as f64 / g)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(worst / sorted[0])
}

/// Whether the arms are exactly `e₁, …, e_d` in order.
pub fn is_canonical(arms: &ArmSet) -> bool {
    arms.len() == arms.dim()
        && arms
            .arms()
            .iter()
            .enumerate()
            .all(|(k, x)| x.iter().enumerate().all(|(i, v)| *v == if i == k { 1.0 } else { 0.0 }))
}

fn nonzero_gaps(arms: &ArmSet, theta_bar: &DVector<f64>) -> Result<GapProfile> {
    let gaps = gap_profile(arms, theta_bar)?;
    if !(gaps.min_gap > 0.0) {
        return Err(Error::ZeroGap);
    }
    Ok(gaps)
}

/// `scale(Δ_x)·(x − x₍₁₎)` for every arm other than the best.
fn gap_directions(gaps: &GapProfile, scale: impl Fn(f64) -> f64) -> Vec<Direction> {
    let best = gaps.best_index;
    (0..gaps.gaps.len())
        .filter(|&k| k != best)
        .map(|k| Direction::difference(k, best).scaled(scale(gaps.gaps[k])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Design;
    use crate::instances::soare_instance;

    fn two_arm(gap: f64) -> (Arc<ArmSet>, DVector<f64>) {
        (Arc::new(ArmSet::canonical(2).unwrap()), DVector::from_vec(vec![gap, 0.0]))
    }

    /// Smallest objective over a regular grid on the simplex of `K ≤ 4` arms.
    fn grid_min(arms: &Arc<ArmSet>, objective: impl Fn(&Design) -> f64, steps: usize) -> f64 {
        let k = arms.len();
        let mut best = f64::INFINITY;
        let mut idx = vec![0usize; k - 1];
        loop {
            let used: usize = idx.iter().sum();
            if used <= steps {
                let mut w: Vec<f64> = idx.iter().map(|&i| i as f64 / steps as f64).collect();
                w.push((steps - used) as f64 / steps as f64);
                if let Ok(d) = Design::new(arms.clone(), w) {
                    let v = objective(&d);
                    if v.is_finite() {
                        best = best.min(v);
                    }
                }
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return best;
                }
                idx[pos] += 1;
                if idx[pos] <= steps {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn rho_objective(arms: &ArmSet, theta: &DVector<f64>) -> impl Fn(&Design) -> f64 {
        let g = gap_profile(arms, theta).unwrap();
        let best = arms.arm(g.best_index).clone();
        let diffs: Vec<(DVector<f64>, f64)> = (0..arms.len())
            .filter(|&k| k != g.best_index)
            .map(|k| (arms.arm(k) - &best, g.gaps[k]))
            .collect();
        move |d: &Design| {
            diffs.iter().map(|(y, gap)| d.mahalanobis_sq(y) / (gap * gap)).fold(0.0, f64::max)
        }
    }

    #[test]
    fn i0_values() {
        assert_eq!(i0(0.5).unwrap(), 2);
        assert_eq!(i0(0.1).unwrap(), 5);
        assert!(i0(0.0).is_err());
    }

    #[test]
    fn h_gbai_examples() {
        let (arms, theta) = soare_instance(10, 0.1).unwrap();
        let gap = 2.0 - 2.0 * 0.1f64.cos();
        assert_close!(h_gbai(&arms, &theta).unwrap(), 10.0 / (gap * gap), 1e-6);
        let arms = ArmSet::canonical(3).unwrap();
        let theta = DVector::from_vec(vec![0.5, 0.3, 0.1]);
        assert_close!(h_gbai(&arms, &theta).unwrap(), 3.0 / 0.04, 1e-9);
        let mut theta = DVector::zeros(10);
        theta[0] = 0.1;
        assert_close!(h_gbai(&ArmSet::canonical(10).unwrap(), &theta).unwrap(), 1000.0, 1e-9);
    }

    #[test]
    fn zero_gap_is_an_error() {
        let arms = Arc::new(ArmSet::canonical(2).unwrap());
        let theta = DVector::from_vec(vec![0.3, 0.3]);
        assert!(h_gbai(&arms, &theta).is_err());
        assert!(rho_star(&arms, &theta, &FwSettings::default()).is_err());
    }

    #[test]
    fn two_arm_rho_star() {
        for gap in [0.5, 0.2] {
            let (arms, theta) = two_arm(gap);
            let v = rho_star(&arms, &theta, &FwSettings::default()).unwrap();
            assert!((v / (4.0 / (gap * gap)) - 1.0).abs() < 0.02, "{v}");
        }
    }

    #[test]
    fn two_arm_h_p1rage() {
        let (arms, theta) = two_arm(0.5);
        let fw = FwSettings::default();
        let v = h_p1rage(&arms, &theta, 2, &fw).unwrap();
        assert!((v - (64.0 + 8.0 * 2f64.sqrt())).abs() < 0.01 * v, "{v}");
        let doubled = h_p1rage(&arms, &theta, 4, &fw).unwrap();
        assert_close!(doubled, 2.0 * v, 1e-9 * v);
    }

    #[test]
    fn canonical_second_term() {
        let k = 5;
        let arms = Arc::new(ArmSet::canonical(k).unwrap());
        let theta = DVector::from_vec(vec![0.9, 0.5, 0.4, 0.3, 0.2]);
        let g = gap_profile(&arms, &theta).unwrap();
        let v = minimax_design(&arms, &gap_directions(&g, |_| 1.0), &FwSettings::default())
            .unwrap()
            .value
            .sqrt();
        // The optimum puts mass on the best arm, so it is at most √(2K).
        assert!(v <= (2.0 * k as f64).sqrt() + 1e-6, "{v}");
    }

    #[test]
    fn h_bob_examples() {
        let arms = ArmSet::canonical(2).unwrap();
        let g = gap_profile(&arms, &DVector::from_vec(vec![0.5, 0.0])).unwrap();
        assert_close!(h_bob(&g).unwrap(), 8.0, 1e-12);
        let arms = ArmSet::canonical(4).unwrap();
        let g = gap_profile(&arms, &DVector::from_vec(vec![0.25, 0.0, 0.0, 0.0])).unwrap();
        assert_close!(h_bob(&g).unwrap(), 4.0 / 0.0625, 1e-9);
        let arms = ArmSet::canonical(3).unwrap();
        let g = gap_profile(&arms, &DVector::from_vec(vec![0.6, 0.5, 0.1])).unwrap();
        assert_close!(h_bob(&g).unwrap(), 200.0, 1e-9);
    }

    #[test]
    fn rho_star_matches_grid_search() {
        let cases = [
            (Arc::new(ArmSet::canonical(3).unwrap()), DVector::from_vec(vec![0.9, 0.6, 0.2])),
            {
                let (arms, _) = soare_instance(2, 0.5).unwrap();
                (Arc::new(arms), DVector::from_vec(vec![2.0, 0.0]))
            },
        ];
        for (arms, theta) in cases {
            let fw = rho_star(&arms, &theta, &FwSettings::default()).unwrap();
            let grid = grid_min(&arms, rho_objective(&arms, &theta), 600);
            assert!((fw - grid).abs() <= 0.05 * grid, "fw {fw} grid {grid}");
        }
    }

    #[test]
    fn report_fields() {
        let arms = Arc::new(ArmSet::canonical(3).unwrap());
        let theta = DVector::from_vec(vec![0.5, 0.3, 0.1]);
        let r = ComplexityReport::compute(&arms, &theta, 15, &FwSettings::default()).unwrap();
        assert_close!(r.min_gap, 0.2, 1e-12);
        assert_close!(r.h_gbai, 3.0 / 0.04, 1e-9);
        assert_eq!(r.i0, 4);
        assert!(r.rho_star > 0.0 && r.h_p1rage > 0.0);
        assert_close!(r.h_bob.unwrap(), (1.0 / 0.2) * (3.0 / 0.4f64).max(2.0 / 0.2), 1e-9);
        let (soare, theta) = soare_instance(3, 0.3).unwrap();
        let r = ComplexityReport::compute(&Arc::new(soare), &theta, 15, &FwSettings::default())
            .unwrap();
        assert!(r.h_bob.is_none());
    }
}
