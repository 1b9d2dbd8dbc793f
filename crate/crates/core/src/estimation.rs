//! Running inverse-propensity-score estimate of the averaged parameter.
//!
//! Each round contributes `A(λ_s)⁻¹ x_s r_s`, where `λ_s` is the design the
//! arm was drawn from. The average of these contributions is unbiased for
//! `θ̄_t = (1/t) Σ θ_s` whatever the designs are, as long as each covariance
//! has full rank. Contributions are summed with Neumaier compensation.

use nalgebra::DVector;

use crate::design::Design;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EstimatorState {
    sum: Vec<f64>,
    compensation: Vec<f64>,
    rounds: usize,
}

impl EstimatorState {
    pub fn new(dim: usize) -> Self {
        Self { sum: vec![0.0; dim], compensation: vec![0.0; dim], rounds: 0 }
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Absorb one round: `sum += A(λ)⁻¹ x_arm · reward`.
    pub fn ips_update(&mut self, design: &Design, arm: usize, reward: f64) -> Result<()> {
        let arms = design.arms();
        if arm >= arms.len() {
            return Err(Error::Precondition(format!("arm {arm} out of range")));
        }
        if arms.dim() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), found: arms.dim() });
        }
        if design.weights()[arm] <= 0.0 {
            return Err(Error::ZeroPropensity { arm });
        }
        let solved = design.solve(arms.arm(arm));
        if solved.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularDesign { design: format!("{:?}", design.weights()) });
        }
        debug_assert!(cauchy_schwarz_holds(design, arm, &solved));
        self.absorb(&solved, reward);
        Ok(())
    }

    /// Absorb a precomputed `A(λ)⁻¹ x` scaled by `reward`.
    pub fn absorb(&mut self, solved: &DVector<f64>, reward: f64) {
        debug_assert_eq!(solved.len(), self.sum.len());
        for ((s, c), v) in self.sum.iter_mut().zip(&mut self.compensation).zip(solved.iter()) {
            let term = v * reward;
            let t = *s + term;
            if s.abs() >= term.abs() {
                *c += (*s - t) + term;
            } else {
                *c += (term - t) + *s;
            }
            *s = t;
        }
        self.rounds += 1;
    }

    /// `θ̂_t = sum / t`.
    pub fn estimate(&self) -> Result<DVector<f64>> {
        if self.rounds == 0 {
            return Err(Error::EmptyEstimator);
        }
        let t = self.rounds as f64;
        Ok(DVector::from_iterator(
            self.sum.len(),
            self.sum.iter().zip(&self.compensation).map(|(s, c)| (s + c) / t),
        ))
    }
}

/// `|xᵀA⁻¹x_s| ≤ ‖x‖_{A⁻¹}‖x_s‖_{A⁻¹}` for every arm `x`.
pub(crate) fn cauchy_schwarz_holds(design: &Design, arm: usize, solved: &DVector<f64>) -> bool {
    let arms = design.arms();
    let own = design.mahalanobis_sq(arms.arm(arm)).sqrt();
    arms.arms().iter().all(|x| {
        let lhs = x.dot(solved).abs();
        let rhs = design.mahalanobis_sq(x).sqrt() * own;
        lhs <= rhs * (1.0 + 1e-9) + 1e-12
    })
}
