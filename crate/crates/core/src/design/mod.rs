//! Distributions over a finite arm set and the covariance they induce.
//!
//! A [`Design`] is a probability vector `λ` over the arms of an [`ArmSet`]
//! together with its covariance `A(λ) = Σ λ_k x_k x_kᵀ`. The covariance is
//! factored once at construction (with a tiny diagonal regularizer) so that
//! Mahalanobis norms `vᵀ A(λ)⁻¹ v` and solves `A(λ)⁻¹ v` are cheap afterwards.
//!
//! The Frank-Wolfe solvers for G-optimal and XY-optimal designs live in
//! [`frank_wolfe`].

pub mod frank_wolfe;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub use frank_wolfe::{
    g_optimal, minimax_design, pair_directions, xy_optimal, Direction, FwSettings, Solution,
};

/// Relative size of the ridge added to the covariance diagonal before solves.
pub const REGULARIZATION: f64 = 1e-10;

/// Tolerance on `Σ λ_k = 1`.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A finite set of `K ≥ 2` arms spanning `ℝ^d`. Arm order is fixed at
/// construction and every index elsewhere in the crate refers to it.
#[derive(Clone, PartialEq)]
pub struct ArmSet {
    /// K×d, one arm per row.
    matrix: DMatrix<f64>,
    arms: Vec<DVector<f64>>,
}

impl ArmSet {
    pub fn new(arms: Vec<Vec<f64>>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::TooFewArms(arms.len()));
        }
        let dim = arms[0].len();
        if dim == 0 {
            return Err(Error::RankDeficient { dim: 0, rank: 0 });
        }
        for (index, arm) in arms.iter().enumerate() {
            if arm.len() != dim {
                return Err(Error::RaggedArms { index, expected: dim, found: arm.len() });
            }
            if arm.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteArm { index });
            }
        }
        let k = arms.len();
        let matrix = DMatrix::from_fn(k, dim, |i, j| arms[i][j]);
        let rank = numerical_rank(&matrix);
        if rank < dim {
            return Err(Error::RankDeficient { dim, rank });
        }
        let arms = arms.into_iter().map(DVector::from_vec).collect();
        Ok(Self { matrix, arms })
    }

    /// The canonical basis `{e_1, …, e_d}`: the multi-armed bandit as a linear bandit.
    pub fn canonical(dim: usize) -> Result<Self> {
        Self::new(
            (0..dim)
                .map(|i| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    e
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn arm(&self, k: usize) -> &DVector<f64> {
        &self.arms[k]
    }

    pub fn arms(&self) -> &[DVector<f64>] {
        &self.arms
    }

    /// K×d matrix with one arm per row.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `xᵀθ` for every arm.
    pub fn values(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.matrix * theta
    }

    /// Index of the arm maximizing `xᵀθ`, ties to the lowest index.
    pub fn best_arm(&self, theta: &DVector<f64>) -> usize {
        argmax(self.values(theta).as_slice())
    }

    /// Arm indices sorted by `xᵀθ` descending, ties by ascending index.
    pub fn ranking(&self, theta: &DVector<f64>) -> Vec<usize> {
        let values = self.values(theta);
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        order
    }

    /// Same arms, reordered by `perm` (new arm `i` is old arm `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), found: perm.len() });
        }
        Self::new(perm.iter().map(|&p| self.arms[p].as_slice().to_vec()).collect())
    }
}

impl fmt::Debug for ArmSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArmSet").field("k", &self.len()).field("d", &self.dim()).finish()
    }
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let eps = max * 1e-10 * (m.nrows().max(m.ncols()) as f64);
    svd.singular_values.iter().filter(|&&s| s > eps).count()
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A probability distribution over the arms of an [`ArmSet`] with its
/// (regularized, factored) covariance.
#[derive(Clone)]
pub struct Design {
    arms: Arc<ArmSet>,
    weights: Vec<f64>,
    covariance: DMatrix<f64>,
    regularizer: f64,
    factor: Cholesky<f64, Dyn>,
}

impl Design {
    pub fn new(arms: Arc<ArmSet>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != arms.len() {
            return Err(Error::Shape { expected: arms.len(), found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Precondition("design weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Precondition(format!("design weights sum to {total}, not 1")));
        }
        let covariance = covariance(&arms, &weights);
        let (regularizer, factor) = factorize(&covariance).ok_or_else(|| Error::SingularDesign {
            design: summarize(&weights),
        })?;
        Ok(Self { arms, weights, covariance, regularizer, factor })
    }

    pub fn uniform(arms: Arc<ArmSet>) -> Result<Self> {
        let k = arms.len();
        Self::new(arms, vec![1.0 / k as f64; k])
    }

    pub fn arms(&self) -> &Arc<ArmSet> {
        &self.arms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `A(λ)` without the regularizer.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn regularizer(&self) -> f64 {
        self.regularizer
    }

    /// `A(λ)⁻¹ v` through the cached factorization.
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        self.factor.solve(v)
    }

    /// `vᵀ A(λ)⁻¹ v`.
    pub fn mahalanobis_sq(&self, v: &DVector<f64>) -> f64 {
        let mut z = v.clone();
        self.factor.l_dirty().solve_lower_triangular_mut(&mut z);
        z.norm_squared()
    }

    /// `max_k x_kᵀ A(λ)⁻¹ x_k`, the G-optimality criterion.
    pub fn max_arm_variance(&self) -> f64 {
        self.arms.arms().iter().map(|x| self.mahalanobis_sq(x)).fold(0.0, f64::max)
    }
}

impl fmt::Debug for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Design").field("weights", &self.weights).finish()
    }
}

/// `vᵀ A(λ)⁻¹ v` for the given design.
pub fn mahalanobis_sq(v: &DVector<f64>, design: &Design) -> f64 {
    design.mahalanobis_sq(v)
}

/// `w·a + (1−w)·b`, with the covariance rebuilt from the mixed weights.
pub fn mix(a: &Design, b: &Design, w: f64) -> Result<Design> {
    if a.weights.len() != b.weights.len() || a.arms.dim() != b.arms.dim() {
        return Err(Error::Shape { expected: a.weights.len(), found: b.weights.len() });
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Precondition(format!("mixing weight {w} outside [0, 1]")));
    }
    let mut weights: Vec<f64> =
        a.weights.iter().zip(&b.weights).map(|(x, y)| w * x + (1.0 - w) * y).collect();
    normalize(&mut weights);
    Design::new(a.arms.clone(), weights)
}

/// Rescale onto the simplex; used after arithmetic that can drift by an ulp.
pub(crate) fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total != 1.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
}

pub(crate) fn covariance(arms: &ArmSet, weights: &[f64]) -> DMatrix<f64> {
    let d = arms.dim();
    let mut a = DMatrix::zeros(d, d);
    for (x, &w) in arms.arms().iter().zip(weights) {
        if w > 0.0 {
            a.ger(w, x, x, 1.0);
        }
    }
    a
}

/// Adds `REGULARIZATION · tr(A)/d` to the diagonal and factors.
pub(crate) fn factorize(a: &DMatrix<f64>) -> Option<(f64, Cholesky<f64, Dyn>)> {
    let d = a.nrows();
    let reg = REGULARIZATION * a.trace() / d as f64;
    if !reg.is_finite() || reg <= 0.0 {
        return None;
    }
    let mut m = a.clone();
    for i in 0..d {
        m[(i, i)] += reg;
    }
    Cholesky::new(m).map(|f| (reg, f))
}

fn summarize(weights: &[f64]) -> String {
    let shown: Vec<String> = weights.iter().take(8).map(|w| format!("{w:.3e}")).collect();
    let tail = if weights.len() > 8 { ", …" } else { "" };
    format!("[{}{}]", shown.join(", "), tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    }

    #[test]
    fn rejects_bad_arm_sets() {
        assert!(matches!(ArmSet::new(vec![vec![1.0, 0.0]]), Err(Error::TooFewArms(1))));
        assert!(matches!(
            ArmSet::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]]),
            Err(Error::RankDeficient { dim: 2, rank: 1 })
        ));
        assert!(matches!(
            ArmSet::new(vec![vec![1.0, f64::NAN], vec![0.0, 1.0]]),
            Err(Error::NonFiniteArm { index: 0 })
        ));
        assert!(matches!(
            ArmSet::new(vec![vec![1.0, 0.0], vec![1.0]]),
            Err(Error::RaggedArms { .. })
        ));
    }

    #[test]
    fn mahalanobis_closed_forms() {
        let arms = Arc::new(ArmSet::canonical(2).unwrap());
        let uniform = Design::uniform(arms.clone()).unwrap();
        assert_close!(uniform.mahalanobis_sq(&e(2, 0)), 2.0, 1e-8);
        assert_eq!(mahalanobis_sq(&DVector::zeros(2), &uniform), 0.0);

        let skewed = Design::new(arms, vec![0.75, 0.25]).unwrap();
        let v = e(2, 0) - e(2, 1);
        assert_close!(skewed.mahalanobis_sq(&v), 16.0 / 3.0, 1e-8);
    }

    #[test]
    fn design_validates_weights() {
        let arms = Arc::new(ArmSet::canonical(2).unwrap());
        assert!(Design::new(arms.clone(), vec![0.5]).is_err());
        assert!(Design::new(arms.clone(), vec![0.7, 0.7]).is_err());
        assert!(Design::new(arms.clone(), vec![1.5, -0.5]).is_err());
        // a point mass on e1 leaves e2 unsupported; the ridge keeps it factorable
        let point = Design::new(arms, vec![1.0, 0.0]).unwrap();
        assert!(point.mahalanobis_sq(&e(2, 1)) > 1e8);
    }

    #[test]
    fn mix_cases() {
        let arms = Arc::new(ArmSet::canonical(2).unwrap());
        let a = Design::new(arms.clone(), vec![1.0, 0.0]).unwrap();
        let b = Design::new(arms.clone(), vec![0.0, 1.0]).unwrap();
        assert_eq!(mix(&a, &b, 0.5).unwrap().weights(), &[0.5, 0.5]);
        assert_eq!(mix(&a, &b, 0.0).unwrap().weights(), b.weights());

        let arms3 = Arc::new(ArmSet::canonical(3).unwrap());
        let a = Design::new(arms3.clone(), vec![7.0 / 18.0, 7.0 / 18.0, 2.0 / 9.0]).unwrap();
        let b = Design::uniform(arms3).unwrap();
        let m = mix(&a, &b, 0.5).unwrap();
        for (got, want) in m.weights().iter().zip([13.0 / 36.0, 13.0 / 36.0, 5.0 / 18.0]) {
            assert_close!(*got, want, 1e-12);
        }
        let other = Design::uniform(Arc::new(ArmSet::canonical(2).unwrap())).unwrap();
        assert!(matches!(mix(&m, &other, 0.5), Err(Error::Shape { .. })));
    }

    #[test]
    fn covariance_matches_weights() {
        let arms = Arc::new(
            ArmSet::new(vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.3, -0.7]]).unwrap(),
        );
        let d = Design::new(arms.clone(), vec![0.2, 0.5, 0.3]).unwrap();
        let mut manual = DMatrix::zeros(2, 2);
        for (k, w) in d.weights().iter().enumerate() {
            let x = arms.arm(k);
            manual += *w * x * x.transpose();
        }
        assert!((d.covariance() - manual).abs().max() < 1e-12);
    }

    #[test]
    fn ranking_breaks_ties_by_index() {
        let arms = ArmSet::canonical(3).unwrap();
        let theta = DVector::from_vec(vec![0.2, 0.5, 0.5]);
        assert_eq!(arms.ranking(&theta), vec![1, 2, 0]);
        assert_eq!(arms.best_arm(&theta), 1);
    }
}
