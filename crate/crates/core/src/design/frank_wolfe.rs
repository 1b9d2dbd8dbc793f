//! Frank-Wolfe for `inf_λ max_{y∈Y} ‖y‖²_{A(λ)⁻¹}` over the simplex of arms.
//!
//! Every direction set used in this crate is built from arms: the arms
//! themselves (G-optimal), pairwise differences of an active subset
//! (XY-optimal), or scaled differences against a reference arm (the
//! complexity measures). A [`Direction`] names the arms involved, so each
//! iteration only needs the Gram matrix `G = X A(λ)⁻¹ Xᵀ`:
//!
//! * the value of `y = c·(x_a − x_b)` is `c²(G_aa + G_bb − 2G_ab)`;
//! * the subgradient of the max at `y` has coordinates `−(x_kᵀ A⁻¹ y)²`,
//!   which is `−c²(G_ka − G_kb)²`.
//!
//! The vertex with the most negative subgradient coordinate receives a step
//! of size `1/(2(i+2))` at iteration `i`. The objective is non-smooth, so the
//! best iterate seen is returned rather than the last.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{covariance, factorize, normalize, ArmSet, Design};
use crate::error::{Error, Result};

/// `scale · (x_plus − x_minus)`, or `scale · x_plus` when `minus` is `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    pub plus: usize,
    pub minus: Option<usize>,
    pub scale: f64,
}

impl Direction {
    pub fn arm(k: usize) -> Self {
        Self { plus: k, minus: None, scale: 1.0 }
    }

    pub fn difference(a: usize, b: usize) -> Self {
        Self { plus: a, minus: Some(b), scale: 1.0 }
    }

    pub fn scaled(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub fn vector(&self, arms: &ArmSet) -> DVector<f64> {
        let mut v = arms.arm(self.plus).clone();
        if let Some(b) = self.minus {
            v -= arms.arm(b);
        }
        v * self.scale
    }

    fn value(&self, gram: &DMatrix<f64>) -> f64 {
        let a = self.plus;
        let raw = match self.minus {
            None => gram[(a, a)],
            Some(b) => gram[(a, a)] + gram[(b, b)] - 2.0 * gram[(a, b)],
        };
        self.scale * self.scale * raw.max(0.0)
    }

    /// `x_kᵀ A⁻¹ y / scale`.
    fn projection(&self, gram: &DMatrix<f64>, k: usize) -> f64 {
        match self.minus {
            None => gram[(k, self.plus)],
            Some(b) => gram[(k, self.plus)] - gram[(k, b)],
        }
    }
}

/// All unordered pairs of `active`, sorted by `(i, j)` with `i < j`.
pub fn pair_directions(active: &[usize]) -> Vec<Direction> {
    let mut sorted = active.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len() * sorted.len().saturating_sub(1) / 2);
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            out.push(Direction::difference(a, b));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FwSettings {
    pub iters: usize,
    /// Stop once the best objective improved by less than this fraction over
    /// the last `window` iterations.
    pub tol: f64,
    pub window: usize,
}

impl Default for FwSettings {
    fn default() -> Self {
        Self { iters: 5000, tol: 1e-7, window: 50 }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub design: Design,
    /// Objective achieved by `design`.
    pub value: f64,
    pub iterations: usize,
    /// Objective of every iterate, in order (only filled by [`minimax_design_traced`]).
    pub trace: Vec<f64>,
}

/// Approximately solve `inf_λ max_{y ∈ directions} ‖y‖²_{A(λ)⁻¹}` starting
/// from the uniform design.
pub fn minimax_design(
    arms: &Arc<ArmSet>,
    directions: &[Direction],
    settings: &FwSettings,
) -> Result<Solution> {
    solve(arms, directions, settings, false)
}

/// As [`minimax_design`], also recording the objective of every iterate.
pub fn minimax_design_traced(
    arms: &Arc<ArmSet>,
    directions: &[Direction],
    settings: &FwSettings,
) -> Result<Solution> {
    solve(arms, directions, settings, true)
}

/// G-optimal design: `inf_λ max_x ‖x‖²_{A(λ)⁻¹}`. By Kiefer-Wolfowitz the
/// optimum equals `d`.
pub fn g_optimal(arms: &Arc<ArmSet>, settings: &FwSettings) -> Result<Solution> {
    let directions: Vec<Direction> = (0..arms.len()).map(Direction::arm).collect();
    minimax_design(arms, &directions, settings)
}

/// XY-optimal design for the pairs of `active`, optimized over the full
/// simplex of arms.
pub fn xy_optimal(
    arms: &Arc<ArmSet>,
    active: &[usize],
    settings: &FwSettings,
) -> Result<Solution> {
    let directions = pair_directions(active);
    if directions.is_empty() {
        return Err(Error::Precondition(format!(
            "XY design needs at least 2 active arms, got {}",
            active.len()
        )));
    }
    if let Some(&bad) = active.iter().find(|&&k| k >= arms.len()) {
        return Err(Error::Precondition(format!("active arm {bad} out of range")));
    }
    minimax_design(arms, &directions, settings)
}

fn solve(
    arms: &Arc<ArmSet>,
    directions: &[Direction],
    settings: &FwSettings,
    record: bool,
) -> Result<Solution> {
    if settings.iters == 0 {
        return Err(Error::Precondition("Frank-Wolfe needs at least one iteration".into()));
    }
    if directions.is_empty() {
        return Err(Error::Precondition("empty direction set".into()));
    }
    let k = arms.len();
    let xt = arms.matrix().transpose();
    let mut weights = vec![1.0 / k as f64; k];
    let mut best_weights = weights.clone();
    let mut best_value = f64::INFINITY;
    let mut history: Vec<f64> = Vec::with_capacity(settings.iters.min(100_000));
    let mut trace = Vec::new();
    let mut iterations = 0;

    for i in 0..settings.iters {
        iterations = i + 1;
        let gram = gram_matrix(arms, &xt, &weights)?;

        let mut top = 0;
        let mut value = directions[0].value(&gram);
        for (j, dir) in directions.iter().enumerate().skip(1) {
            let v = dir.value(&gram);
            if v > value {
                value = v;
                top = j;
            }
        }
        if !value.is_finite() {
            return Err(Error::NonFinite("Frank-Wolfe objective"));
        }
        if record {
            trace.push(value);
        }
        if value < best_value {
            best_value = value;
            best_weights.copy_from_slice(&weights);
        }
        history.push(best_value);
        if i >= settings.window {
            let before = history[i - settings.window];
            if before - best_value <= settings.tol * before.abs() {
                break;
            }
        }

        let dir = directions[top];
        let mut vertex = 0;
        let mut score = -1.0;
        for kk in 0..k {
            let s = dir.projection(&gram, kk).powi(2);
            if s > score {
                score = s;
                vertex = kk;
            }
        }
        let step = 1.0 / (2.0 * (i as f64 + 2.0));
        weights.iter_mut().for_each(|w| *w *= 1.0 - step);
        weights[vertex] += step;
    }

    normalize(&mut best_weights);
    let design = Design::new(arms.clone(), best_weights)?;
    Ok(Solution { design, value: best_value, iterations, trace })
}

/// `X A(λ)⁻¹ Xᵀ` through a triangular solve against the regularized factor.
fn gram_matrix(arms: &ArmSet, xt: &DMatrix<f64>, weights: &[f64]) -> Result<DMatrix<f64>> {
    let cov = covariance(arms, weights);
    let (_, factor) = factorize(&cov).ok_or_else(|| Error::SingularDesign {
        design: "Frank-Wolfe iterate".into(),
    })?;
    let z = factor.l_dirty().solve_lower_triangular(xt).ok_or_else(|| Error::SingularDesign {
        design: "Frank-Wolfe iterate".into(),
    })?;
    Ok(z.tr_mul(&z))
}
