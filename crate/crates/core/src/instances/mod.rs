//! Arm sets, reward-parameter sequences and noise for the experiment families:
//! the Soare benchmark, multivariate testing with random oscillation, the
//! malicious switching instance, the structured benchmark oscillation, and a
//! synthetic weekly-periodic click-through analogue.

mod noise;
mod sequence;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;

use crate::design::ArmSet;
use crate::error::{Error, Result};

pub use noise::NoiseModel;
pub use sequence::{ParameterSequence, SequenceKind};

/// Default cap on `2^D` arms for multivariate instances.
pub const MAX_MULTIVARIATE_ARMS: usize = 1 << 12;

/// Redraw budget for randomized instance constructors.
pub const MAX_REDRAWS: usize = 100;

/// Gaps of every arm under an averaged parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct GapProfile {
    pub best_index: usize,
    pub runner_up: usize,
    /// `Δ_k` per arm in arm order; the best arm carries the runner-up's gap.
    pub gaps: Vec<f64>,
    pub min_gap: f64,
}

impl GapProfile {
    /// Gaps in best-to-worst order, `Δ₍₁₎ = Δ₍₂₎ ≤ … ≤ Δ₍K₎`.
    pub fn sorted_gaps(&self) -> Vec<f64> {
        let mut g = self.gaps.clone();
        g.sort_by(f64::total_cmp);
        g
    }
}

/// Gap of each arm relative to the unique best arm under `theta_bar`.
pub fn gap_profile(arms: &ArmSet, theta_bar: &DVector<f64>) -> Result<GapProfile> {
    if theta_bar.len() != arms.dim() {
        return Err(Error::Shape { expected: arms.dim(), found: theta_bar.len() });
    }
    let values = arms.values(theta_bar);
    let order = arms.ranking(theta_bar);
    let (best, runner_up) = (order[0], order[1]);
    if values[runner_up] >= values[best] {
        return Err(Error::NonUniqueBest { first: best, second: runner_up, value: values[best] });
    }
    let gaps: Vec<f64> = (0..arms.len())
        .map(|k| {
            if k == best {
                values[best] - values[runner_up]
            } else {
                values[best] - values[k]
            }
        })
        .collect();
    let min_gap = values[best] - values[runner_up];
    Ok(GapProfile { best_index: best, runner_up, gaps, min_gap })
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// `{e_1, …, e_d, x′}` with `x′ = cos(ω)e_1 + sin(ω)e_2`.
pub fn soare_arms(d: usize, omega: f64) -> Result<ArmSet> {
    if d < 2 {
        return Err(Error::Precondition(format!("Soare instance needs d >= 2, got {d}")));
    }
    if !(0.0..FRAC_PI_2).contains(&omega) {
        return Err(Error::Precondition(format!("omega must lie in (0, pi/2), got {omega}")));
    }
    let mut arms: Vec<Vec<f64>> = (0..d).map(|i| unit(d, i)).collect();
    let mut extra = vec![0.0; d];
    extra[0] = omega.cos();
    extra[1] = omega.sin();
    arms.push(extra);
    ArmSet::new(arms)
}

/// The stationary benchmark: Soare arms with `θ* = 2e_1`, so `x′` trails
/// `e_1` by `2 − 2cos ω`.
pub fn soare_instance(d: usize, omega: f64) -> Result<(ArmSet, DVector<f64>)> {
    let arms = soare_arms(d, omega)?;
    let theta = DVector::from_vec(unit(d, 0)) * 2.0;
    gap_profile(&arms, &theta)?;
    Ok((arms, theta))
}

/// Feature vector of layout `w ∈ {−1, 1}^D`:
/// `(1, α₁w_1, …, α₁w_D, α₂w_1w_2, …, α₂w_{D−1}w_D)`.
pub fn layout_features(layout: &[f64], alpha1: f64, alpha2: f64) -> Vec<f64> {
    let slots = layout.len();
    let mut x = Vec::with_capacity(1 + slots + slots * (slots.saturating_sub(1)) / 2);
    x.push(1.0);
    x.extend(layout.iter().map(|w| alpha1 * w));
    for k in 0..slots {
        for l in k + 1..slots {
            x.push(alpha2 * layout[k] * layout[l]);
        }
    }
    x
}

/// One arm per layout of `D` two-choice slots; bit `j` of the arm index set
/// means `w_j = +1`.
pub fn multivariate_arms(slots: usize, alpha1: f64, alpha2: f64, max_arms: usize) -> Result<ArmSet> {
    if slots < 2 {
        return Err(Error::Precondition(format!("multivariate instance needs D >= 2, got {slots}")));
    }
    if slots >= usize::BITS as usize - 1 || (1usize << slots) > max_arms {
        return Err(Error::TooLarge(format!("2^{slots} arms exceeds the cap of {max_arms}")));
    }
    let arms = (0..1usize << slots)
        .map(|idx| {
            let layout: Vec<f64> =
                (0..slots).map(|j| if (idx >> j) & 1 == 1 { 1.0 } else { -1.0 }).collect();
            layout_features(&layout, alpha1, alpha2)
        })
        .collect();
    ArmSet::new(arms)
}

/// Multivariate-testing arms with `θ*` drawn uniformly from `[−0.1, 0.1]^d`,
/// redrawn until the best arm is unique.
pub fn multivariate_instance<R: Rng + ?Sized>(
    slots: usize,
    alpha1: f64,
    alpha2: f64,
    max_arms: usize,
    rng: &mut R,
) -> Result<(ArmSet, DVector<f64>)> {
    let arms = multivariate_arms(slots, alpha1, alpha2, max_arms)?;
    for _ in 0..MAX_REDRAWS {
        let theta = DVector::from_fn(arms.dim(), |_, _| rng.random_range(-0.1..=0.1));
        if gap_profile(&arms, &theta).is_ok() {
            return Ok((arms, theta));
        }
    }
    Err(Error::InstanceConstruction {
        attempts: MAX_REDRAWS,
        config: format!("multivariate D={slots} alpha1={alpha1} alpha2={alpha2}"),
    })
}

/// `θ_{t,i} = θ*_i + s·I_i·‖θ*‖_∞·sin(2πt/L + φ_i)` with `I_i ~ Unif{0,1}` and
/// `φ_i ~ Unif[0, 2π]` drawn once. Draws are rejected until the averaged
/// parameter has the same unique best arm as `θ*`.
pub fn oscillating_sequence<R: Rng + ?Sized>(
    arms: &ArmSet,
    theta_star: &DVector<f64>,
    scale: f64,
    period: usize,
    horizon: usize,
    rng: &mut R,
) -> Result<ParameterSequence> {
    if period == 0 || horizon == 0 || !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::Precondition(format!(
            "oscillation needs L >= 1, T >= 1, s >= 0 (got L={period}, T={horizon}, s={scale})"
        )));
    }
    let target = gap_profile(arms, theta_star)?.best_index;
    let sup = theta_star.amax();
    let d = theta_star.len();
    for _ in 0..MAX_REDRAWS {
        let indicator: Vec<f64> =
            (0..d).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
        let phase =
            DVector::from_fn(d, |_, _| rng.random_range(0.0..=std::f64::consts::TAU));
        let amplitude = DVector::from_fn(d, |i, _| scale * indicator[i] * sup);
        let seq = ParameterSequence::sinusoid(
            SequenceKind::Oscillating,
            theta_star.clone(),
            amplitude,
            phase,
            period,
            horizon,
        )?
        .with_indicator(indicator);
        if let Ok(profile) = gap_profile(arms, &seq.mean_theta()) {
            if profile.best_index == target {
                return Ok(seq);
            }
        }
    }
    Err(Error::InstanceConstruction {
        attempts: MAX_REDRAWS,
        config: format!("oscillating s={scale} L={period} T={horizon} d={d}"),
    })
}

/// Soare arms with `ω = 0.5`; `θ_t = (0, 1, …, 1)` for `t ≤ ⌊T/3⌋`, then
/// `(2, 0, …, 0)`. The averaged best arm is `e_1`, but early rounds favor the rest.
pub fn malicious_sequence(d: usize, horizon: usize) -> Result<(ArmSet, ParameterSequence)> {
    if horizon == 0 {
        return Err(Error::Precondition("malicious instance needs T >= 1".into()));
    }
    let arms = soare_arms(d, 0.5)?;
    let mut early = vec![1.0; d];
    early[0] = 0.0;
    let late = DVector::from_vec(unit(d, 0)) * 2.0;
    let seq =
        ParameterSequence::switching(DVector::from_vec(early), late, horizon / 3, horizon)?;
    Ok((arms, seq))
}

/// Soare arms with `ω = 0.5` and
/// `θ_t = (0.3, 0, …, 0, −s·sin(2πt/L) + 0.5)`.
pub fn benchmark_sequence(
    d: usize,
    scale: f64,
    period: usize,
    horizon: usize,
) -> Result<(ArmSet, ParameterSequence)> {
    let arms = soare_arms(d, 0.5)?;
    let mut base = vec![0.0; d];
    base[0] = 0.3;
    base[d - 1] = 0.5;
    let mut amplitude = DVector::zeros(d);
    amplitude[d - 1] = -scale;
    let seq = ParameterSequence::sinusoid(
        SequenceKind::Oscillating,
        DVector::from_vec(base),
        amplitude,
        DVector::zeros(d),
        period,
        horizon,
    )?;
    Ok((arms, seq))
}

/// `theta_at(t) = phases[⌊((t−1) mod (L·n)) / L⌋]`.
pub fn periodic_sequence(
    phases: Vec<DVector<f64>>,
    repeats: usize,
    horizon: usize,
) -> Result<ParameterSequence> {
    ParameterSequence::periodic(phases, repeats, horizon)
}

/// Synthetic weekly click-through analogue: `arms` random unit vectors in `ℝ^d`
/// (the best plus others trailing it by at least `0.05` under `θ*`), and
/// `days` daily parameters `θ* + Unif[−0.05, 0.05]^d` that keep the averaged
/// best arm.
pub fn weekly_instance<R: Rng + ?Sized>(
    d: usize,
    num_arms: usize,
    days: usize,
    repeats: usize,
    horizon: usize,
    rng: &mut R,
) -> Result<(ArmSet, ParameterSequence)> {
    const MIN_GAP: f64 = 0.05;
    if d < 2 || num_arms < d || days == 0 {
        return Err(Error::Precondition(format!(
            "weekly instance needs d >= 2, at least d arms and one day (d={d}, K={num_arms}, days={days})"
        )));
    }
    let random_unit = |rng: &mut R| -> DVector<f64> {
        let v = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.0 {
            v / n
        } else {
            DVector::from_vec(unit(d, 0))
        }
    };
    for _ in 0..MAX_REDRAWS {
        let theta = random_unit(rng);
        let pool: Vec<DVector<f64>> = (0..num_arms * 20).map(|_| random_unit(rng)).collect();
        let values: Vec<f64> = pool.iter().map(|x| x.dot(&theta)).collect();
        let top = crate::design::argmax(&values);
        let mut chosen = vec![pool[top].clone()];
        chosen.extend(
            pool.iter()
                .zip(&values)
                .filter(|(_, v)| values[top] - **v >= MIN_GAP)
                .map(|(x, _)| x.clone())
                .take(num_arms - 1),
        );
        if chosen.len() < num_arms {
            continue;
        }
        // place the best arm at a random position
        let slot = rng.random_range(0..num_arms);
        chosen.swap(0, slot);
        let Ok(arms) = ArmSet::new(chosen.iter().map(|x| x.as_slice().to_vec()).collect())
        else {
            continue;
        };
        let phases: Vec<DVector<f64>> = (0..days)
            .map(|_| &theta + DVector::from_fn(d, |_, _| rng.random_range(-MIN_GAP..=MIN_GAP)))
            .collect();
        let seq = ParameterSequence::periodic(phases, repeats, horizon)?;
        match gap_profile(&arms, &seq.mean_theta()) {
            Ok(p) if p.best_index == slot => return Ok((arms, seq)),
            _ => continue,
        }
    }
    Err(Error::InstanceConstruction {
        attempts: MAX_REDRAWS,
        config: format!("weekly d={d} K={num_arms} L={repeats} T={horizon}"),
    })
}

/// `xᵀθ_t + ε`, unclipped.
pub fn sample_reward<R: Rng + ?Sized>(
    seq: &ParameterSequence,
    noise: &NoiseModel,
    x: &DVector<f64>,
    t: usize,
    rng: &mut R,
) -> Result<f64> {
    let theta = seq.theta_at(t)?;
    Ok(x.dot(&theta) + noise.sample(rng))
}

/// An arm set and parameter sequence with the mean reward of every
/// `(round, arm)` pair tabulated, shared read-only by all trials.
#[derive(Debug)]
pub struct Environment {
    arms: Arc<ArmSet>,
    sequence: ParameterSequence,
    noise: NoiseModel,
    clip_rewards: bool,
    /// Row-major `T × K`.
    means: Vec<f64>,
    gaps: GapProfile,
}

impl Environment {
    pub fn new(arms: Arc<ArmSet>, sequence: ParameterSequence, noise: NoiseModel) -> Result<Self> {
        if sequence.dim() != arms.dim() {
            return Err(Error::Shape { expected: arms.dim(), found: sequence.dim() });
        }
        let gaps = gap_profile(&arms, &sequence.mean_theta())?;
        let k = arms.len();
        let mut means = Vec::with_capacity(sequence.horizon() * k);
        for t in 1..=sequence.horizon() {
            let theta = sequence.theta_at(t)?;
            means.extend(arms.values(&theta).iter());
        }
        Ok(Self { arms, sequence, noise, clip_rewards: false, means, gaps })
    }

    /// Clamp rewards to `[−1, 1]`.
    pub fn with_clipping(mut self, clip: bool) -> Self {
        self.clip_rewards = clip;
        self
    }

    pub fn arms(&self) -> &Arc<ArmSet> {
        &self.arms
    }

    pub fn sequence(&self) -> &ParameterSequence {
        &self.sequence
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn horizon(&self) -> usize {
        self.sequence.horizon()
    }

    /// Gaps under the averaged parameter; `best_index` is the ground truth.
    pub fn gaps(&self) -> &GapProfile {
        &self.gaps
    }

    pub fn best_arm(&self) -> usize {
        self.gaps.best_index
    }

    pub fn mean_reward(&self, t: usize, arm: usize) -> f64 {
        self.means[(t - 1) * self.arms.len() + arm]
    }

    pub fn reward<R: Rng + ?Sized>(&self, t: usize, arm: usize, rng: &mut R) -> f64 {
        let r = self.mean_reward(t, arm) + self.noise.sample(rng);
        if self.clip_rewards {
            r.clamp(-1.0, 1.0)
        } else {
            r
        }
    }
}
