use std::f64::consts::TAU;

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    Stationary,
    Oscillating,
    Malicious,
    Periodic,
}

#[derive(Clone, Debug)]
enum Form {
    Constant(DVector<f64>),
    Sinusoid {
        base: DVector<f64>,
        amplitude: DVector<f64>,
        phase: DVector<f64>,
        period: usize,
    },
    Switch {
        early: DVector<f64>,
        late: DVector<f64>,
        last_early: usize,
    },
    Cycle {
        phases: Vec<DVector<f64>>,
        repeats: usize,
    },
}

/// Reward parameters `θ_1, …, θ_T`, fixed before the game starts. All
/// randomness is drawn by the constructors and stored, so `theta_at` is a
/// pure function of `t`.
#[derive(Clone, Debug)]
pub struct ParameterSequence {
    kind: SequenceKind,
    horizon: usize,
    form: Form,
    indicator: Option<Vec<f64>>,
}

impl ParameterSequence {
    pub fn stationary(theta: DVector<f64>, horizon: usize) -> Self {
        Self { kind: SequenceKind::Stationary, horizon, form: Form::Constant(theta), indicator: None }
    }

    /// `θ_{t,i} = base_i + amplitude_i · sin(2πt/L + phase_i)`.
    pub fn sinusoid(
        kind: SequenceKind,
        base: DVector<f64>,
        amplitude: DVector<f64>,
        phase: DVector<f64>,
        period: usize,
        horizon: usize,
    ) -> Result<Self> {
        if period == 0 || horizon == 0 {
            return Err(Error::Precondition("period and horizon must be positive".into()));
        }
        let d = base.len();
        for v in [&amplitude, &phase] {
            if v.len() != d {
                return Err(Error::Shape { expected: d, found: v.len() });
            }
        }
        Ok(Self { kind, horizon, form: Form::Sinusoid { base, amplitude, phase, period }, indicator: None })
    }

    /// `early` for `t ≤ last_early`, `late` afterwards.
    pub fn switching(
        early: DVector<f64>,
        late: DVector<f64>,
        last_early: usize,
        horizon: usize,
    ) -> Result<Self> {
        if early.len() != late.len() {
            return Err(Error::Shape { expected: early.len(), found: late.len() });
        }
        Ok(Self {
            kind: SequenceKind::Malicious,
            horizon,
            form: Form::Switch { early, late, last_early },
            indicator: None,
        })
    }

    /// Each phase repeats `repeats` times, cycling through `phases`.
    pub fn periodic(phases: Vec<DVector<f64>>, repeats: usize, horizon: usize) -> Result<Self> {
        if phases.is_empty() || repeats == 0 {
            return Err(Error::Precondition("periodic sequence needs phases and L >= 1".into()));
        }
        let d = phases[0].len();
        if let Some(p) = phases.iter().find(|p| p.len() != d) {
            return Err(Error::Shape { expected: d, found: p.len() });
        }
        if phases.len() == 1 {
            return Ok(Self::stationary(phases.into_iter().next().unwrap(), horizon));
        }
        Ok(Self { kind: SequenceKind::Periodic, horizon, form: Form::Cycle { phases, repeats }, indicator: None })
    }

    pub(crate) fn with_indicator(mut self, indicator: Vec<f64>) -> Self {
        self.indicator = Some(indicator);
        self
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        match &self.form {
            Form::Constant(t) => t.len(),
            Form::Sinusoid { base, .. } => base.len(),
            Form::Switch { early, .. } => early.len(),
            Form::Cycle { phases, .. } => phases[0].len(),
        }
    }

    /// Per-coordinate on/off draws of an oscillating sequence.
    pub fn indicator(&self) -> Option<&[f64]> {
        self.indicator.as_deref()
    }

    /// Per-coordinate phase offsets of a sinusoidal sequence.
    pub fn phase_offsets(&self) -> Option<&DVector<f64>> {
        match &self.form {
            Form::Sinusoid { phase, .. } => Some(phase),
            _ => None,
        }
    }

    pub fn period(&self) -> Option<usize> {
        match &self.form {
            Form::Sinusoid { period, .. } => Some(*period),
            Form::Cycle { repeats, phases } => Some(repeats * phases.len()),
            _ => None,
        }
    }

    /// `θ_t` for `1 ≤ t ≤ T`.
    pub fn theta_at(&self, t: usize) -> Result<DVector<f64>> {
        if t == 0 || t > self.horizon {
            return Err(Error::RoundOutOfRange { t, horizon: self.horizon });
        }
        Ok(match &self.form {
            Form::Constant(theta) => theta.clone(),
            Form::Sinusoid { base, amplitude, phase, period } => {
                let angle = TAU * t as f64 / *period as f64;
                DVector::from_fn(base.len(), |i, _| {
                    base[i] + amplitude[i] * (angle + phase[i]).sin()
                })
            }
            Form::Switch { early, late, last_early } => {
                if t <= *last_early {
                    early.clone()
                } else {
                    late.clone()
                }
            }
            Form::Cycle { phases, repeats } => {
                let idx = ((t - 1) % (repeats * phases.len())) / repeats;
                phases[idx].clone()
            }
        })
    }

    /// `θ̄_T = (1/T) Σ_t θ_t` by direct summation.
    pub fn mean_theta(&self) -> DVector<f64> {
        let mut sum = DVector::zeros(self.dim());
        for t in 1..=self.horizon {
            sum += self.theta_at(t).expect("t within horizon");
        }
        sum / self.horizon as f64
    }
}
