//! JSON experiment descriptions.
//!
//! ```json
//! {
//!   "name": "malicious",
//!   "instance": {"kind": "malicious", "d": 10, "seed": 1},
//!   "algorithms": [{"name": "p1_rage", "m": 15}, {"name": "g_bai"}],
//!   "T": 10000,
//!   "trials": 500,
//!   "noise": {"kind": "uniform"},
//!   "sweep": {"param": "s", "values": [0, 3, 6, 9]},
//!   "seed": 0,
//!   "threads": 8,
//!   "timing": false,
//!   "clip_rewards": false,
//!   "out": "malicious.csv"
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{AlgoConfig, AlgorithmKind};
use crate::error::{Error, Result};
use crate::instances::NoiseModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// `{e_1, …, e_d, x′}` with `θ* = 2e_1`, optionally oscillated.
    Soare,
    /// Layouts of `D` two-choice slots, optionally oscillated.
    Multivariate,
    /// Soare arms (`ω = 0.5`) with a parameter switch at `T/3`.
    Malicious,
    /// Soare arms (`ω = 0.5`) with a sinusoid on the last coordinate.
    Benchmark,
    /// Random unit arms with a repeating sequence of daily parameters.
    Weekly,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Soare => "soare",
            Self::Multivariate => "multivariate",
            Self::Malicious => "malicious",
            Self::Benchmark => "benchmark",
            Self::Weekly => "weekly",
        }
    }
}

/// Instance parameters. Fields a kind does not use are ignored; missing
/// ones fall back to the defaults in [`InstanceSpec::resolved`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Number of slots for multivariate instances.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    /// Oscillation scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Oscillation period, or rounds per day for weekly instances.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// Daily parameters per week.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<usize>,
    /// Number of arms for weekly instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arms: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

/// [`InstanceSpec`] with every field filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedInstance {
    pub kind: InstanceKind,
    pub d: usize,
    pub omega: f64,
    pub slots: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub s: f64,
    pub period: usize,
    pub phases: usize,
    pub arms: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind) -> Self {
        Self {
            kind,
            d: None,
            omega: None,
            slots: None,
            alpha1: None,
            alpha2: None,
            s: None,
            period: None,
            phases: None,
            arms: None,
            seed: 0,
        }
    }

    pub fn resolved(&self) -> ResolvedInstance {
        let (d, omega, s, period) = match self.kind {
            InstanceKind::Soare => (10, 0.1, 0.0, 900),
            InstanceKind::Multivariate => (0, 0.0, 0.0, 900),
            InstanceKind::Malicious => (10, 0.5, 0.0, 1),
            InstanceKind::Benchmark => (10, 0.5, 0.0, 200),
            InstanceKind::Weekly => (24, 0.0, 0.0, 1000),
        };
        ResolvedInstance {
            kind: self.kind,
            d: self.d.unwrap_or(d),
            omega: self.omega.unwrap_or(omega),
            slots: self.slots.unwrap_or(4),
            alpha1: self.alpha1.unwrap_or(1.0),
            alpha2: self.alpha2.unwrap_or(0.5),
            s: self.s.unwrap_or(s),
            period: self.period.unwrap_or(period),
            phases: self.phases.unwrap_or(7),
            arms: self.arms.unwrap_or(self.d.unwrap_or(d)),
            seed: self.seed,
        }
    }

    /// Flat `key=value` record, space separated, keys in a fixed order.
    pub fn to_record(&self) -> String {
        let mut out = vec![format!("kind={}", self.kind.name())];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(format!("{k}={v}"));
            }
        };
        push("d", self.d.map(|v| v.to_string()));
        push("omega", self.omega.map(fmt_f64));
        push("D", self.slots.map(|v| v.to_string()));
        push("alpha1", self.alpha1.map(fmt_f64));
        push("alpha2", self.alpha2.map(fmt_f64));
        push("s", self.s.map(fmt_f64));
        push("L", self.period.map(|v| v.to_string()));
        push("phases", self.phases.map(|v| v.to_string()));
        push("arms", self.arms.map(|v| v.to_string()));
        push("seed", Some(self.seed.to_string()));
        out.join(" ")
    }

    pub fn from_record(record: &str) -> Result<Self> {
        let mut spec: Option<Self> = None;
        let mut rest = Vec::new();
        for token in record.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("record token {token:?} is not key=value")))?;
            if key == "kind" {
                let kind: InstanceKind = serde_json::from_value(value.into())
                    .map_err(|_| Error::Config(format!("unknown instance kind {value:?}")))?;
                spec = Some(Self::new(kind));
            } else {
                rest.push((key, value));
            }
        }
        let mut spec = spec.ok_or_else(|| Error::Config("record has no kind".into()))?;
        for (key, value) in rest {
            match key {
                "d" => spec.d = Some(parse(key, value)?),
                "omega" => spec.omega = Some(parse(key, value)?),
                "D" => spec.slots = Some(parse(key, value)?),
                "alpha1" => spec.alpha1 = Some(parse(key, value)?),
                "alpha2" => spec.alpha2 = Some(parse(key, value)?),
                "s" => spec.s = Some(parse(key, value)?),
                "L" => spec.period = Some(parse(key, value)?),
                "phases" => spec.phases = Some(parse(key, value)?),
                "arms" => spec.arms = Some(parse(key, value)?),
                "seed" => spec.seed = parse(key, value)?,
                _ => return Err(Error::Config(format!("unknown record key {key:?}"))),
            }
        }
        Ok(spec)
    }
}

fn fmt_f64(v: f64) -> String {
    // `{:?}` prints the shortest representation that parses back exactly.
    format!("{v:?}")
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

/// One algorithm entry; unset fields take [`AlgoConfig`] defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub name: AlgorithmKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch_sync: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fw_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fw_tol: Option<f64>,
}

impl AlgorithmSpec {
    pub fn new(name: AlgorithmKind) -> Self {
        Self { name, m: None, mix_weight: None, epoch_sync: None, fw_iters: None, fw_tol: None }
    }

    pub fn config(&self) -> AlgoConfig {
        let d = AlgoConfig::default();
        AlgoConfig {
            m: self.m.unwrap_or(d.m),
            fw_iters: self.fw_iters.unwrap_or(d.fw_iters),
            fw_tol: self.fw_tol.unwrap_or(d.fw_tol),
            epoch_sync: self.epoch_sync.unwrap_or(d.epoch_sync),
            mix_weight: self.mix_weight.unwrap_or(d.mix_weight),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "s")]
    Scale,
    #[serde(rename = "L")]
    Period,
    #[serde(rename = "T")]
    Horizon,
    #[serde(rename = "omega")]
    Omega,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Scale => "s",
            Self::Period => "L",
            Self::Horizon => "T",
            Self::Omega => "omega",
        }
    }

    fn integral(self) -> bool {
        matches!(self, Self::Period | Self::Horizon)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Instance id written to the CSV; defaults to the instance kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub instance: InstanceSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub trials: usize,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    /// Seed for the per-trial streams.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; all available cores when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Record wall-clock time per row. Off by default so that output files
    /// are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub clip_rewards: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn instance_id(&self) -> &str {
        self.name.as_deref().unwrap_or(self.instance.kind.name())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.horizon < 1 {
            return Err(Error::Config("T must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms listed".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        for algo in &self.algorithms {
            algo.config().validate()?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config(format!("sweep over {} has no values", sweep.param)));
            }
            for &v in &sweep.values {
                let bad = !v.is_finite()
                    || (sweep.param.integral() && (v < 1.0 || v.fract() != 0.0))
                    || (sweep.param == SweepParam::Scale && v < 0.0);
                if bad {
                    return Err(Error::Config(format!("invalid {} value {v}", sweep.param)));
                }
            }
        }
        if let NoiseModel::TruncatedGaussian { sigma } = self.noise {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return Err(Error::Config(format!("noise sigma {sigma} must be >= 0")));
            }
        }
        Ok(())
    }

    /// Sweep points as `(value, instance, T)`; a config without a sweep has
    /// one point with no value.
    pub fn points(&self) -> Vec<(Option<f64>, InstanceSpec, usize)> {
        let Some(sweep) = &self.sweep else {
            return vec![(None, self.instance.clone(), self.horizon)];
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut spec = self.instance.clone();
                let mut horizon = self.horizon;
                match sweep.param {
                    SweepParam::Scale => spec.s = Some(v),
                    SweepParam::Period => spec.period = Some(v as usize),
                    SweepParam::Horizon => horizon = v as usize,
                    SweepParam::Omega => spec.omega = Some(v),
                }
                (Some(v), spec, horizon)
            })
            .collect()
    }
}
