use crate::algorithms::AlgorithmKind;
use crate::error::{Error, Result};
use crate::instances::NoiseModel;

use super::config::{AlgorithmSpec, ExperimentConfig, InstanceKind, InstanceSpec, Sweep, SweepParam};

pub const PRESET_NAMES: [&str; 8] = [
    "soare_stationary",
    "multivariate_s_sweep",
    "multivariate_L_sweep",
    "malicious",
    "benchmark_s_sweep",
    "benchmark_L_sweep",
    "weekly_periodic",
    "multivariate_stationary",
];

pub const DEFAULT_TRIALS: usize = 1000;

const ROBUST: [AlgorithmKind; 6] = [
    AlgorithmKind::GBai,
    AlgorithmKind::P1Rage,
    AlgorithmKind::P1Peace,
    AlgorithmKind::MixedPeace,
    AlgorithmKind::PeaceBaseline,
    AlgorithmKind::Uniform,
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let sweep = |param, values: Vec<f64>| Some(Sweep { param, values });
    let s_grid = (0..=9).map(f64::from).collect::<Vec<_>>();
    let l_grid = (1..=10).map(|i| f64::from(300 * i)).collect::<Vec<_>>();
    let (instance, algorithms, horizon, sweep): (InstanceSpec, &[AlgorithmKind], usize, _) =
        match name {
            "soare_stationary" => {
                let mut spec = InstanceSpec::new(InstanceKind::Soare);
                spec.d = Some(10);
                spec.omega = Some(0.1);
                let t_grid = (1..=5).map(|i| f64::from(1000 * i)).collect();
                (spec, &ROBUST, 5000, sweep(SweepParam::Horizon, t_grid))
            }
            "multivariate_s_sweep" => {
                let spec = multivariate(Some(900));
                (spec, &ROBUST, 10_000, sweep(SweepParam::Scale, s_grid))
            }
            "multivariate_L_sweep" => {
                let mut spec = multivariate(None);
                spec.s = Some(2.0);
                (spec, &ROBUST, 10_000, sweep(SweepParam::Period, l_grid))
            }
            "multivariate_stationary" => (multivariate(None), &ROBUST, 10_000, None),
            "malicious" => {
                let mut spec = InstanceSpec::new(InstanceKind::Malicious);
                spec.d = Some(10);
                let algos: &[AlgorithmKind] =
                    &[AlgorithmKind::P1Rage, AlgorithmKind::GBai, AlgorithmKind::PeaceBaseline];
                (spec, algos, 10_000, None)
            }
            "benchmark_s_sweep" => {
                let mut spec = InstanceSpec::new(InstanceKind::Benchmark);
                spec.d = Some(10);
                spec.period = Some(200);
                (spec, &ROBUST, 10_000, sweep(SweepParam::Scale, s_grid))
            }
            "benchmark_L_sweep" => {
                let mut spec = InstanceSpec::new(InstanceKind::Benchmark);
                spec.d = Some(10);
                spec.s = Some(1.0);
                (spec, &ROBUST, 10_000, sweep(SweepParam::Period, l_grid))
            }
            "weekly_periodic" => {
                let mut spec = InstanceSpec::new(InstanceKind::Weekly);
                spec.d = Some(24);
                spec.arms = Some(24);
                spec.phases = Some(7);
                spec.period = Some(1000);
                (spec, &ROBUST, 21_000, None)
            }
            _ => {
                return Err(Error::UnknownPreset {
                    name: name.to_string(),
                    valid: PRESET_NAMES.join(", "),
                })
            }
        };
    let mut instance = instance;
    instance.seed = 1;
    Ok(ExperimentConfig {
        name: Some(name.to_string()),
        instance,
        algorithms: algorithms.iter().map(|&k| AlgorithmSpec::new(k)).collect(),
        horizon,
        trials: DEFAULT_TRIALS,
        noise: NoiseModel::default(),
        sweep,
        seed: 0,
        threads: None,
        timing: false,
        clip_rewards: false,
        out: None,
    })
}

fn multivariate(period: Option<usize>) -> InstanceSpec {
    let mut spec = InstanceSpec::new(InstanceKind::Multivariate);
    spec.slots = Some(4);
    spec.alpha1 = Some(1.0);
    spec.alpha2 = Some(0.5);
    spec.period = period;
    spec
}
