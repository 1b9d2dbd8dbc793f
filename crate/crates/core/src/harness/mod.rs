//! Deterministic parallel Monte Carlo runner.
//!
//! Every trial draws from its own ChaCha8 stream keyed by
//! `(seed, sweep index, algorithm index, trial index)`, so results do not
//! depend on how trials are scheduled across workers. Instance randomness
//! uses separate streams keyed by the instance seed.

pub mod config;
pub mod output;
pub mod presets;
pub mod stats;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algorithms::{build, run_episode, DesignContext};
use crate::design::FwSettings;
use crate::error::{Error, Result};
use crate::instances::{
    benchmark_sequence, malicious_sequence, multivariate_instance, oscillating_sequence,
    soare_instance, weekly_instance, Environment, ParameterSequence, MAX_MULTIVARIATE_ARMS,
};

pub use config::{
    AlgorithmSpec, ExperimentConfig, InstanceKind, InstanceSpec, ResolvedInstance, Sweep,
    SweepParam,
};
pub use output::{csv_line, write_csv, write_csv_file, CSV_HEADER};
pub use presets::{preset, DEFAULT_TRIALS, PRESET_NAMES};
pub use stats::{wilson_ci, Z_95};

/// Stream tag separating instance randomness from trial streams.
const INSTANCE_STREAM: u64 = u64::MAX;

/// A 32-byte ChaCha seed from four little-endian words.
pub fn derive_seed(words: [u64; 4]) -> [u8; 32] {
    let mut seed = [0u8; 32];
    for (chunk, w) in seed.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    seed
}

pub fn trial_rng(seed: u64, sweep: usize, algo: usize, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed([seed, sweep as u64, algo as u64, trial as u64]))
}

fn instance_rng(seed: u64, purpose: u64, sweep: usize) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed([seed, INSTANCE_STREAM, purpose, sweep as u64]))
}

/// Build the arm set and parameter sequence for one sweep point.
///
/// `θ*` (multivariate) and the weekly arms and phases depend only on the
/// instance seed; oscillation draws also depend on the sweep index.
pub fn build_instance(
    spec: &InstanceSpec,
    horizon: usize,
    sweep_index: usize,
) -> Result<(crate::ArmSet, ParameterSequence)> {
    let r = spec.resolved();
    let oscillate = |arms: crate::ArmSet, theta| -> Result<_> {
        if r.s == 0.0 {
            return Ok((arms, ParameterSequence::stationary(theta, horizon)));
        }
        let mut rng = instance_rng(r.seed, 1, sweep_index);
        let seq = oscillating_sequence(&arms, &theta, r.s, r.period, horizon, &mut rng)?;
        Ok((arms, seq))
    };
    match r.kind {
        InstanceKind::Soare => {
            let (arms, theta) = soare_instance(r.d, r.omega)?;
            oscillate(arms, theta)
        }
        InstanceKind::Multivariate => {
            let mut rng = instance_rng(r.seed, 0, 0);
            let (arms, theta) =
                multivariate_instance(r.slots, r.alpha1, r.alpha2, MAX_MULTIVARIATE_ARMS, &mut rng)?;
            oscillate(arms, theta)
        }
        InstanceKind::Malicious => malicious_sequence(r.d, horizon),
        InstanceKind::Benchmark => benchmark_sequence(r.d, r.s, r.period, horizon),
        InstanceKind::Weekly => {
            let mut rng = instance_rng(r.seed, 2, 0);
            weekly_instance(r.d, r.arms, r.phases, r.period, horizon, &mut rng)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowOutcome {
    pub errors: usize,
    pub error_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub min_gap: f64,
    pub wall_ms: u64,
}

/// One (sweep point, algorithm) cell. `outcome` holds the failure reason
/// when the instance or algorithm could not be built or run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub instance: String,
    pub sweep_param: Option<String>,
    pub sweep_value: Option<f64>,
    pub algorithm: String,
    pub trials: usize,
    pub outcome: std::result::Result<RowOutcome, String>,
}

impl ResultRow {
    pub fn is_failed(&self) -> bool {
        self.outcome.is_err()
    }
}

/// Run every (sweep point × algorithm) cell and return rows in sweep, then
/// algorithm, order. Per-cell failures become failed rows.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_points(config))
}

fn run_points(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let sweep_param = config.sweep.as_ref().map(|s| s.param.name().to_string());
    let mut rows = Vec::new();
    for (sweep_index, (value, spec, horizon)) in config.points().into_iter().enumerate() {
        let row = |algorithm: String, outcome| ResultRow {
            instance: config.instance_id().to_string(),
            sweep_param: sweep_param.clone(),
            sweep_value: value,
            algorithm,
            trials: config.trials,
            outcome,
        };
        let env = build_instance(&spec, horizon, sweep_index).and_then(|(arms, seq)| {
            Environment::new(Arc::new(arms), seq, config.noise).map(|e| e.with_clipping(config.clip_rewards))
        });
        let env = match env {
            Ok(env) => env,
            Err(e) => {
                log::error!("instance {} at sweep index {sweep_index}: {e}", spec.to_record());
                for algo in &config.algorithms {
                    rows.push(row(algo.name.to_string(), Err(e.to_string())));
                }
                continue;
            }
        };
        let mut contexts: HashMap<(usize, u64), Arc<DesignContext>> = HashMap::new();
        for (algo_index, algo) in config.algorithms.iter().enumerate() {
            let started = Instant::now();
            let outcome = run_cell(config, &env, &mut contexts, sweep_index, algo_index, algo)
                .map(|errors| {
                    let (ci_low, ci_high) = wilson_ci(errors, config.trials, Z_95);
                    let wall_ms =
                        if config.timing { started.elapsed().as_millis() as u64 } else { 0 };
                    RowOutcome {
                        errors,
                        error_rate: errors as f64 / config.trials as f64,
                        ci_low,
                        ci_high,
                        min_gap: env.gaps().min_gap,
                        wall_ms,
                    }
                })
                .map_err(|e| {
                    log::error!("{} at sweep index {sweep_index}: {e}", algo.name);
                    e.to_string()
                });
            rows.push(row(algo.name.to_string(), outcome));
        }
    }
    Ok(rows)
}

fn run_cell(
    config: &ExperimentConfig,
    env: &Environment,
    contexts: &mut HashMap<(usize, u64), Arc<DesignContext>>,
    sweep_index: usize,
    algo_index: usize,
    spec: &AlgorithmSpec,
) -> Result<usize> {
    let algo_config = spec.config();
    let fw: FwSettings = algo_config.fw_settings();
    let key = (fw.iters, fw.tol.to_bits());
    let ctx = match contexts.get(&key) {
        Some(ctx) => ctx.clone(),
        None => {
            let ctx = Arc::new(DesignContext::new(env.arms().clone(), fw)?);
            contexts.insert(key, ctx.clone());
            ctx
        }
    };
    // Surface construction errors (e.g. too small a budget) once, up front.
    build(spec.name, ctx.clone(), env.horizon(), &algo_config)?;
    let best = env.best_arm();
    let wrong: Vec<bool> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.seed, sweep_index, algo_index, trial);
            let mut algo = build(spec.name, ctx.clone(), env.horizon(), &algo_config)?;
            Ok(run_episode(algo.as_mut(), env, &mut rng)? != best)
        })
        .collect::<Result<_>>()?;
    Ok(wrong.into_iter().filter(|&w| w).count())
}
