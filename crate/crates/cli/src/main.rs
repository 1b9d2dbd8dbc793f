//! `bai`: run best-arm identification experiments and write CSV results.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for failures
//! while running (including rows that could not be computed).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use linbai_core::harness::{self, build_instance, ExperimentConfig, PRESET_NAMES};
use linbai_core::{AlgorithmKind, ComplexityReport, Error};

#[derive(Parser)]
#[command(name = "bai", version, about = "Fixed-budget best-arm identification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a built-in experiment.
    Preset {
        name: String,
        #[arg(long, required_unless_present = "print_config")]
        out: Option<PathBuf>,
        /// Print the preset's JSON config and exit.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print complexity measures for every sweep point of a config.
    Complexity {
        #[arg(long)]
        config: PathBuf,
    },
    /// List built-in experiment names.
    ListPresets,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock milliseconds per row (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

impl Overrides {
    fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(t) = self.trials {
            config.trials = t;
        }
        if let Some(t) = self.threads {
            config.threads = Some(t);
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if self.timing {
            config.timing = true;
        }
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out, overrides } => {
            let mut config = ExperimentConfig::load(&config)?;
            overrides.apply(&mut config);
            let out = out.or_else(|| config.out.clone()).ok_or_else(|| {
                Failure::Config("no output path: pass --out or set `out` in the config".into())
            })?;
            run(&config, out)
        }
        Command::Preset { name, out, print_config, overrides } => {
            let mut config = harness::preset(&name)?;
            overrides.apply(&mut config);
            if print_config {
                println!("{}", config.to_json());
                return Ok(());
            }
            run(&config, out.expect("clap requires --out"))
        }
        Command::Complexity { config } => complexity(&ExperimentConfig::load(&config)?),
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn run(config: &ExperimentConfig, out: PathBuf) -> Result<(), Failure> {
    config.validate()?;
    // Open the output first so an unwritable path fails before any work.
    let file = File::create(&out)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", out.display())))?;
    let rows = harness::run_experiment(config)?;
    harness::write_csv(BufWriter::new(file), &rows)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", out.display())))?;
    let failed: Vec<_> = rows.iter().filter(|r| r.is_failed()).collect();
    for row in &failed {
        if let Err(reason) = &row.outcome {
            eprintln!(
                "failed: {} {}={} {}: {reason}",
                row.instance,
                row.sweep_param.as_deref().unwrap_or("-"),
                row.sweep_value.map(|v| v.to_string()).unwrap_or_default(),
                row.algorithm,
            );
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} of {} rows failed", failed.len(), rows.len())))
    }
}

fn complexity(config: &ExperimentConfig) -> Result<(), Failure> {
    // `m` and solver settings come from the first P1-RAGE entry, if any.
    let algo = config
        .algorithms
        .iter()
        .find(|a| a.name == AlgorithmKind::P1Rage)
        .map(|a| a.config())
        .unwrap_or_default();
    let (m, fw) = (algo.m, algo.fw_settings());
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    writeln!(out, "instance,sweep_param,sweep_value,min_gap,h_gbai,rho_star,m,i0,h_p1rage,h_bob")
        .map_err(io)?;
    let param = config.sweep.as_ref().map(|s| s.param.name()).unwrap_or("");
    for (index, (value, spec, horizon)) in config.points().into_iter().enumerate() {
        let (arms, seq) = build_instance(&spec, horizon, index)?;
        let r = ComplexityReport::compute(&Arc::new(arms), &seq.mean_theta(), m, &fw)?;
        writeln!(
            out,
            "{},{param},{},{},{},{},{},{},{},{}",
            config.instance_id(),
            value.map(|v| v.to_string()).unwrap_or_default(),
            r.min_gap,
            r.h_gbai,
            r.rho_star,
            r.m,
            r.i0,
            r.h_p1rage,
            r.h_bob.map(|v| v.to_string()).unwrap_or_default(),
        )
        .map_err(io)?;
    }
    Ok(())
}
