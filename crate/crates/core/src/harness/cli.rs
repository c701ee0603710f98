use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::compare::{estimate_table, run_comparison, single_filter, trajectory_table, write_comparison, FilterKind};
use super::config::{resolve_seed, ExperimentConfig, FilterChoice, ModelKind, SEED_ENV};
use super::csv::TrajectoryTable;
use super::verify::{run_verify, simulate_smib};
use crate::power::generate_truth_and_measurements;
use crate::power::inverter::STATE_NAMES;
use crate::power::smib::STATE_NAMES as SMIB_STATE_NAMES;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

const DEFAULT_OUT_DIR: &str = "results";

#[derive(Debug, Parser)]
#[command(name = "hds", version, about = "Hybrid-system simulation, filtering and safety checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (`key = value` lines).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Overrides the configured seed and HDS_SEED.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the configured model and write its trajectory.
    Simulate,
    /// Run one filter on the generated measurements.
    Estimate {
        #[arg(long, value_enum)]
        filter: Option<FilterChoice>,
    },
    /// Run both filters on one measurement stream and write the RMSE report.
    Compare,
    /// Sampled safety check of the SMIB line-1 protection.
    Verify,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Usage(m),
            other => Failure::Runtime(other),
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_cli(args, env_seed.as_deref(), &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`cli_main`] with the environment seed and output streams supplied.
pub fn run_cli<I, T>(args: I, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli, env_seed, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn load(path: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => ExperimentConfig::load(p).map_err(|e| match e {
            Error::Io { path, source } => Failure::Usage(format!("cannot read config {}: {source}", path.display())),
            other => other.into(),
        }),
    }
}

fn run(cli: &Cli, env_seed: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    let config = load(cli.config.as_deref())?;
    let seed = resolve_seed(cli.seed, config.seed, env_seed)?;
    let dir = cli
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let mkdir = |d: &Path| std::fs::create_dir_all(d).map_err(|e| Error::io(d, e));
    let say = |out: &mut dyn Write, line: String| {
        let _ = writeln!(out, "{line}");
    };

    match &cli.command {
        Command::Simulate => {
            mkdir(&dir)?;
            match config.model {
                ModelKind::Smib => {
                    let traj = simulate_smib(&config)?;
                    let path = dir.join("trajectory_smib.csv");
                    trajectory_table(&traj, &SMIB_STATE_NAMES)?.write(&path)?;
                    say(out, format!("{} samples, {} jumps -> {}", traj.samples.len(), traj.jump_count(), path.display()));
                }
                ModelKind::Inverter => {
                    let mut scenario = config.inverter.clone();
                    scenario.seed = seed;
                    let data = generate_truth_and_measurements(&scenario)?;
                    let path = dir.join("trajectory_truth.csv");
                    trajectory_table(&data.truth, &STATE_NAMES)?.write(&path)?;
                    let mut meas = TrajectoryTable::new(STATE_NAMES.iter().map(|s| format!("z_{s}")));
                    for (m, s) in data.measurements.iter().zip(&data.truth_on_grid) {
                        meas.push(m.t, s.time.j, data.truth.mode_name(s.mode), m.z.iter().copied().collect())?;
                    }
                    let mpath = dir.join("measurements.csv");
                    meas.write(&mpath)?;
                    say(out, format!("{} jumps at {:?}", data.truth.jump_count(), data.truth.jump_times()));
                    say(out, format!("wrote {} and {}", path.display(), mpath.display()));
                }
            }
        }
        Command::Estimate { filter } => {
            let mut config = config.clone();
            config.filter = single_filter(filter.unwrap_or(config.filter))?;
            let cmp = run_comparison(&config, seed)?;
            let (kind, run) = match (&cmp.hybrid, &cmp.continuous) {
                (Some(r), _) => (FilterKind::Hybrid, r),
                (_, Some(r)) => (FilterKind::Continuous, r),
                _ => unreachable!("one filter always runs"),
            };
            mkdir(&dir)?;
            let path = dir.join(format!("trajectory_{}.csv", kind.key()));
            estimate_table(&cmp.data.truth, &cmp.data.truth_on_grid, run)?.write(&path)?;
            say(out, cmp.report.table());
            say(out, format!("wrote {}", path.display()));
        }
        Command::Compare => {
            let cmp = run_comparison(&config, seed)?;
            let written = write_comparison(&dir, &cmp)?;
            say(out, cmp.report.table());
            for f in &cmp.report.filters {
                say(out, format!("{} filter runtime: {:.3} s", f.filter.key(), f.runtime_seconds));
            }
            for p in written {
                say(out, format!("wrote {}", p.display()));
            }
        }
        Command::Verify => {
            let outcome = run_verify(&config, seed)?;
            mkdir(&dir)?;
            let path = dir.join("verify_report.txt");
            std::fs::write(&path, outcome.to_text()).map_err(|e| Error::io(&path, e))?;
            match outcome.witness_time() {
                Some(t) => say(out, format!("unsafe: line 1 trips at t = {t}")),
                None => say(out, format!("no counterexample in {} samples", outcome.samples)),
            }
            say(out, format!("wrote {}", path.display()));
        }
    }
    Ok(())
}
