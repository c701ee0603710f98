use std::fmt::Write as _;

use nalgebra::dvector;

use super::config::ExperimentConfig;
use super::csv::format_float;
use crate::hybrid::{check_safety, simulate, BoxSampler, HybridTrajectory, Sample, SafetyVerdict, SimOptions};
use crate::power::smib::{smib_state, smib_system, LINE};
use crate::Result;

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub seed: u64,
    pub samples: usize,
    pub verdict: SafetyVerdict,
}

/// Line 1 opened by its protection counts as unsafe.
pub fn line1_tripped(s: &Sample) -> bool {
    s.state[LINE] > 1.5
}

/// Samples SMIB initial conditions with line 1 in service and looks for a
/// trajectory that trips it.
pub fn run_verify(config: &ExperimentConfig, seed: u64) -> Result<VerifyOutcome> {
    let setup = &config.smib;
    let sys = smib_system(&setup.params)?;
    let (dlo, dhi) = setup.delta_range;
    let (wlo, whi) = setup.omega_range;
    let mut sampler = BoxSampler::new(0, dvector![dlo, wlo, 1.0], dvector![dhi, whi, 1.0], seed)?;
    let opts = SimOptions::new(setup.horizon, setup.dt);
    let verdict = check_safety(&sys, &mut sampler, line1_tripped, &opts, setup.samples)?;
    Ok(VerifyOutcome {
        seed,
        samples: setup.samples,
        verdict,
    })
}

/// Nominal SMIB run from `(delta0, omega0)` on line 1.
pub fn simulate_smib(config: &ExperimentConfig) -> Result<HybridTrajectory> {
    let s = &config.smib;
    let sys = smib_system(&s.params)?;
    simulate(&sys, 0, &smib_state(s.delta0, s.omega0, 1), &SimOptions::new(s.horizon, s.dt))
}

impl VerifyOutcome {
    pub fn witness_time(&self) -> Option<f64> {
        match &self.verdict {
            SafetyVerdict::Unsafe(c) => Some(c.entry_sample().time.t),
            SafetyVerdict::NoCounterexampleFound { .. } => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# sampled safety check: unsafe = line 1 tripped\n");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "samples = {}", self.samples);
        match &self.verdict {
            SafetyVerdict::NoCounterexampleFound { samples } => {
                let _ = writeln!(s, "verdict = no_counterexample");
                let _ = writeln!(s, "checked = {samples}");
            }
            SafetyVerdict::Unsafe(c) => {
                let entry = c.entry_sample();
                let _ = writeln!(s, "verdict = unsafe");
                let _ = writeln!(s, "draw = {}", c.draw);
                let _ = writeln!(s, "initial_delta = {}", format_float(c.initial_state[0]));
                let _ = writeln!(s, "initial_omega = {}", format_float(c.initial_state[1]));
                let _ = writeln!(s, "witness_time = {}", format_float(entry.time.t));
                let _ = writeln!(s, "witness_jumps = {}", entry.time.j);
                let _ = writeln!(s, "witness_delta = {}", format_float(entry.state[0]));
                let _ = writeln!(s, "witness_omega = {}", format_float(entry.state[1]));
            }
        }
        s
    }
}
