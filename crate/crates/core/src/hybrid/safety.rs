//! Falsification of safety properties by sampling initial conditions.
//!
//! A run either produces a witness trajectory that enters the unsafe set or
//! reports that none of the sampled trajectories did. The second outcome is
//! evidence, not proof: sampling does not over-approximate the reachable set.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::simulate::{simulate, SimOptions};
use super::system::{HybridModel, ModeId};
use super::trajectory::{HybridTrajectory, Sample};
use crate::{Error, Result, State};

/// Source of initial conditions `(mode, x0)`.
pub trait InitialSampler {
    fn sample(&mut self) -> (ModeId, State);
}

impl<F: FnMut() -> (ModeId, State)> InitialSampler for F {
    fn sample(&mut self) -> (ModeId, State) {
        self()
    }
}

/// Uniform sampling over an axis-aligned box, reproducible from a seed.
#[derive(Debug, Clone)]
pub struct BoxSampler {
    mode: ModeId,
    lo: State,
    hi: State,
    rng: ChaCha8Rng,
}

impl BoxSampler {
    pub fn new(mode: ModeId, lo: State, hi: State, seed: u64) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(hi.iter()).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidArgument("box bounds must have equal length and lo <= hi".into()));
        }
        Ok(Self {
            mode,
            lo,
            hi,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl InitialSampler for BoxSampler {
    fn sample(&mut self) -> (ModeId, State) {
        let x = DVector::from_iterator(
            self.lo.len(),
            self.lo
                .iter()
                .zip(self.hi.iter())
                .map(|(&a, &b)| a + (b - a) * self.rng.random::<f64>()),
        );
        (self.mode, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// Which draw (0-based) produced the witness.
    pub draw: usize,
    pub initial_mode: ModeId,
    pub initial_state: State,
    pub trajectory: HybridTrajectory,
    /// Index into `trajectory.samples` of the first unsafe sample.
    pub entry: usize,
}

impl Counterexample {
    pub fn entry_sample(&self) -> &Sample {
        &self.trajectory.samples[self.entry]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SafetyVerdict {
    NoCounterexampleFound { samples: usize },
    Unsafe(Box<Counterexample>),
}

impl SafetyVerdict {
    pub fn is_unsafe(&self) -> bool {
        matches!(self, SafetyVerdict::Unsafe(_))
    }
}

/// Simulates `samples` initial conditions and returns the first trajectory
/// with a sample in the unsafe set.
pub fn check_safety<M, S, U>(
    model: &M,
    sampler: &mut S,
    unsafe_set: U,
    opts: &SimOptions,
    samples: usize,
) -> Result<SafetyVerdict>
where
    M: HybridModel + ?Sized,
    S: InitialSampler + ?Sized,
    U: Fn(&Sample) -> bool,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("safety check needs at least one sample".into()));
    }
    for draw in 0..samples {
        let (mode, x0) = sampler.sample();
        let trajectory = simulate(model, mode, &x0, opts)?;
        if let Some(entry) = trajectory.samples.iter().position(&unsafe_set) {
            return Ok(SafetyVerdict::Unsafe(Box::new(Counterexample {
                draw,
                initial_mode: mode,
                initial_state: x0,
                trajectory,
                entry,
            })));
        }
    }
    Ok(SafetyVerdict::NoCounterexampleFound { samples })
}
