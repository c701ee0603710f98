//! Switched systems `ẋ = f_σ(t)(x)` and their lift to flow/jump form.

use std::sync::Arc;

use nalgebra::DVector;

use super::system::{FlowJumpSystem, VectorField};
use crate::{Error, Result, State};

/// Subsystems `f_0 … f_{N-1}` selected by a piecewise-constant switching
/// signal. Mode indices are zero-based.
///
/// `σ(t) = modes[0]` before `switch_times[0]`, `modes[i]` on
/// `[switch_times[i-1], switch_times[i])`, and `modes[last]` afterwards.
#[derive(Clone)]
pub struct SwitchedSystem {
    dim: usize,
    subsystems: Vec<VectorField>,
    switch_times: Vec<f64>,
    modes: Vec<usize>,
}

impl std::fmt::Debug for SwitchedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SwitchedSystem")
            .field("dim", &self.dim)
            .field("subsystems", &self.subsystems.len())
            .field("switch_times", &self.switch_times)
            .field("modes", &self.modes)
            .finish()
    }
}

impl SwitchedSystem {
    pub fn new(dim: usize, subsystems: Vec<VectorField>, switch_times: Vec<f64>, modes: Vec<usize>) -> Result<Self> {
        if dim == 0 || subsystems.is_empty() {
            return Err(Error::InvalidArgument(
                "switched system needs a positive dimension and at least one subsystem".into(),
            ));
        }
        if modes.len() != switch_times.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} switch instants need {} mode entries, got {}",
                switch_times.len(),
                switch_times.len() + 1,
                modes.len()
            )));
        }
        if let Some(&m) = modes.iter().find(|&&m| m >= subsystems.len()) {
            return Err(Error::InvalidArgument(format!(
                "mode {m} out of range for {} subsystems",
                subsystems.len()
            )));
        }
        if switch_times.iter().any(|t| !t.is_finite()) || switch_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("switch instants must be finite and strictly increasing".into()));
        }
        Ok(Self {
            dim,
            subsystems,
            switch_times,
            modes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn switch_times(&self) -> &[f64] {
        &self.switch_times
    }

    pub fn subsystem(&self, mode: usize) -> &VectorField {
        &self.subsystems[mode]
    }

    /// Active subsystem index `σ(t)`.
    pub fn sigma(&self, t: f64) -> usize {
        self.modes[self.switch_times.partition_point(|&s| s <= t)]
    }

    /// Subsystem active on schedule segment `segment` (segment `i` starts at
    /// `switch_times[i - 1]`).
    pub fn segment_mode(&self, segment: usize) -> usize {
        self.modes[segment.min(self.modes.len() - 1)]
    }

    /// Schedule segment containing `t`.
    pub fn segment(&self, t: f64) -> usize {
        self.switch_times.partition_point(|&s| s <= t)
    }

    /// `t − s_i` for the switch that ends segment `i`; never triggers on the
    /// last segment.
    fn jump_margin(&self, t: f64, segment: usize) -> f64 {
        self.switch_times.get(segment).map_or(f64::NEG_INFINITY, |&s| t - s)
    }
}

/// Lifts `sw` to a flow/jump system over the augmented state `(z, i)`.
///
/// The discrete component is the index `i` of the current schedule segment,
/// so the active subsystem is `modes[i]`. It flows with `(f_{modes[i]}(z), 0)`
/// and jumps to `(z, i + 1)` at `switch_times[i]`. Every listed instant is a
/// jump, including one that reselects the same subsystem, and instants closer
/// together than one integration step are each observed.
pub fn lift_switched(sw: &SwitchedSystem) -> FlowJumpSystem {
    let n = sw.dim;
    let flow_sw = Arc::new(sw.clone());
    let jump_sw = Arc::clone(&flow_sw);
    FlowJumpSystem::new(n + 1, move |t, x: &State| {
        let q = flow_sw.segment_mode(x[n] as usize);
        let z = x.rows(0, n).into_owned();
        let dz = (flow_sw.subsystems[q])(t, &z);
        let mut out = DVector::zeros(n + 1);
        out.rows_mut(0, n).copy_from(&dz);
        out
    })
    .with_jump(
        move |t, x: &State| jump_sw.jump_margin(t, x[n] as usize),
        move |_t, x: &State| {
            let mut out = x.clone();
            out[n] += 1.0;
            out
        },
    )
}

/// Augmented initial state `(z0, i)` with `i` the segment containing `t0`.
pub fn lifted_initial(sw: &SwitchedSystem, z0: &State, t0: f64) -> State {
    let mut x = DVector::zeros(sw.dim + 1);
    x.rows_mut(0, sw.dim).copy_from(z0);
    x[sw.dim] = sw.segment(t0) as f64;
    x
}
