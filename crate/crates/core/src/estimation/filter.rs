//! Filter loop over a measurement stream on a fixed grid.

use super::belief::{GaussianBelief, NoiseModel};
use super::ekf::{add_process_noise, ekf_predict, ekf_update, propagate};
use super::saltation::{propagate_belief_through_jump, saltation_for_edge, SaltationMatrix};
use crate::hybrid::{
    enabled_edge, rk4_step, scan_step, HybridModel, HybridTime, HybridTrajectory, JumpRecord, ModeId, Sample,
    StepEvent, StepGrid, Termination, ZENO_BUDGET,
};
use crate::{Error, Result, State};

/// Timestamped measurement vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub t: f64,
    pub z: State,
}

/// Prediction model used by [`run_ekf`].
pub enum ProcessModel<'a> {
    /// Mode-switching model. Guards are evaluated along the predicted mean;
    /// at a crossing the belief goes through the reset and the saltation
    /// matrix before the step is completed in the new mode.
    Hybrid {
        model: &'a dyn HybridModel,
        initial_mode: ModeId,
    },
    /// Single smooth vector field.
    Continuous {
        label: &'a str,
        field: &'a (dyn Fn(f64, &State) -> State + Sync),
    },
}

#[derive(Debug, Clone)]
pub struct EkfSettings {
    pub t0: f64,
    pub horizon: f64,
    pub dt: f64,
    pub initial: GaussianBelief,
    pub noise: NoiseModel,
}

#[derive(Debug, Clone)]
pub struct EkfRun {
    /// Posterior means at the grid nodes plus pre/post-jump predicted means.
    pub estimate: HybridTrajectory,
    /// Posterior belief at every grid node.
    pub beliefs: Vec<GaussianBelief>,
    pub times: Vec<f64>,
    pub saltations: Vec<SaltationMatrix>,
}

impl EkfRun {
    /// `(t, mean)` at every grid node.
    pub fn means(&self) -> Vec<(f64, State)> {
        self.times
            .iter()
            .zip(&self.beliefs)
            .map(|(&t, b)| (t, b.mean.clone()))
            .collect()
    }
}

const ALIGN_TOL: f64 = 1e-9;

/// Runs predict/update over the grid `t0 + k·dt`, using measurement `k` at
/// node `k` (including node 0, which corrects the initial belief).
pub fn run_ekf(process: &ProcessModel<'_>, settings: &EkfSettings, measurements: &[Measurement]) -> Result<EkfRun> {
    let grid = StepGrid::new(settings.t0, settings.horizon, settings.dt)?;
    if measurements.len() < grid.steps() + 1 {
        return Err(Error::InvalidArgument(format!(
            "measurement stream has {} entries, the horizon needs {}",
            measurements.len(),
            grid.steps() + 1
        )));
    }
    for (k, m) in measurements.iter().take(grid.steps() + 1).enumerate() {
        let tk = grid.time(k);
        if (m.t - tk).abs() > ALIGN_TOL * tk.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "measurement {k} at t = {} is off the integration grid (expected {tk})",
                m.t
            )));
        }
    }
    settings.initial.check()?;
    let noise = &settings.noise;
    if noise.state_dim() != settings.initial.dim() {
        return Err(Error::Dimension(format!(
            "noise model is for {} states, belief has {}",
            noise.state_dim(),
            settings.initial.dim()
        )));
    }

    let (mode_names, mut mode) = match process {
        ProcessModel::Hybrid { model, initial_mode } => {
            if *initial_mode >= model.mode_count() {
                return Err(Error::InvalidArgument(format!("unknown initial mode {initial_mode}")));
            }
            (model.mode_names(), *initial_mode)
        }
        ProcessModel::Continuous { label, .. } => (vec![label.to_string()], 0),
    };

    let mut belief = ekf_update(&settings.initial, &measurements[0].z, noise)?;
    let mut out = EkfRun {
        estimate: HybridTrajectory {
            mode_names,
            samples: vec![Sample {
                time: HybridTime::new(settings.t0, 0),
                mode,
                state: belief.mean.clone(),
            }],
            jumps: Vec::new(),
            termination: Termination::HorizonReached,
        },
        beliefs: vec![belief.clone()],
        times: vec![settings.t0],
        saltations: Vec::new(),
    };

    for k in 0..grid.steps() {
        let (ta, tb) = (grid.time(k), grid.time(k + 1));
        let predicted = match process {
            ProcessModel::Continuous { field, .. } => ekf_predict(&belief, *field, ta, tb - ta, noise)?,
            ProcessModel::Hybrid { model, .. } => {
                let mut b = hybrid_step(*model, &mut mode, &belief, ta, tb, &mut out)?;
                add_process_noise(&mut b, noise)?;
                b
            }
        };
        belief = ekf_update(&predicted, &measurements[k + 1].z, noise)
            .map_err(|e| Error::numerical(tb, format!("update failed: {e}")))?;
        let j = out.estimate.jumps.len();
        out.estimate.samples.push(Sample {
            time: HybridTime::new(tb, j),
            mode,
            state: belief.mean.clone(),
        });
        out.beliefs.push(belief.clone());
        out.times.push(tb);
    }
    Ok(out)
}

/// Prediction over `[ta, tb]` for a hybrid model, without process noise.
fn hybrid_step(
    model: &dyn HybridModel,
    mode: &mut ModeId,
    start: &GaussianBelief,
    ta: f64,
    tb: f64,
    out: &mut EkfRun,
) -> Result<GaussianBelief> {
    let mut belief = start.clone();
    let mut t = ta;
    let mut jumps_here = 0usize;
    loop {
        if let Some(edge) = enabled_edge(model, *mode, t, &belief.mean)? {
            if jumps_here >= ZENO_BUDGET {
                return Err(Error::numerical(t, "filter mode logic exceeded the per-instant jump budget"));
            }
            let xi = saltation_for_edge(model, edge, t, &belief.mean)?;
            let pre = belief.mean.clone();
            belief = propagate_belief_through_jump(&belief, |x| model.reset(edge, t, x), &xi)?;
            let target = model.edge_target(edge);
            let j = out.estimate.jumps.len();
            out.estimate.samples.push(Sample {
                time: HybridTime::new(t, j),
                mode: *mode,
                state: pre,
            });
            out.estimate.jumps.push(JumpRecord {
                time: HybridTime::new(t, j + 1),
                edge: model.edge_label(edge).to_string(),
                from: *mode,
                to: target,
            });
            out.estimate.samples.push(Sample {
                time: HybridTime::new(t, j + 1),
                mode: target,
                state: belief.mean.clone(),
            });
            out.saltations.push(xi);
            *mode = target;
            jumps_here += 1;
            continue;
        }
        if t >= tb {
            return Ok(belief);
        }

        let m = *mode;
        let field = |s: f64, y: &State| model.flow(m, s, y);
        let x_next = rk4_step(&field, t, &belief.mean, tb - t);
        let stop = match scan_step(model, m, &field, t, &belief.mean, tb, &x_next)? {
            Some(StepEvent::Guard(ts)) => ts,
            Some(StepEvent::FlowExit(_)) | None => tb,
        };
        let (next, _) = propagate(&belief, &field, t, stop - t)?;
        belief = next;
        if stop > t {
            jumps_here = 0;
        }
        t = stop;
    }
}
