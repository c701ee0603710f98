//! Fixed-step simulation of hybrid models with guard localization.

use super::event::{locate_event, EVENT_TOLERANCE};
use super::integrate::{ensure_finite, rk4_step, StepGrid};
use super::system::{EdgeId, HybridModel, ModeId};
use super::trajectory::{HybridTime, HybridTrajectory, JumpRecord, Sample, Termination};
use crate::{Error, Result, State};

/// Jumps allowed at a single instant of ordinary time before the run is
/// cut off as Zeno.
pub const ZENO_BUDGET: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub t0: f64,
    pub horizon: f64,
    pub dt: f64,
    pub max_jumps: usize,
}

impl SimOptions {
    pub fn new(horizon: f64, dt: f64) -> Self {
        Self {
            t0: 0.0,
            horizon,
            dt,
            max_jumps: 1000,
        }
    }

    pub fn max_jumps(mut self, max_jumps: usize) -> Self {
        self.max_jumps = max_jumps;
        self
    }

    pub fn start(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }
}

/// The single enabled edge out of `mode` at `(t, x)`, if any.
pub(crate) fn enabled_edge<M: HybridModel + ?Sized>(
    model: &M,
    mode: ModeId,
    t: f64,
    x: &State,
) -> Result<Option<EdgeId>> {
    let mut found: Option<EdgeId> = None;
    for &e in model.edges_from(mode) {
        let m = model.guard_margin(e, t, x);
        if m.is_nan() {
            return Err(Error::numerical(t, format!("guard `{}` margin is NaN", model.edge_label(e))));
        }
        if m >= 0.0 {
            if let Some(first) = found {
                return Err(Error::AmbiguousTransition {
                    t,
                    first: model.edge_label(first).to_string(),
                    second: model.edge_label(e).to_string(),
                });
            }
            found = Some(e);
        }
    }
    Ok(found)
}

pub(crate) enum StepEvent {
    Guard(f64),
    FlowExit(f64),
}

/// Earliest guard crossing (or flow-set exit) within one RK4 step from
/// `(t, x)` to `t_next`, using the step itself as the state interpolant.
pub(crate) fn scan_step<M, F>(
    model: &M,
    mode: ModeId,
    field: &F,
    t: f64,
    x: &State,
    t_next: f64,
    x_next: &State,
) -> Result<Option<StepEvent>>
where
    M: HybridModel + ?Sized,
    F: Fn(f64, &State) -> State,
{
    let interp = |s: f64| {
        if s == t_next {
            x_next.clone()
        } else {
            rk4_step(field, t, x, s - t)
        }
    };

    let mut crossings: Vec<(f64, EdgeId)> = Vec::new();
    for &e in model.edges_from(mode) {
        if model.guard_margin(e, t_next, x_next) >= 0.0 {
            let guard = |s: f64, y: &State| model.guard_margin(e, s, y);
            let ts = locate_event(guard, interp, t, t_next)?.unwrap_or(t_next);
            crossings.push((ts, e));
        }
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let [(t1, e1), (t2, e2), ..] = crossings[..] {
        if t2 - t1 <= EVENT_TOLERANCE {
            return Err(Error::AmbiguousTransition {
                t: t1,
                first: model.edge_label(e1).to_string(),
                second: model.edge_label(e2).to_string(),
            });
        }
    }
    let guard_hit = crossings.first().copied();

    let exit = if model.flow_margin(mode, t_next, x_next) < 0.0 {
        let inv = |s: f64, y: &State| model.flow_margin(mode, s, y);
        Some(locate_event(inv, interp, t, t_next)?.unwrap_or(t_next))
    } else {
        None
    };

    Ok(match (guard_hit, exit) {
        (Some((tg, _)), Some(te)) if te < tg - EVENT_TOLERANCE => Some(StepEvent::FlowExit(te)),
        (Some((tg, _)), _) => Some(StepEvent::Guard(tg)),
        (None, Some(te)) => Some(StepEvent::FlowExit(te)),
        (None, None) => None,
    })
}

/// Simulates `model` from `(mode0, x0)` over `[opts.t0, opts.horizon]`.
///
/// Flows with classic RK4 on the grid `t0 + k·dt`. When a guard margin turns
/// non-negative inside a step the crossing is localized by bisection, the
/// state is advanced to the crossing, the reset is applied and `j` is
/// incremented; the interrupted step is then completed from the jump time so
/// the grid stays anchored at `t0`. An enabled guard always wins over
/// continued flow.
pub fn simulate<M: HybridModel + ?Sized>(
    model: &M,
    mode0: ModeId,
    x0: &State,
    opts: &SimOptions,
) -> Result<HybridTrajectory> {
    let grid = StepGrid::new(opts.t0, opts.horizon, opts.dt)?;
    model.check_initial(mode0, opts.t0, x0)?;

    let mut traj = HybridTrajectory {
        mode_names: model.mode_names(),
        samples: Vec::with_capacity(grid.steps() + 1),
        jumps: Vec::new(),
        termination: Termination::HorizonReached,
    };

    let mut mode = mode0;
    let mut x = x0.clone();
    let mut t = opts.t0;
    let mut j = 0usize;
    let mut k = 0usize;
    let mut jumps_here = 0usize;
    traj.samples.push(Sample {
        time: HybridTime::new(t, j),
        mode,
        state: x.clone(),
    });

    loop {
        if let Some(edge) = enabled_edge(model, mode, t, &x)? {
            if j >= opts.max_jumps || jumps_here >= ZENO_BUDGET {
                traj.termination = Termination::MaxJumpsReached;
                break;
            }
            let target = model.edge_target(edge);
            x = model.reset(edge, t, &x);
            ensure_finite(t, &x, "reset state")?;
            j += 1;
            jumps_here += 1;
            traj.jumps.push(JumpRecord {
                time: HybridTime::new(t, j),
                edge: model.edge_label(edge).to_string(),
                from: mode,
                to: target,
            });
            mode = target;
            traj.samples.push(Sample {
                time: HybridTime::new(t, j),
                mode,
                state: x.clone(),
            });
            continue;
        }

        if model.flow_margin(mode, t, &x) < 0.0 {
            traj.termination = Termination::LeftFlowSet;
            break;
        }
        if k >= grid.steps() {
            traj.termination = Termination::HorizonReached;
            break;
        }

        let t_next = grid.time(k + 1);
        let field = |s: f64, y: &State| model.flow(mode, s, y);
        ensure_finite(t, &field(t, &x), "derivative")?;
        let x_next = rk4_step(&field, t, &x, t_next - t);
        ensure_finite(t_next, &x_next, "state")?;

        let (t_new, x_new, exit) = match scan_step(model, mode, &field, t, &x, t_next, &x_next)? {
            None => (t_next, x_next, false),
            Some(StepEvent::Guard(ts)) if ts == t_next => (t_next, x_next, false),
            Some(StepEvent::Guard(ts)) => (ts, rk4_step(&field, t, &x, ts - t), false),
            Some(StepEvent::FlowExit(ts)) if ts == t_next => (t_next, x_next, true),
            Some(StepEvent::FlowExit(ts)) => (ts, rk4_step(&field, t, &x, ts - t), true),
        };
        ensure_finite(t_new, &x_new, "state")?;
        if t_new == t_next {
            k += 1;
        }
        if t_new > t {
            jumps_here = 0;
        }
        t = t_new;
        x = x_new;
        traj.samples.push(Sample {
            time: HybridTime::new(t, j),
            mode,
            state: x.clone(),
        });
        if exit {
            traj.termination = Termination::LeftFlowSet;
            break;
        }
    }
    Ok(traj)
}
