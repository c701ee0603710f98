//! Classic fixed-step fourth-order Runge-Kutta integration.

use crate::{Error, Result, State};

/// One classic RK4 step of length `h` from `(t, x)`.
pub fn rk4_step<F>(field: &F, t: f64, x: &State, h: f64) -> State
where
    F: Fn(f64, &State) -> State + ?Sized,
{
    let half = 0.5 * h;
    let k1 = field(t, x);
    let k2 = field(t + half, &(x + &k1 * half));
    let k3 = field(t + half, &(x + &k2 * half));
    let k4 = field(t + h, &(x + &k3 * h));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Uniform time grid `t0 + k·dt` whose last node is moved onto `t1`.
///
/// Nodes are computed by multiplication, not accumulation, so every consumer
/// of the same `(t0, t1, dt)` sees bit-identical step boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGrid {
    t0: f64,
    t1: f64,
    dt: f64,
    steps: usize,
}

impl StepGrid {
    /// Relative slack when deciding whether `t1 - t0` is a whole number of steps.
    const SNAP: f64 = 1e-9;

    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {dt}")));
        }
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time interval must satisfy t0 < t1, got [{t0}, {t1}]"
            )));
        }
        let steps = (((t1 - t0) / dt) - Self::SNAP).ceil().max(1.0) as usize;
        Ok(Self { t0, t1, dt, steps })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t1
    }

    /// Time of node `k`, `0 <= k <= steps`.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|k| self.time(k))
    }
}

pub(crate) fn ensure_finite(t: f64, x: &State, what: &str) -> Result<()> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::numerical(t, format!("{what} component {i} is not finite")));
    }
    Ok(())
}

/// Integrates `field` from `(t0, x0)` to `t1` with fixed step `dt`.
///
/// Returns the initial sample followed by one sample per accepted step; the
/// last step is shortened so the final sample sits exactly on `t1`.
pub fn integrate_flow<F>(field: &F, x0: &State, t0: f64, t1: f64, dt: f64) -> Result<Vec<(f64, State)>>
where
    F: Fn(f64, &State) -> State + ?Sized,
{
    let grid = StepGrid::new(t0, t1, dt)?;
    ensure_finite(t0, x0, "initial state")?;
    ensure_finite(t0, &field(t0, x0), "derivative")?;

    let mut out = Vec::with_capacity(grid.steps() + 1);
    let mut x = x0.clone();
    out.push((t0, x.clone()));
    for k in 0..grid.steps() {
        let (ta, tb) = (grid.time(k), grid.time(k + 1));
        x = rk4_step(field, ta, &x, tb - ta);
        ensure_finite(tb, &x, "state")?;
        out.push((tb, x.clone()));
    }
    Ok(out)
}
