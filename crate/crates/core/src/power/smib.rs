//! Single machine on an infinite bus, fed over one of two lines.
//!
//! State is `[δ, ω, line]` with `line` equal to 1.0 or 2.0. Line 1 trips on
//! overcurrent and is restored once the power it would carry re-enters the
//! band `[P_min, P_max]`.

use nalgebra::dvector;

use crate::hybrid::FlowJumpSystem;
use crate::{Error, Matrix, Result, State};

pub const DELTA: usize = 0;
pub const SPEED: usize = 1;
pub const LINE: usize = 2;

pub const STATE_NAMES: [&str; 3] = ["delta", "omega", "line"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmibParams {
    pub inertia: f64,
    pub damping: f64,
    pub mechanical_power: f64,
    /// Internal EMF magnitude.
    pub emf: f64,
    /// Infinite-bus voltage magnitude.
    pub bus_voltage: f64,
    pub reactance_line1: f64,
    pub reactance_line2: f64,
    /// Line-1 overcurrent threshold.
    pub i_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Opens line 1 unconditionally from this time on.
    pub forced_trip: Option<f64>,
}

impl Default for SmibParams {
    fn default() -> Self {
        Self {
            inertia: 0.1,
            damping: 0.1,
            mechanical_power: 0.8,
            emf: 1.1,
            bus_voltage: 1.0,
            reactance_line1: 0.5,
            reactance_line2: 0.7,
            i_max: 1.5,
            p_min: -0.1,
            p_max: 0.1,
            forced_trip: None,
        }
    }
}

impl SmibParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.inertia > 0.0) {
            return Err(Error::InvalidArgument(format!("inertia must be positive, got {}", self.inertia)));
        }
        if !(self.damping >= 0.0) {
            return Err(Error::InvalidArgument(format!("damping must be non-negative, got {}", self.damping)));
        }
        if !(self.p_min < self.p_max) {
            return Err(Error::InvalidArgument(format!(
                "restoration band needs p_min < p_max, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if !(self.reactance_line1 > 0.0 && self.reactance_line2 > 0.0) {
            return Err(Error::InvalidArgument("line reactances must be positive".into()));
        }
        Ok(())
    }

    fn reactance(&self, line: f64) -> f64 {
        if line < 1.5 {
            self.reactance_line1
        } else {
            self.reactance_line2
        }
    }

    /// Electrical power delivered with `line` in service.
    pub fn electrical_power(&self, delta: f64, line: f64) -> f64 {
        self.emf * self.bus_voltage * delta.sin() / self.reactance(line)
    }

    /// Current magnitude on line 1 when it carries the transfer.
    pub fn line1_current(&self, delta: f64) -> f64 {
        let (e, v) = (self.emf, self.bus_voltage);
        (e * e + v * v - 2.0 * e * v * delta.cos()).max(0.0).sqrt() / self.reactance_line1
    }

    /// Power line 1 carries, or would carry if reclosed.
    pub fn line1_power(&self, delta: f64) -> f64 {
        self.electrical_power(delta, 1.0)
    }

    /// Electrical power at which `δ̇ = ω̇ = 0` on `line`, if one exists.
    pub fn equilibrium_angle(&self, line: f64) -> Option<f64> {
        let s = self.mechanical_power * self.reactance(line) / (self.emf * self.bus_voltage);
        (s.abs() <= 1.0).then(|| s.asin())
    }
}

pub fn smib_state(delta: f64, omega: f64, line: u8) -> State {
    dvector![delta, omega, f64::from(line)]
}

/// Swing dynamics `δ̇ = ω`, `M ω̇ = P_m − P_e(δ) − D ω` with the line label
/// held constant during flow.
pub fn swing_flow(x: &State, p: &SmibParams) -> State {
    let (delta, omega, line) = (x[DELTA], x[SPEED], x[LINE]);
    dvector![
        omega,
        (p.mechanical_power - p.electrical_power(delta, line) - p.damping * omega) / p.inertia,
        0.0
    ]
}

fn trip_margin(t: f64, x: &State, p: &SmibParams) -> f64 {
    let overcurrent = p.line1_current(x[DELTA]) - p.i_max;
    match p.forced_trip {
        Some(at) => overcurrent.max(t - at),
        None => overcurrent,
    }
}

fn restore_margin(x: &State, p: &SmibParams) -> f64 {
    let pl = p.line1_power(x[DELTA]);
    (pl - p.p_min).min(p.p_max - pl)
}

fn jump_margin(t: f64, x: &State, p: &SmibParams) -> f64 {
    if x[LINE] < 1.5 {
        trip_margin(t, x, p)
    } else {
        restore_margin(x, p)
    }
}

pub fn smib_system(p: &SmibParams) -> Result<FlowJumpSystem> {
    p.validate()?;
    let p = *p;
    Ok(FlowJumpSystem::new(3, move |_t, x| swing_flow(x, &p))
        .with_flow_set(move |t, x| -jump_margin(t, x, &p))
        .with_jump(
            move |t, x| jump_margin(t, x, &p),
            |_t, x| {
                let mut y = x.clone();
                y[LINE] = if x[LINE] < 1.5 { 2.0 } else { 1.0 };
                y
            },
        )
        .with_jump_jacobian(|_t, _x| Matrix::identity(3, 3)))
}
