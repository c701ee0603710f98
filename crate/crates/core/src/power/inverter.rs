//! Grid-following / grid-forming inverter in the `dq` frame, per unit.
//!
//! State layout is `[i_d, i_q, v_d, v_q]` in both modes. The grid-following
//! current equations leave the voltages free and the grid-forming current
//! laws are algebraic, so both are closed with first-order tracking:
//! GFL voltages follow the grid with time constant `tau_v`, GFM currents
//! follow their algebraic values with time constant `tau_i`.

use std::sync::Arc;

use nalgebra::dvector;

use super::profile::VoltageProfile;
use crate::hybrid::HybridAutomaton;
use crate::{Error, Matrix, Result, State};

pub const I_D: usize = 0;
pub const I_Q: usize = 1;
pub const V_D: usize = 2;
pub const V_Q: usize = 3;

pub const STATE_NAMES: [&str; 4] = ["i_d", "i_q", "v_d", "v_q"];

pub const GFL: usize = 0;
pub const GFM: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverterParams {
    pub l_pu: f64,
    pub r_pu: f64,
    /// Grid angular frequency (per unit).
    pub omega: f64,
    /// GFM d-axis voltage reference.
    pub v_ref: f64,
    /// Symmetric clamp on both current channels applied when entering GFM.
    pub i_lim: f64,
    /// Switch to GFM below this grid voltage.
    pub v_low: f64,
    /// Switch back to GFL above this grid voltage.
    pub v_high: f64,
    /// Sigmoid gain of the blended model.
    pub k: f64,
    /// Sigmoid midpoint of the blended model.
    pub v_th: f64,
    pub tau_v: f64,
    pub tau_i: f64,
}

impl Default for InverterParams {
    fn default() -> Self {
        Self {
            l_pu: 0.0189,
            r_pu: 1.89,
            omega: 1.0,
            v_ref: 1.0,
            i_lim: 1.2,
            v_low: 0.8,
            v_high: 0.9,
            k: 50.0,
            v_th: 0.85,
            tau_v: 1e-3,
            tau_i: 1e-3,
        }
    }
}

impl InverterParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l_pu", self.l_pu),
            ("r_pu", self.r_pu),
            ("tau_v", self.tau_v),
            ("tau_i", self.tau_i),
            ("i_lim", self.i_lim),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("inverter {name} must be positive, got {v}")));
            }
        }
        if !(self.v_low < self.v_high) {
            return Err(Error::InvalidArgument(format!(
                "hysteresis needs v_low < v_high, got {} and {}",
                self.v_low, self.v_high
            )));
        }
        if [self.omega, self.v_ref, self.k, self.v_th].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("inverter parameters must be finite".into()));
        }
        Ok(())
    }
}

/// Grid-following (current-controlled) field for grid voltage `v_grid`.
pub fn gfl_flow(x: &State, v_grid: f64, p: &InverterParams) -> State {
    let (id, iq, vd, vq) = (x[I_D], x[I_Q], x[V_D], x[V_Q]);
    let wl = p.omega * p.l_pu;
    dvector![
        (vd - p.r_pu * id + wl * iq) / p.l_pu,
        (vq - p.r_pu * iq - wl * id) / p.l_pu,
        (v_grid - vd) / p.tau_v,
        -vq / p.tau_v
    ]
}

/// Algebraic GFM current laws `((V_ref − v_d)/R, −v_q/R)`.
pub fn gfm_currents(x: &State, p: &InverterParams) -> (f64, f64) {
    ((p.v_ref - x[V_D]) / p.r_pu, -x[V_Q] / p.r_pu)
}

/// Grid-forming (voltage-controlled) field.
pub fn gfm_flow(x: &State, p: &InverterParams) -> State {
    let (id, iq) = (x[I_D], x[I_Q]);
    let (id_alg, iq_alg) = gfm_currents(x, p);
    let wl = p.omega * p.l_pu;
    dvector![
        (id_alg - id) / p.tau_i,
        (iq_alg - iq) / p.tau_i,
        (wl * iq - p.r_pu * id) / p.l_pu,
        (-wl * id - p.r_pu * iq) / p.l_pu
    ]
}

/// `1 / (1 + exp(−k (V − V_th)))`.
pub fn sigmoid(v_grid: f64, p: &InverterParams) -> f64 {
    1.0 / (1.0 + (-p.k * (v_grid - p.v_th)).exp())
}

/// `σ(V) f_GFL + (1 − σ(V)) f_GFM`.
pub fn blended_flow(x: &State, v_grid: f64, p: &InverterParams) -> State {
    let s = sigmoid(v_grid, p);
    gfl_flow(x, v_grid, p) * s + gfm_flow(x, p) * (1.0 - s)
}

/// Clamps `i_d`, `i_q` to `[−I_lim, I_lim]`; voltages pass through.
pub fn clamp_currents(x: &State, p: &InverterParams) -> State {
    let mut out = x.clone();
    out[I_D] = x[I_D].clamp(-p.i_lim, p.i_lim);
    out[I_Q] = x[I_Q].clamp(-p.i_lim, p.i_lim);
    out
}

/// Jacobian of [`clamp_currents`]: 0 on a current channel where the clamp is
/// active (the boundary counts as active), 1 elsewhere.
pub fn clamp_jacobian(x: &State, p: &InverterParams) -> Matrix {
    let mut j = Matrix::identity(4, 4);
    for i in [I_D, I_Q] {
        if x[i].abs() >= p.i_lim {
            j[(i, i)] = 0.0;
        }
    }
    j
}

/// Two-mode automaton driven by the measured grid voltage.
///
/// GFL → GFM when `V_grid` falls to `V_low` (currents clamped); GFM → GFL when
/// it rises to `V_high` (no reset). The guards depend only on time.
pub fn inverter_automaton(p: &InverterParams, profile: Arc<VoltageProfile>) -> Result<HybridAutomaton> {
    p.validate()?;
    let p = *p;
    let mut b = HybridAutomaton::builder(4);

    let v = Arc::clone(&profile);
    let gfl = b.mode("GFL", move |t, x: &State| gfl_flow(x, v.at(t), &p));
    let gfm = b.mode("GFM", move |_t, x: &State| gfm_flow(x, &p));

    let v = Arc::clone(&profile);
    b.invariant(gfl, move |t, _x: &State| v.at(t) - p.v_low);
    let v = Arc::clone(&profile);
    b.invariant(gfm, move |t, _x: &State| p.v_high - v.at(t));

    let v = Arc::clone(&profile);
    let down = b.edge(gfl, gfm, move |t, _x: &State| p.v_low - v.at(t), move |_t, x: &State| clamp_currents(x, &p));
    b.label(down, "GFL->GFM")
        .reset_jacobian(down, move |_t, x: &State| clamp_jacobian(x, &p));

    let v = Arc::clone(&profile);
    let up = b.edge(gfm, gfl, move |t, _x: &State| v.at(t) - p.v_high, |_t, x: &State| x.clone());
    b.label(up, "GFM->GFL")
        .reset_jacobian(up, |_t, _x: &State| Matrix::identity(4, 4));

    b.build()
}
