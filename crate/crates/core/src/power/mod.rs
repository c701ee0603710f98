//! Concrete power-system models: the GFL/GFM inverter with its sigmoid-blended
//! counterpart, scenario and measurement generation, and the two-line SMIB.

pub mod inverter;
mod noise;
mod profile;
mod scenario;
pub mod smib;

pub use inverter::{
    blended_flow, clamp_currents, clamp_jacobian, gfl_flow, gfm_currents, gfm_flow, inverter_automaton, sigmoid,
    InverterParams, GFL, GFM,
};
pub use noise::{covariance_factor, GaussianStream};
pub use profile::VoltageProfile;
pub use scenario::{generate_truth_and_measurements, on_grid, InverterScenario, ScenarioData, DEFAULT_SEED};
pub use smib::{smib_state, smib_system, swing_flow, SmibParams};
