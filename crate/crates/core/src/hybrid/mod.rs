//! Hybrid system representations and simulation semantics.

mod event;
mod integrate;
mod mld;
mod pwa;
mod safety;
mod simulate;
mod switched;
mod system;
mod trajectory;

pub use event::{locate_crossing, locate_event, EVENT_TOLERANCE};
pub use integrate::{integrate_flow, rk4_step, StepGrid};
pub use mld::{mld_step, MldDims, MldSystem};
pub use pwa::{pwa_step, AffineUpdate, PwaSystem, Region};
pub use safety::{check_safety, BoxSampler, Counterexample, InitialSampler, SafetyVerdict};
pub use simulate::{simulate, SimOptions, ZENO_BUDGET};
pub use switched::{lift_switched, lifted_initial, SwitchedSystem};
pub use system::{
    AutomatonBuilder, EdgeId, FlowJumpSystem, HybridAutomaton, HybridModel, InitSet, Margin, ModeId, ResetJacobian,
    ResetMap, VectorField,
};
pub use trajectory::{HybridTime, HybridTrajectory, JumpRecord, Sample, Termination};

pub(crate) use integrate::ensure_finite;
pub(crate) use simulate::{enabled_edge, scan_step, StepEvent};
