//! Extended Kalman filtering with saltation-matrix covariance propagation.

mod belief;
mod ekf;
mod filter;
mod jacobian;
mod saltation;

pub use belief::{GaussianBelief, NoiseModel, PSD_TOL, SYMMETRY_TOL};
pub use ekf::{ekf_predict, ekf_update, kalman_gain, propagate};
pub use filter::{run_ekf, EkfRun, EkfSettings, Measurement, ProcessModel};
pub use jacobian::{numerical_gradient, numerical_jacobian, JACOBIAN_STEP};
pub use saltation::{
    propagate_belief_through_jump, saltation_for_edge, saltation_matrix, JumpLinearization, SaltationMatrix,
    TRANSVERSALITY_TOL,
};
