//! Hybrid dynamical systems toolkit.
//!
//! The crate models systems that mix continuous evolution with instantaneous
//! discrete transitions, and estimates their state:
//!
//! * [`hybrid`] holds the representations (flow/jump data, hybrid automata,
//!   switched, piecewise-affine and mixed logical dynamical systems) and a
//!   fixed-step simulator that localizes guard crossings and accounts for
//!   hybrid time `(t, j)`.
//! * [`estimation`] implements an extended Kalman filter whose covariance is
//!   carried across jumps by a saltation matrix.
//! * [`power`] provides concrete power-system models: a single machine
//!   infinite bus with line switching, and a grid-following/grid-forming
//!   inverter with its hybrid automaton and a sigmoid-blended continuous
//!   counterpart.
//! * [`harness`] drives experiments: configuration files, RMSE reports,
//!   trajectory CSVs and the `hds` command line.
//!
//! Runnable programs for each capability live under `examples/`.

pub mod error;
pub mod estimation;
pub mod harness;
pub mod hybrid;
pub mod power;

pub use error::{Error, Result};

/// Continuous state of a system. Dimension is fixed per system.
pub type State = nalgebra::DVector<f64>;

/// Dense real matrix used for Jacobians and covariances.
pub type Matrix = nalgebra::DMatrix<f64>;
