//! A switched system on a fixed schedule, simulated through its lift.

use std::sync::Arc;

use hds::hybrid::{lift_switched, lifted_initial, simulate, SimOptions, SwitchedSystem, VectorField};
use hds::State;
use nalgebra::dvector;

pub fn run_example() -> hds::Result<State> {
    let slow: VectorField = Arc::new(|_t, x: &State| -x);
    let fast: VectorField = Arc::new(|_t, x: &State| x * -3.0);
    let sw = SwitchedSystem::new(1, vec![slow, fast], vec![0.25, 0.5], vec![0, 1, 0])?;
    let lifted = lift_switched(&sw);
    let traj = simulate(&lifted, 0, &lifted_initial(&sw, &dvector![1.0], 0.0), &SimOptions::new(1.0, 1e-3))?;
    for j in &traj.jumps {
        println!("switch at t = {} ({})", j.time.t, j.edge);
    }
    Ok(traj.last().state.clone())
}

fn main() -> hds::Result<()> {
    let end = run_example()?;
    println!("x(1) = {:.9}, exact {:.9}", end[0], (-0.75f64 - 0.75).exp());
    Ok(())
}
