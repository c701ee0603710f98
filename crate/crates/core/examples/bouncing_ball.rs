//! Flow/jump system: a ball with restitution 0.8 dropped from 1 m.

use hds::hybrid::{simulate, FlowJumpSystem, SimOptions};
use hds::State;
use nalgebra::dvector;

const G: f64 = 9.81;

pub fn run_example() -> hds::Result<Vec<f64>> {
    let ball = FlowJumpSystem::new(2, |_t, x: &State| dvector![x[1], -G])
        .with_flow_set(|_t, x: &State| x[0])
        .with_jump(|_t, x: &State| -x[0].max(x[1]), |_t, x: &State| dvector![0.0, -0.8 * x[1]]);
    let traj = simulate(&ball, 0, &dvector![1.0, 0.0], &SimOptions::new(2.0, 1e-3))?;
    for j in &traj.jumps {
        println!("impact {} at t = {:.6}", j.time.j, j.time.t);
    }
    Ok(traj.jump_times())
}

fn main() -> hds::Result<()> {
    let impacts = run_example()?;
    println!("first impact predicted at {:.6}", (2.0 / G).sqrt());
    println!("{} impacts in 2 s", impacts.len());
    Ok(())
}
