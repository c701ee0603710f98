//! Saltation matrix at a state-triggered guard versus the reset Jacobian.

use hds::estimation::{saltation_matrix, JumpLinearization};
use hds::{Matrix, State};
use nalgebra::{dmatrix, dvector};

pub fn run_example() -> hds::Result<Matrix> {
    let pre = |x: &State| dvector![1.0, x[0]];
    let post = |x: &State| dvector![-1.0, 0.5 * x[1]];
    let reset = |x: &State| dvector![x[0], 0.5 * x[1]];
    let x_minus = dvector![1.0, 0.3];
    let gradient = dvector![1.0, 0.0];
    let xi = saltation_matrix(&JumpLinearization {
        edge: "x0 reaches 1",
        t: 1.0,
        x_minus: &x_minus,
        reset: &reset,
        reset_jacobian: Some(dmatrix![1.0, 0.0; 0.0, 0.5]),
        f_pre: &pre,
        f_post: &post,
        guard_gradient: &gradient,
    })?;
    Ok(xi.matrix)
}

fn main() -> hds::Result<()> {
    let xi = run_example()?;
    println!("reset Jacobian diag(1, 0.5); saltation matrix:{xi}");
    Ok(())
}
