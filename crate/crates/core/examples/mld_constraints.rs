//! Mixed logical dynamical step: δ = [x ≥ 0] encoded by big-M inequalities,
//! z = δ·x, x⁺ = 0.5 x + z.

use hds::hybrid::{mld_step, MldDims, MldSystem};
use nalgebra::{dmatrix, dvector};

const M: f64 = 10.0;

fn system() -> MldSystem {
    let mut s = MldSystem::zeros(MldDims { nx: 1, nu: 1, nd: 1, nz: 1, ny: 1, nc: 6 });
    s.a = dmatrix![0.5];
    s.b3 = dmatrix![1.0];
    s.c = dmatrix![1.0];
    // δ = 1 ⇒ x ≥ 0, δ = 0 ⇒ x ≤ 0; z = δ x via four big-M rows
    s.e2 = dmatrix![M; -M; -M; -M; M; M];
    s.e3 = dmatrix![0.0; 0.0; 1.0; -1.0; 1.0; -1.0];
    s.e4 = dmatrix![1.0; -1.0; 0.0; 0.0; 1.0; -1.0];
    s.e5 = dvector![M, 0.0, 0.0, 0.0, M, M];
    s
}

pub fn run_example() -> hds::Result<(f64, Vec<usize>)> {
    let sys = system();
    let x = dvector![2.0];
    let (next, _) = mld_step(&sys, &x, &dvector![0.0], &dvector![1.0], &dvector![2.0])?;
    let bad = match mld_step(&sys, &x, &dvector![0.0], &dvector![0.0], &dvector![2.0]) {
        Err(hds::Error::Infeasible { rows }) => rows,
        other => panic!("expected infeasible, got {other:?}"),
    };
    Ok((next[0], bad))
}

fn main() -> hds::Result<()> {
    let (next, rows) = run_example()?;
    println!("consistent (δ, z) = (1, 2): x⁺ = {next}");
    println!("inconsistent (δ, z) = (0, 2) violates rows {rows:?}");
    Ok(())
}
