//! Piecewise-affine saturation x⁺ = clamp(2x, −1, 1) over three regions.

use hds::hybrid::{pwa_step, AffineUpdate, PwaSystem, Region};
use hds::{Matrix, State};
use nalgebra::{dmatrix, dvector};

pub fn run_example() -> hds::Result<Vec<(f64, usize)>> {
    let regions = vec![
        Region::new(dmatrix![1.0], dvector![0.5])?,
        Region::new(dmatrix![1.0; -1.0], dvector![-0.5, -0.5])?,
        Region::new(dmatrix![-1.0], dvector![0.5])?,
    ];
    let saturate = |level: f64| AffineUpdate {
        a: Matrix::zeros(1, 1),
        b: Matrix::zeros(1, 1),
        c: dvector![level],
    };
    let dynamics = vec![
        saturate(-1.0),
        AffineUpdate {
            a: dmatrix![2.0],
            b: Matrix::zeros(1, 1),
            c: dvector![0.0],
        },
        saturate(1.0),
    ];
    let sys = PwaSystem::new(regions, dynamics)?;
    let mut x: State = dvector![0.01];
    let mut out = Vec::new();
    for _ in 0..8 {
        let region = sys.region_of(&x).expect("regions cover the line");
        x = pwa_step(&sys, &x, &dvector![0.0])?;
        out.push((x[0], region));
    }
    Ok(out)
}

fn main() -> hds::Result<()> {
    for (k, (x, region)) in run_example()?.into_iter().enumerate() {
        println!("k={k} region {region} -> x = {x}");
    }
    Ok(())
}
