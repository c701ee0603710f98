//! EKF on a damped oscillator; with linear dynamics it is a Kalman filter.

use hds::estimation::{run_ekf, EkfSettings, GaussianBelief, Measurement, NoiseModel, ProcessModel};
use hds::hybrid::integrate_flow;
use hds::power::GaussianStream;
use hds::State;
use nalgebra::{dmatrix, dvector};

pub fn run_example() -> hds::Result<f64> {
    let a = dmatrix![0.0, 1.0; -4.0, -0.4];
    let field = move |_t: f64, x: &State| &a * x;
    let dt = 1e-2;
    let truth = integrate_flow(&field, &dvector![1.0, 0.0], 0.0, 5.0, dt)?;
    let mut noise = GaussianStream::new(7);
    let measurements: Vec<Measurement> = truth
        .iter()
        .map(|(t, x)| Measurement {
            t: *t,
            z: dvector![x[0] + 0.05 * noise.standard_normal()],
        })
        .collect();
    let settings = EkfSettings {
        t0: 0.0,
        horizon: 5.0,
        dt,
        initial: GaussianBelief::isotropic(dvector![0.0, 0.0], 1.0)?,
        noise: NoiseModel::new(dmatrix![1e-6, 0.0; 0.0, 1e-6], dmatrix![0.0025], dmatrix![1.0, 0.0])?,
    };
    let run = run_ekf(&ProcessModel::Continuous { label: "oscillator", field: &field }, &settings, &measurements)?;
    let err = run
        .means()
        .iter()
        .zip(&truth)
        .skip(100)
        .map(|((_, e), (_, x))| (e[1] - x[1]).powi(2))
        .sum::<f64>();
    Ok((err / (truth.len() - 100) as f64).sqrt())
}

fn main() -> hds::Result<()> {
    println!("velocity RMSE after 1 s (position-only measurements): {:.4}", run_example()?);
    Ok(())
}
