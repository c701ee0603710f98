//! Hybrid versus sigmoid-blended EKF on the reference voltage dip.

use hds::harness::{run_comparison, ExperimentConfig, FilterKind};

pub fn run_example() -> hds::Result<(Vec<f64>, Vec<f64>)> {
    let cmp = run_comparison(&ExperimentConfig::default(), 42)?;
    println!("{}", cmp.report.table());
    println!("switching instants {:?}", cmp.report.switching_times);
    let overall = |k| cmp.report.get(k).map(|f| f.overall.clone()).unwrap_or_default();
    Ok((overall(FilterKind::Hybrid), overall(FilterKind::Continuous)))
}

fn main() -> hds::Result<()> {
    let (h, c) = run_example()?;
    println!("v_d RMSE ratio continuous / hybrid = {:.2}", c[2] / h[2]);
    Ok(())
}
