//! Locating when a ramp in grid voltage crosses a threshold.

use hds::hybrid::{locate_crossing, EVENT_TOLERANCE};
use hds::power::VoltageProfile;

pub fn run_example() -> hds::Result<f64> {
    let profile = VoltageProfile::reference_dip();
    let v_low = 0.8;
    let t = locate_crossing(|t| v_low - profile.at(t), 0.0504, 0.0591)?
        .expect("the dip crosses the threshold");
    println!("V falls to {v_low} at t = {t:.12} (tolerance {EVENT_TOLERANCE:e})");
    Ok(t)
}

fn main() -> hds::Result<()> {
    let t = run_example()?;
    println!("analytic crossing 0.054, error {:.3e}", (t - 0.054).abs());
    Ok(())
}
