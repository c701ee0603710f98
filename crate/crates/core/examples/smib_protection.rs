//! Two-line SMIB: nominal swing, then a sampled search for initial
//! conditions that trip line 1 on overcurrent.

use hds::hybrid::{check_safety, simulate, BoxSampler, SafetyVerdict, SimOptions};
use hds::power::smib::LINE;
use hds::power::{smib_state, smib_system, SmibParams};
use nalgebra::dvector;

pub fn run_example() -> hds::Result<Option<f64>> {
    let p = SmibParams::default();
    let sys = smib_system(&p)?;
    let opts = SimOptions::new(2.0, 1e-3);
    let nominal = simulate(&sys, 0, &smib_state(0.2, 0.0, 1), &opts)?;
    let end = &nominal.last().state;
    println!(
        "nominal: δ(2) = {:.4}, equilibrium {:.4}, jumps {}",
        end[0],
        p.equilibrium_angle(1.0).unwrap(),
        nominal.jump_count()
    );

    let tight = smib_system(&SmibParams { i_max: 0.5, ..p })?;
    let mut sampler = BoxSampler::new(0, dvector![0.1, -0.2, 1.0], dvector![0.3, 0.2, 1.0], 42)?;
    let verdict = check_safety(&tight, &mut sampler, |s| s.state[LINE] > 1.5, &opts, 20)?;
    Ok(match verdict {
        SafetyVerdict::Unsafe(c) => Some(c.entry_sample().time.t),
        SafetyVerdict::NoCounterexampleFound { .. } => None,
    })
}

fn main() -> hds::Result<()> {
    match run_example()? {
        Some(t) => println!("with I_max = 0.5 line 1 trips at t = {t:.6}"),
        None => println!("no trip found"),
    }
    Ok(())
}
