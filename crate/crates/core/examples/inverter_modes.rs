//! GFL/GFM inverter riding through a voltage dip: truth trajectory and the
//! clamp applied on entry to grid-forming mode.

use hds::power::{generate_truth_and_measurements, InverterScenario};

pub fn run_example() -> hds::Result<Vec<(String, f64)>> {
    let scenario = InverterScenario::reference(42);
    let data = generate_truth_and_measurements(&scenario)?;
    for (pre, post) in data.truth.samples.windows(2).map(|w| (&w[0], &w[1])) {
        if post.time.j > pre.time.j {
            println!(
                "t = {:.6}: {} -> {}, i = [{:.3}, {:.3}] -> [{:.3}, {:.3}]",
                post.time.t,
                data.truth.mode_name(pre.mode),
                data.truth.mode_name(post.mode),
                pre.state[0],
                pre.state[1],
                post.state[0],
                post.state[1]
            );
        }
    }
    let last = &data.truth.last().state;
    println!("final state {:.4?}", last.as_slice());
    Ok(data.truth.jumps.iter().map(|j| (j.edge.clone(), j.time.t)).collect())
}

fn main() -> hds::Result<()> {
    run_example()?;
    Ok(())
}
