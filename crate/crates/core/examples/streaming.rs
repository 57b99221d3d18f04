//! The log n-qubit streaming algorithm on a shuffled event stream.
//!
//! cargo run --release --example streaming

use apm_lab::protocols::sample_hard_instance;
use apm_lab::qsim::{format_stream, instance_events, run_streaming};
use apm_lab::SeededRng;
use rand::seq::SliceRandom;

fn main() -> apm_lab::Result<()> {
    let mut rng = SeededRng::new(11, 0);
    let inst = sample_hard_instance(8, 2, &mut rng)?;
    let mut events = instance_events(&inst.x, &inst.matching, &inst.w)?;
    events.shuffle(&mut rng);
    print!("{}", format_stream(&events));
    println!("hidden b = {}", inst.b as u8);

    let trials = 20_000;
    let mut caught = 0;
    for _ in 0..trials {
        if let Some(o) = run_streaming(8, &events, &mut rng)? {
            assert_eq!(o.bit, inst.b);
            caught += 1;
        }
    }
    println!("caught an edge in {caught}/{trials} runs; every caught edge gave b");
    Ok(())
}
