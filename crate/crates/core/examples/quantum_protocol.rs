//! Alice sends one fingerprint state; Bob measures in his matching's basis.
//!
//! cargo run --release --example quantum_protocol

use apm_lab::protocols::{estimate_success, Solver};
use apm_lab::qsim::{make_fingerprint_state, matching_outcome_probs, run_quantum_message_protocol};
use apm_lab::{BitString, Matching, SeededRng};

fn main() -> apm_lab::Result<()> {
    let x: BitString = "01101001".parse()?;
    let mm = Matching::parse_inline(8, "0 1;4 6")?;
    let state = make_fingerprint_state(&x)?;
    let full = mm.complete()?;
    println!("outcome probabilities for {full}: {:?}", matching_outcome_probs(&state, &full));

    let mut rng = SeededRng::new(5, 0);
    let z = mm.extract(&x)?;
    for _ in 0..6 {
        match run_quantum_message_protocol(&x, &mm, &mut rng)? {
            Some(l) => println!("learned z_{} = {} (true {})", l.edge, l.bit as u8, z.get(l.edge) as u8),
            None => println!("landed outside M: no bit, and Bob knows it"),
        }
    }

    for copies in [1, 2, 4, 8] {
        let r = estimate_success(Solver::Quantum { copies }, 8, 2, 50_000, &mut rng)?;
        println!("t = {copies}: success {:.4} ± {:.4}", r.rate, r.stderr);
    }
    Ok(())
}
