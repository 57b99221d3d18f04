//! One fingerprint state (log n qubits) against d revealed bits of x.
//!
//! cargo run --release --example classical_vs_quantum

use apm_lab::protocols::{covered_edge_prob_exact, estimate_success, Solver};
use apm_lab::SeededRng;
use num_traits::ToPrimitive;

fn main() -> apm_lab::Result<()> {
    let (n, m, trials) = (16, 4, 100_000);
    let mut rng = SeededRng::new(3, 0);
    let q = Solver::Quantum { copies: 1 };
    let r = estimate_success(q, n, m, trials, &mut rng)?;
    let (cost, unit) = q.message_cost(n);
    println!("quantum   {cost:>3} {unit:<6} {:.4} ± {:.4}", r.rate, r.stderr);
    for d in [0, 1, 2, 4, 8, 12, 16] {
        let s = Solver::Classical { d };
        let r = estimate_success(s, n, m, trials, &mut rng)?;
        let predicted = 0.5 + covered_edge_prob_exact(n, m, d)?.to_f64().unwrap() / 2.0;
        let (cost, unit) = s.message_cost(n);
        println!("classical {cost:>3} {unit:<6} {:.4} ± {:.4}  (predicted {predicted:.4})", r.rate, r.stderr);
    }
    Ok(())
}
