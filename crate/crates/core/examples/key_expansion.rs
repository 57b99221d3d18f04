//! Bounded-storage key expansion: a c-bit classical memory is nearly useless,
//! one stored fingerprint state is not.
//!
//! cargo run --release --example key_expansion

use apm_lab::adversary::{key_expansion_report, MemorySpec};
use apm_lab::SeededRng;

fn main() -> apm_lab::Result<()> {
    let mut rng = SeededRng::new(9, 0);
    let (n, m) = (12, 3);
    println!("memory        c   classical adv   quantum adv (log n = {:.2} qubits)", (n as f64).log2());
    for spec in ["first:0", "first:2", "first:3", "first:4", "subset:0,1,2,3", "first:12"] {
        let spec = MemorySpec::parse(spec, n)?;
        let r = key_expansion_report(&spec, n, m, 50_000, &mut rng)?;
        println!(
            "{:<12} {:>2}   {:.6}        {:.4} ± {:.4}",
            r.memory,
            r.c,
            r.classical_advantage,
            r.quantum_advantage(),
            r.quantum_stderr
        );
    }
    Ok(())
}
