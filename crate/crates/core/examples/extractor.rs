//! Matchings and the parity extractor z = Mx.
//!
//! cargo run --example extractor

use apm_lab::matching::{count_matchings, enumerate_matchings, sample_matching};
use apm_lab::{BitString, Matching, SeededRng};

fn main() -> apm_lab::Result<()> {
    let x: BitString = "10110010".parse()?;
    let mm = Matching::parse_inline(8, "0 5;2 3")?;
    let z = mm.extract(&x)?;
    println!("x = {x}, M = {mm}, z = Mx = {z}");

    // Mᵀs marks both endpoints of every edge selected by s.
    let s: BitString = "11".parse()?;
    println!("Mᵀ{s} = {}", mm.transpose_apply(&s)?);

    println!("|M(8, 2)| = {}", count_matchings(8, 2)?);
    println!("|M(64, 32)| = {}", count_matchings(64, 32)?);
    for m in enumerate_matchings(4, 2)? {
        println!("  perfect matching of [4]: {m}");
    }

    let mut rng = SeededRng::new(42, 0);
    let drawn = sample_matching(16, 4, &mut rng)?;
    println!("uniform 4-matching on 16 vertices: {drawn}, completed: {}", drawn.complete()?);
    Ok(())
}
