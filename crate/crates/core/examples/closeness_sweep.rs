//! How far the extracted bits are from uniform as the source loses entropy.
//!
//! cargo run --release --example closeness_sweep

use apm_lab::analysis::{closeness_sweep, OracleMode, SetFamily};
use apm_lab::SeededRng;

fn main() -> apm_lab::Result<()> {
    let (n, m) = (12, 3);
    let mut rng = SeededRng::new(1, 0);
    println!(" c   |A|    E[tvd]     E[tvd²]    c·√(α/n)");
    for row in closeness_sweep(n, m, &SetFamily::FirstBitsFixed, 0..=8, OracleMode::Exact, &mut rng)? {
        println!(
            "{:>2} {:>5}  {:.6}  {:.6}  {:.4}",
            row.c, row.set_size, row.report.mean, row.report.mean_sq, row.scale
        );
    }

    // Larger cubes: sample matchings instead of enumerating them.
    let rows = closeness_sweep(20, 4, &SetFamily::Random { seed: 3 }, 0..=6, OracleMode::MonteCarlo { trials: 2000 }, &mut rng)?;
    println!("\nn = 20, m = 4, random sets, Monte Carlo:");
    for row in rows {
        println!("{:>2}  {:.5} ± {:.5}", row.c, row.report.mean, row.report.stderr);
    }
    Ok(())
}
