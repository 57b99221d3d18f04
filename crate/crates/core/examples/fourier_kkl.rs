//! Fourier spectrum of a set indicator and the KKL level inequality.
//!
//! cargo run --example fourier_kkl

use apm_lab::analysis::SetFamily;
use apm_lab::spectral::{fwht, kkl_margin, level_weights};

fn main() -> apm_lab::Result<()> {
    let n = 10;
    for family in ["first-bits-fixed", "prefix-parity", "random:7"] {
        let a = SetFamily::parse(family, 0)?.build(n, 3)?;
        let f = a.indicator();
        let spectrum = fwht(f.clone());
        let levels = level_weights(&spectrum);
        let shown: Vec<String> = levels.iter().map(|w| format!("{w:.2e}")).collect();
        println!("{family:>18}  |A| = {}  level weights [{}]", a.len(), shown.join(" "));
        for delta in [0.25, 0.5, 1.0] {
            let k = kkl_margin(&f, delta)?;
            println!("{:>18}  δ = {delta:<4}  {:.3e} ≤ {:.3e}", "", k.lhs, k.rhs);
        }
    }
    Ok(())
}
