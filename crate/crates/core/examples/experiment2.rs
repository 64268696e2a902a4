//! Passing rates of the generator corpus at desk scale.
//!
//! ```text
//! cargo run --release --example experiment2 -- [sets] [family...]
//! ```

use dftt::experiments::{experiment2, BatteryVariant, ExperimentConfig};
use dftt::generators::GeneratorSpec;
use dftt::Family;

fn main() -> dftt::Result<()> {
    let mut args = std::env::args().skip(1);
    let sets = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let families: Vec<Family> = args.map(|a| a.parse()).collect::<dftt::Result<_>>()?;

    let mut cfg = ExperimentConfig::desk(&[BatteryVariant::Proposed, BatteryVariant::Present], sets);
    if !families.is_empty() {
        cfg.families = families.into_iter().map(|f| GeneratorSpec::new(f, 0)).collect();
    }
    let report = experiment2(&cfg)?;
    println!(
        "{:<16} {:<9} {:>6} {:>6} {:>10} {:>10}",
        "generator", "variant", "R_I", "R_II", "pooled", "pooled P_T"
    );
    for row in &report.rows {
        println!(
            "{:<16} {:<9} {:>6.2} {:>6.2} {:>10.4} {:>10.2e}",
            row.label, row.variant, row.r_i, row.r_ii, row.second_level.proportion, row.second_level.p_t
        );
    }
    Ok(())
}
