//! Second-level outcomes of the proposed test across n at fixed mn.
//!
//! Small n gives few P-values per set, large n gives few sequences per bin.
//!
//! ```text
//! cargo run --release --example n_sweep -- [period]
//! ```

use dftt::experiments::{n_sweep, BatteryConfig, BatteryVariant, SweepConfig, DESK_MN};
use dftt::{Family, GeneratorSpec};

fn main() -> dftt::Result<()> {
    let period = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let cfg = SweepConfig {
        battery: BatteryConfig::new(BatteryVariant::Proposed),
        ns: vec![1000, 2000, 4000, 8000, 10_000],
        mn: DESK_MN,
        sets: 5,
        base_seed: 1,
        source: GeneratorSpec::new(Family::Mt19937, 0),
        period,
    };
    let report = n_sweep(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for row in &report.rows {
        println!(
            "{:<8} m = {:>5}  P-values/set = {:>5}  R_I = {:.2}  R_II = {:.2}",
            row.label,
            row.m,
            row.n / 2 - 1,
            row.r_i,
            row.r_ii
        );
    }
    Ok(())
}
