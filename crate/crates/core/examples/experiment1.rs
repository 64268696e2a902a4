//! Periodically corrupted Mersenne Twister streams at desk scale.
//!
//! Every `T`-th bit is forced, alternating between 0 and 1, and each set of
//! `mn = 10⁶` bits goes through the proposed and the present test.
//!
//! ```text
//! cargo run --release --example experiment1 -- [sets] [T...]
//! ```

use dftt::experiments::{experiment1, BatteryVariant, ExperimentConfig};

fn main() -> dftt::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sets = args.first().copied().unwrap_or(5);
    let mut cfg = ExperimentConfig::desk(&[BatteryVariant::Proposed, BatteryVariant::Present], sets);
    cfg.periods = if args.len() > 1 {
        args[1..].to_vec()
    } else {
        vec![100, 110, 150]
    };

    let report = experiment1(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{:<8} {:<9} {:>6} {:>6}   per-set proportion / P_T",
        "period", "variant", "R_I", "R_II"
    );
    for row in &report.rows {
        let detail: Vec<String> = row
            .per_set
            .iter()
            .map(|s| format!("{:.3}/{:.0e}", s.second_level.proportion, s.second_level.p_t))
            .collect();
        println!(
            "{:<8} {:<9} {:>6.2} {:>6.2}   {}",
            row.label,
            row.variant,
            row.r_i,
            row.r_ii,
            detail.join(" ")
        );
    }
    Ok(())
}
