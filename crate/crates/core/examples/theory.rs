//! Monte-Carlo checks of the coefficient and power-spectrum limit laws.
//!
//! ```text
//! cargo run --release --example theory -- [n] [j] [trials]
//! ```

use dftt::theory::{verify_all, TheoryConfig};

fn main() -> dftt::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let defaults = TheoryConfig::default();
    let cfg = TheoryConfig {
        n: args.first().copied().unwrap_or(defaults.n),
        j: args.get(1).copied().unwrap_or(defaults.j),
        trials: args.get(2).copied().unwrap_or(defaults.trials),
        ..defaults
    };
    for report in verify_all(&cfg)? {
        println!("{:?}: {:?}", report.target, report.verdict);
        for (k, v) in &report.statistics {
            println!("    {k:<28} {v:.6}");
        }
        for (k, v) in &report.pvalues {
            println!("    p[{k}]{:<w$} {v:.3e}", "", w = 25 - k.len());
        }
    }
    Ok(())
}
