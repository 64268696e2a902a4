//! Per-frequency KS test over m sequences, with and without a periodic defect.
//!
//! ```text
//! cargo run --release --example proposed -- [n] [m] [period]
//! ```

use dftt::bitstream::partition;
use dftt::generators::{generate, make_experiment1_stream};
use dftt::proposed::run_proposed;
use dftt::{Family, GeneratorSpec};

fn main() -> dftt::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n, m, period) = (
        args.first().copied().unwrap_or(4000),
        args.get(1).copied().unwrap_or(250),
        args.get(2).copied().unwrap_or(100),
    );
    let spec = GeneratorSpec::new(Family::Mt19937, 2024);

    let clean = partition(&generate(&spec, n * m)?, n, m)?;
    let corrupted = partition(&make_experiment1_stream(&spec, period, n * m)?.to_bits(), n, m)?;
    for (name, set) in [("clean", clean), ("corrupted", corrupted)] {
        let result = run_proposed(&set)?;
        let mut worst: Vec<(usize, f64)> = result.pvalues.iter().enumerate().map(|(i, &p)| (i + 1, p)).collect();
        worst.sort_by(|a, b| a.1.total_cmp(&b.1));
        let shown: Vec<String> = worst.iter().take(5).map(|(j, p)| format!("j={j}: {p:.1e}")).collect();
        let below = result.pvalues.iter().filter(|&&p| p < 0.01).count();
        println!(
            "{name:<10} {below:>4} of {} bins below 0.01; smallest {}",
            result.pvalues.len(),
            shown.join(", ")
        );
    }
    Ok(())
}
