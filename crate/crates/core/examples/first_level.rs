//! The three threshold-counting variants on one generated sequence.
//!
//! ```text
//! cargo run --release --example first_level -- [family] [seed] [n]
//! ```

use dftt::bitstream::to_signed;
use dftt::firstlevel::{run_first_level, ALPHA};
use dftt::generators::generate;
use dftt::{Family, GeneratorSpec, TestVariant};

fn main() -> dftt::Result<()> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("mt19937").parse()?;
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);

    let x = to_signed(&generate(&GeneratorSpec::new(family, seed), n)?);
    for variant in TestVariant::ALL {
        let r = run_first_level(&x, variant)?;
        println!(
            "{:<9} T95 = {:>8.3}  N1 = {:>6}  d = {:>7.3}  p = {:.4}  {}",
            variant,
            r.t95,
            r.n1,
            r.d,
            r.p,
            if r.passes(ALPHA) { "random" } else { "non-random" }
        );
    }
    Ok(())
}
