//! First bits and bias of every generator in the corpus.
//!
//! ```text
//! cargo run --release --example generators -- [seed] [nbits]
//! ```

use dftt::generators::generate;
use dftt::{Family, GeneratorSpec};

fn main() -> dftt::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let seed = args.first().copied().unwrap_or(7);
    let nbits = args.get(1).copied().unwrap_or(1 << 20) as usize;
    for family in Family::ALL {
        let spec = GeneratorSpec::new(family, seed);
        let bits = generate(&spec, nbits)?;
        let head: String = bits.as_packed()[..8].iter().map(|b| format!("{b:02x}")).collect();
        let ones = bits.count_ones() as f64 / nbits as f64;
        println!("{:<16} {head}  ones = {ones:.5}", family.name());
    }
    let aes = GeneratorSpec::new(Family::AesCtr, 0)
        .with_param("key", "000102030405060708090a0b0c0d0e0f")
        .with_param("ctr", "00000000000000000000000000000000");
    println!(
        "aes-ctr with fixed key and counter: {}",
        generate(&aes, 128)?
            .iter()
            .map(|b| if b { '1' } else { '0' })
            .collect::<String>()
    );
    Ok(())
}
