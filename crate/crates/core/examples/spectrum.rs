//! Fourier coefficients and power spectrum of one sequence.
//!
//! ```text
//! cargo run --example spectrum -- 0110100110010110
//! ```

use dftt::bitstream::{parse_ascii01, to_signed};
use dftt::spectrum::{dft_coefficients, magnitudes, power_spectrum};

fn main() -> dftt::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "1100110011001100".into());
    let x = to_signed(&parse_ascii01(text.as_bytes())?);
    let coeffs = dft_coefficients(&x)?;
    let z = power_spectrum(&coeffs);
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "j", "c_j", "s_j", "|S_j|", "z_j");
    for (j, mag) in magnitudes(&coeffs).iter().enumerate() {
        println!(
            "{j:>3} {:>10.4} {:>10.4} {mag:>10.4} {:>10.4}",
            coeffs.c[j], coeffs.s[j], z.z[j]
        );
    }
    Ok(())
}
