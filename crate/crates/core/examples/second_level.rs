//! Proportion and uniformity tests over a set of P-values.
//!
//! Reads one P-value per line from stdin, or uses a built-in sample.
//!
//! ```text
//! printf '0.5\n0.004\n0.93\n' | cargo run --example second_level
//! ```

use std::io::{IsTerminal, Read};

use dftt::secondlevel::{second_level, ALPHA_I, ALPHA_II, Z_99, Z_NIST};

fn main() -> dftt::Result<()> {
    let mut pvalues: Vec<f64> = Vec::new();
    if !std::io::stdin().is_terminal() {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        pvalues = text.split_whitespace().filter_map(|t| t.parse().ok()).collect();
    }
    if pvalues.is_empty() {
        pvalues = (0..200).map(|i| ((i * 37 % 200) as f64 + 0.5) / 200.0).collect();
    }
    for z in [Z_99, Z_NIST] {
        let r = second_level(&pvalues, ALPHA_I, ALPHA_II, z)?;
        println!(
            "z = {z}: {}/{} pass, proportion {:.4} in ({:.4}, {:.4}) -> test I {}",
            r.m_p,
            r.m,
            r.proportion,
            r.interval.0,
            r.interval.1,
            if r.pass_i { "pass" } else { "fail" }
        );
    }
    let r = second_level(&pvalues, ALPHA_I, ALPHA_II, Z_99)?;
    println!(
        "deciles {:?}, chi2 = {:.3}, P_T = {:.4} -> test II {}",
        r.deciles,
        r.chi2,
        r.p_t,
        if r.pass_ii { "pass" } else { "fail" }
    );
    Ok(())
}
