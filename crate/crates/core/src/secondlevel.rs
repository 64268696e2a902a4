//! Second-level analyses over a set of P-values.
//!
//! Test I checks that the share of P-values at or above `alpha` lies strictly
//! inside `1 - alpha ± z·√(alpha(1 - alpha)/m)`. Test II bins the P-values into
//! deciles and computes `P_T = Q(9/2, χ²/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statfn::igamc;

pub const ALPHA_I: f64 = 0.01;
pub const ALPHA_II: f64 = 0.0001;
/// z-factor of the NIST-standard interval.
pub const Z_NIST: f64 = 3.0;
/// z-factor giving a 99% two-sided interval.
pub const Z_99: f64 = 2.575;

/// Uniformity checks are unreliable below this many P-values.
pub const MIN_UNIFORMITY_COUNT: usize = 55;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionOutcome {
    pub m: usize,
    pub m_p: usize,
    pub proportion: f64,
    pub interval: (f64, f64),
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityOutcome {
    pub deciles: [usize; 10],
    pub chi2: f64,
    pub p_t: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondLevelReport {
    pub m: usize,
    pub m_p: usize,
    pub proportion: f64,
    pub interval: (f64, f64),
    #[serde(rename = "pass_I")]
    pub pass_i: bool,
    pub deciles: [usize; 10],
    pub chi2: f64,
    #[serde(rename = "P_T")]
    pub p_t: f64,
    #[serde(rename = "pass_II")]
    pub pass_ii: bool,
    pub alpha_i: f64,
    pub alpha_ii: f64,
    pub z_factor: f64,
}

impl SecondLevelReport {
    pub fn passes(&self) -> bool {
        self.pass_i && self.pass_ii
    }
}

/// `1 - alpha ± z·√(alpha(1 - alpha)/m)`.
pub fn proportion_interval(alpha: f64, z: f64, m: usize) -> (f64, f64) {
    let centre = 1.0 - alpha;
    let half = z * (alpha * (1.0 - alpha) / m as f64).sqrt();
    (centre - half, centre + half)
}

pub fn proportion_test(pvalues: &[f64], alpha: f64, z: f64) -> Result<ProportionOutcome> {
    if pvalues.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if z.is_nan() || z <= 0.0 {
        return Err(Error::Config(format!("z-factor must be positive, got {z}")));
    }
    let m = pvalues.len();
    let m_p = pvalues.iter().filter(|&&p| p >= alpha).count();
    let proportion = m_p as f64 / m as f64;
    let interval = proportion_interval(alpha, z, m);
    Ok(ProportionOutcome {
        m,
        m_p,
        proportion,
        interval,
        pass: interval.0 < proportion && proportion < interval.1,
    })
}

/// Decile index: `[0, 0.1), …, [0.8, 0.9), [0.9, 1.0]`.
fn decile(p: f64) -> usize {
    ((p * 10.0).floor().max(0.0) as usize).min(9)
}

pub fn decile_counts(pvalues: &[f64]) -> [usize; 10] {
    let mut counts = [0usize; 10];
    for &p in pvalues {
        counts[decile(p)] += 1;
    }
    counts
}

pub fn uniformity_test(pvalues: &[f64], alpha_ii: f64) -> Result<UniformityOutcome> {
    if pvalues.is_empty() {
        return Err(Error::EmptySet);
    }
    let deciles = decile_counts(pvalues);
    let expected = pvalues.len() as f64 / 10.0;
    let chi2: f64 = deciles
        .iter()
        .map(|&f| {
            let diff = f as f64 - expected;
            diff * diff / expected
        })
        .sum();
    let p_t = igamc(4.5, chi2 / 2.0)?;
    Ok(UniformityOutcome {
        deciles,
        chi2,
        p_t,
        pass: p_t >= alpha_ii,
    })
}

pub fn second_level(pvalues: &[f64], alpha_i: f64, alpha_ii: f64, z: f64) -> Result<SecondLevelReport> {
    let prop = proportion_test(pvalues, alpha_i, z)?;
    let unif = uniformity_test(pvalues, alpha_ii)?;
    Ok(SecondLevelReport {
        m: prop.m,
        m_p: prop.m_p,
        proportion: prop.proportion,
        interval: prop.interval,
        pass_i: prop.pass,
        deciles: unif.deciles,
        chi2: unif.chi2,
        p_t: unif.p_t,
        pass_ii: unif.pass,
        alpha_i,
        alpha_ii,
        z_factor: z,
    })
}
