//! Threshold-counting DFT tests, one P-value per sequence.
//!
//! All three variants count the magnitudes `|S_j|`, `j = 0..n/2`, that fall
//! strictly below a 95% threshold and standardize the count with a normal
//! approximation. They differ only in the threshold and in the variance
//! divisor of that approximation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstream::{to_signed, SequenceSet, SignedSequence};
use crate::error::{Error, Result};
use crate::spectrum::{magnitudes, SpectrumPlan, Workspace};
use crate::statfn::erfc;

/// Recommended first-level significance level.
pub const ALPHA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestVariant {
    /// 2001 test: T = √(3n), variance divisor 2.
    Original,
    /// Revised test: T = √(-n ln 0.05), variance divisor 4.
    Present,
    /// T = √(-n ln 0.05), variance divisor 3.8.
    Pareschi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    Sqrt3n,
    MinusNLn05,
}

impl TestVariant {
    pub const ALL: [TestVariant; 3] = [Self::Original, Self::Present, Self::Pareschi];

    pub fn threshold_rule(self) -> ThresholdRule {
        match self {
            Self::Original => ThresholdRule::Sqrt3n,
            Self::Present | Self::Pareschi => ThresholdRule::MinusNLn05,
        }
    }

    pub fn variance_divisor(self) -> f64 {
        match self {
            Self::Original => 2.0,
            Self::Present => 4.0,
            Self::Pareschi => 3.8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Original => "original",
            Self::Present => "present",
            Self::Pareschi => "pareschi",
        }
    }
}

impl fmt::Display for TestVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for TestVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(Self::Original),
            "present" | "kim" => Ok(Self::Present),
            "pareschi" => Ok(Self::Pareschi),
            other => Err(Error::Config(format!("unknown first-level variant `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstLevelResult {
    pub variant: TestVariant,
    pub n: usize,
    pub t95: f64,
    pub n1: usize,
    pub d: f64,
    pub p: f64,
}

impl FirstLevelResult {
    /// A sequence is judged random when `p >= alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.p >= alpha
    }
}

pub fn threshold(n: usize, variant: TestVariant) -> Result<f64> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if n == 0 {
        return Err(Error::Config("threshold for n = 0".into()));
    }
    let n = n as f64;
    Ok(match variant.threshold_rule() {
        ThresholdRule::Sqrt3n => (3.0 * n).sqrt(),
        ThresholdRule::MinusNLn05 => (-n * 0.05f64.ln()).sqrt(),
    })
}

/// Number of magnitudes strictly below `t95`, `j = 0` included.
pub fn count_below(mags: &[f64], t95: f64) -> usize {
    mags.iter().filter(|&&m| m < t95).count()
}

/// d = (N1 - 0.95·n/2) / √(0.95·0.05·n/v).
pub fn statistic_d(n1: usize, n: usize, variant: TestVariant) -> f64 {
    let n = n as f64;
    let expected = 0.95 * n / 2.0;
    let variance = 0.95 * 0.05 * n / variant.variance_divisor();
    (n1 as f64 - expected) / variance.sqrt()
}

pub fn p_value(d: f64) -> f64 {
    erfc(d.abs() / std::f64::consts::SQRT_2)
}

fn finish(variant: TestVariant, n: usize, mags: &[f64]) -> Result<FirstLevelResult> {
    let t95 = threshold(n, variant)?;
    let n1 = count_below(mags, t95);
    let d = statistic_d(n1, n, variant);
    Ok(FirstLevelResult {
        variant,
        n,
        t95,
        n1,
        d,
        p: p_value(d),
    })
}

/// Full single-sequence pipeline.
pub fn run_first_level(x: &SignedSequence, variant: TestVariant) -> Result<FirstLevelResult> {
    let plan = SpectrumPlan::new(x.len())?;
    let mut ws = plan.workspace();
    run_with_plan(&plan, &mut ws, x, variant)
}

pub fn run_with_plan(
    plan: &SpectrumPlan,
    ws: &mut Workspace,
    x: &SignedSequence,
    variant: TestVariant,
) -> Result<FirstLevelResult> {
    let coeffs = plan.coefficients(x, ws)?;
    finish(variant, x.len(), &magnitudes(&coeffs))
}

/// Runs several variants on every sequence of `set`, in parallel.
///
/// The outer vector follows `variants`, each inner vector follows the
/// sequence order of `set`. One transform per sequence is shared by all
/// variants.
pub fn run_set(set: &SequenceSet, variants: &[TestVariant]) -> Result<Vec<Vec<FirstLevelResult>>> {
    let plan = SpectrumPlan::new(set.n())?;
    let per_sequence: Vec<Vec<FirstLevelResult>> = set
        .sequences()
        .par_iter()
        .map_init(
            || plan.workspace(),
            |ws, bits| -> Result<Vec<FirstLevelResult>> {
                let coeffs = plan.coefficients(&to_signed(bits), ws)?;
                let mags = magnitudes(&coeffs);
                variants.iter().map(|&v| finish(v, set.n(), &mags)).collect()
            },
        )
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<FirstLevelResult>> = variants.iter().map(|_| Vec::with_capacity(set.m())).collect();
    for row in per_sequence {
        for (slot, result) in out.iter_mut().zip(row) {
            slot.push(result);
        }
    }
    Ok(out)
}
