//! Spectral (DFT) randomness tests for binary sequences.
//!
//! The crate covers the threshold-counting DFT test in three variants, the
//! per-frequency KS test of the power spectrum, the second-level proportion
//! and uniformity analyses, a set of reference generators, Monte-Carlo checks
//! of the limit laws, and the passing-rate experiments built on all of these.

pub mod bitstream;
pub mod error;
pub mod experiments;
pub mod firstlevel;
pub mod generators;
pub mod proposed;
pub mod secondlevel;
pub mod spectrum;
pub mod statfn;
pub mod theory;

pub use bitstream::{partition, to_signed, BitFormat, BitSequence, SequenceSet, SignedSequence};
pub use error::{Error, Result};
pub use experiments::{
    battery_report, experiment1, experiment2, n_sweep, report_emit, run_battery, BatteryConfig, BatteryVariant,
    ExperimentConfig, PValueSet, PassingRateReport, ReportFormat,
};
pub use firstlevel::{run_first_level, FirstLevelResult, TestVariant};
pub use generators::{Family, Generator, GeneratorSpec};
pub use proposed::{run_proposed, ProposedResult};
pub use secondlevel::{second_level, SecondLevelReport};
pub use spectrum::{power_spectrum, PowerSpectrum, SpectrumPlan};
