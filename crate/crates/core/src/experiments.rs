//! Batteries, passing-rate experiments and report output.
//!
//! A battery runs one test variant over `m` sequences of `n` bits and feeds
//! the resulting P-values to both second-level tests. An experiment repeats
//! batteries over `sets` independently seeded super-sequences and reports the
//! fraction of sets passing each second-level test.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstream::{partition, read_bits, BitFormat, BitSequence};
use crate::error::{Error, Result};
use crate::firstlevel::{self, TestVariant};
use crate::generators::{derive_seed, generate, make_experiment1_stream, Family, GeneratorSpec};
use crate::proposed::{run_proposed_with, ProposedOptions};
use crate::secondlevel::{
    decile_counts, second_level, SecondLevelReport, ALPHA_I, ALPHA_II, MIN_UNIFORMITY_COUNT, Z_99,
};

pub const DESK_MN: usize = 1_000_000;
pub const FULL_MN: usize = 100_000_000;
/// Largest advisable number of proposed-test P-values per battery.
pub const MAX_PROPOSED_PVALUES: usize = 4795;

pub const DEFAULT_PERIODS: [usize; 24] = [
    100, 101, 102, 103, 104, 105, 106, 107, 108, 109, 110, 111, 112, 113, 114, 115, 116, 117, 118, 119, 120, 130, 140,
    150,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatteryVariant {
    Original,
    Present,
    Pareschi,
    Proposed,
}

impl BatteryVariant {
    pub const ALL: [BatteryVariant; 4] = [Self::Original, Self::Present, Self::Pareschi, Self::Proposed];

    pub fn first_level(self) -> Option<TestVariant> {
        match self {
            Self::Original => Some(TestVariant::Original),
            Self::Present => Some(TestVariant::Present),
            Self::Pareschi => Some(TestVariant::Pareschi),
            Self::Proposed => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self.first_level() {
            Some(v) => v.name(),
            None => "proposed",
        }
    }

    /// `(n, m)` at `mn = 10⁶`.
    pub fn desk_shape(self) -> (usize, usize) {
        match self {
            Self::Proposed => (4000, 250),
            _ => (100_000, 10),
        }
    }

    /// `(n, m)` at `mn = 10⁸`.
    pub fn full_shape(self) -> (usize, usize) {
        match self {
            Self::Proposed => (4000, 25_000),
            _ => (100_000, 1000),
        }
    }

    /// Expected number of P-values from one battery.
    pub fn pvalue_count(self, n: usize, m: usize) -> usize {
        match self {
            Self::Proposed => n / 2 - 1,
            _ => m,
        }
    }
}

impl From<TestVariant> for BatteryVariant {
    fn from(v: TestVariant) -> Self {
        match v {
            TestVariant::Original => Self::Original,
            TestVariant::Present => Self::Present,
            TestVariant::Pareschi => Self::Pareschi,
        }
    }
}

impl fmt::Display for BatteryVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for BatteryVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("proposed") || s.eq_ignore_ascii_case("ms-dft") {
            return Ok(Self::Proposed);
        }
        s.parse::<TestVariant>().map(Self::from)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub variant: BatteryVariant,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub alpha_ii: f64,
    pub z_factor: f64,
    #[serde(default)]
    pub proposed: ProposedOptions,
}

impl BatteryConfig {
    /// Desk-scale shape with the experiment significance levels.
    pub fn new(variant: BatteryVariant) -> Self {
        let (n, m) = variant.desk_shape();
        Self {
            variant,
            n,
            m,
            alpha: ALPHA_I,
            alpha_ii: ALPHA_II,
            z_factor: Z_99,
            proposed: ProposedOptions::default(),
        }
    }

    pub fn full(variant: BatteryVariant) -> Self {
        let (n, m) = variant.full_shape();
        Self {
            n,
            m,
            ..Self::new(variant)
        }
    }

    pub fn with_shape(&self, n: usize, m: usize) -> Self {
        Self { n, m, ..self.clone() }
    }

    pub fn stream_bits(&self) -> usize {
        self.n * self.m
    }

    pub fn pvalue_count(&self) -> usize {
        self.variant.pvalue_count(self.n, self.m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_multiple_of(2) {
            return Err(Error::OddLength(self.n));
        }
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        if self.n.checked_mul(self.m).is_none() {
            return Err(Error::Config("n * m overflows".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !(self.alpha_ii > 0.0 && self.alpha_ii < 1.0) {
            return Err(Error::Config("significance levels must lie in (0, 1)".into()));
        }
        if self.z_factor.is_nan() || self.z_factor <= 0.0 {
            return Err(Error::Config(format!(
                "z-factor must be positive, got {}",
                self.z_factor
            )));
        }
        match self.variant {
            BatteryVariant::Proposed if self.n < 4 => {
                Err(Error::Config(format!("proposed test needs n >= 4, got {}", self.n)))
            }
            BatteryVariant::Proposed if self.m < self.proposed.min_sequences => Err(Error::Config(format!(
                "proposed test needs m >= {}, got {}",
                self.proposed.min_sequences, self.m
            ))),
            _ if self.n == 0 => Err(Error::Config("n must be positive".into())),
            _ => Ok(()),
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let count = self.pvalue_count();
        if self.variant == BatteryVariant::Proposed && count > MAX_PROPOSED_PVALUES {
            out.push(format!(
                "proposed test with n = {} yields {count} P-values, above the advised {MAX_PROPOSED_PVALUES}",
                self.n
            ));
        }
        if count < MIN_UNIFORMITY_COUNT {
            out.push(format!(
                "{} battery yields {count} P-values; the uniformity test is unreliable below {MIN_UNIFORMITY_COUNT}",
                self.variant
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValueSet {
    pub variant: BatteryVariant,
    pub n: usize,
    pub m: usize,
    pub pvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValueSummary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub deciles: [usize; 10],
}

impl PValueSummary {
    pub fn of(pvalues: &[f64]) -> Self {
        Self {
            count: pvalues.len(),
            min: pvalues.iter().copied().fold(f64::INFINITY, f64::min),
            max: pvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            deciles: decile_counts(pvalues),
        }
    }
}

/// Runs one battery on the first `n·m` bits of `stream`.
pub fn run_battery(cfg: &BatteryConfig, stream: &BitSequence) -> Result<(PValueSet, SecondLevelReport)> {
    cfg.validate()?;
    let set = partition(stream, cfg.n, cfg.m)?;
    let pvalues = match cfg.variant.first_level() {
        Some(v) => firstlevel::run_set(&set, &[v])?
            .remove(0)
            .into_iter()
            .map(|r| r.p)
            .collect(),
        None => run_proposed_with(&set, &cfg.proposed)?.pvalues,
    };
    let report = second_level(&pvalues, cfg.alpha, cfg.alpha_ii, cfg.z_factor)?;
    let set = PValueSet {
        variant: cfg.variant,
        n: cfg.n,
        m: cfg.m,
        pvalues,
    };
    Ok((set, report))
}

/// Where a single battery reads its bits from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Input {
    Generator(GeneratorSpec),
    File { path: PathBuf, format: BitFormat },
}

impl Input {
    pub fn load(&self, nbits: usize) -> Result<BitSequence> {
        match self {
            Self::Generator(spec) => generate(spec, nbits),
            Self::File { path, format } => read_bits(path, *format, Some(nbits)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRunConfig {
    #[serde(flatten)]
    pub battery: BatteryConfig,
    pub input: Input,
}

/// Report of a single battery. `per_set` is empty: there is only one set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub config: BatteryRunConfig,
    pub pvalues_summary: PValueSummary,
    pub second_level: SecondLevelReport,
    pub per_set: Vec<SetOutcome>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn battery_report(cfg: &BatteryConfig, input: &Input) -> Result<BatteryReport> {
    cfg.validate()?;
    let stream = input.load(cfg.stream_bits())?;
    let (pvalues, second) = run_battery(cfg, &stream)?;
    Ok(BatteryReport {
        config: BatteryRunConfig {
            battery: cfg.clone(),
            input: input.clone(),
        },
        pvalues_summary: PValueSummary::of(&pvalues.pvalues),
        second_level: second,
        per_set: Vec::new(),
        warnings: cfg.warnings(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetOutcome {
    pub set: usize,
    pub seed: u64,
    pub pvalues_summary: PValueSummary,
    pub second_level: SecondLevelReport,
}

/// Passing rates of one (source, battery) configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub label: String,
    pub variant: BatteryVariant,
    pub n: usize,
    pub m: usize,
    pub sets: usize,
    pub passed_i: usize,
    pub passed_ii: usize,
    #[serde(rename = "R_I")]
    pub r_i: f64,
    #[serde(rename = "R_II")]
    pub r_ii: f64,
    /// Null-hypothesis interval for `R_I` over `sets` runs.
    pub rate_interval_i: (f64, f64),
    pub rate_interval_ii: (f64, f64),
    /// Over the P-values of all sets together.
    pub pvalues_summary: PValueSummary,
    pub second_level: SecondLevelReport,
    pub per_set: Vec<SetOutcome>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Periodic,
    Generators,
    NSweep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub batteries: Vec<BatteryConfig>,
    pub sets: usize,
    pub base_seed: u64,
    /// Generator corrupted in the periodic experiment.
    pub base: GeneratorSpec,
    pub periods: Vec<usize>,
    /// Generators of the generator experiment; their seeds are replaced per set.
    pub families: Vec<GeneratorSpec>,
}

impl ExperimentConfig {
    pub fn desk(variants: &[BatteryVariant], sets: usize) -> Self {
        Self {
            batteries: variants.iter().map(|&v| BatteryConfig::new(v)).collect(),
            sets,
            base_seed: 1,
            base: GeneratorSpec::new(Family::Mt19937, 0),
            periods: DEFAULT_PERIODS.to_vec(),
            families: Family::ALL.iter().map(|&f| GeneratorSpec::new(f, 0)).collect(),
        }
    }

    pub fn full(variants: &[BatteryVariant], sets: usize) -> Self {
        Self {
            batteries: variants.iter().map(|&v| BatteryConfig::full(v)).collect(),
            ..Self::desk(variants, sets)
        }
    }

    /// Rescales every battery to `mn` bits per set, keeping each `n`.
    pub fn with_mn(mut self, mn: usize) -> Result<Self> {
        for b in &mut self.batteries {
            if !mn.is_multiple_of(b.n) {
                return Err(Error::Config(format!("mn = {mn} is not a multiple of n = {}", b.n)));
            }
            b.m = mn / b.n;
        }
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.sets == 0 {
            return Err(Error::Config("sets must be at least 1".into()));
        }
        self.batteries.iter().try_for_each(BatteryConfig::validate)
    }

    fn warnings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.batteries.iter().flat_map(BatteryConfig::warnings).collect();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassingRateReport {
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub rows: Vec<RowReport>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl PassingRateReport {
    pub fn row(&self, label: &str, variant: BatteryVariant) -> Option<&RowReport> {
        self.rows.iter().find(|r| r.label == label && r.variant == variant)
    }
}

#[derive(Clone, Debug)]
enum StreamSource {
    Plain(GeneratorSpec),
    Periodic(GeneratorSpec, usize),
}

impl StreamSource {
    fn stream(&self, seed: u64, nbits: usize) -> Result<BitSequence> {
        match self {
            Self::Plain(spec) => generate(&spec.with_seed(seed), nbits),
            Self::Periodic(spec, period) => {
                Ok(make_experiment1_stream(&spec.with_seed(seed), *period, nbits)?.to_bits())
            }
        }
    }
}

/// Rows sharing one stream per set.
struct Group {
    label: String,
    source: StreamSource,
    tag: u64,
    batteries: Vec<BatteryConfig>,
}

fn label_tag(label: &str) -> u64 {
    // FNV-1a
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn rate_interval(alpha: f64, z: f64, sets: usize) -> (f64, f64) {
    crate::secondlevel::proportion_interval(alpha, z, sets)
}

fn run_groups(groups: &[Group], sets: usize, base_seed: u64) -> Result<Vec<RowReport>> {
    let jobs: Vec<(usize, usize)> = (0..groups.len()).flat_map(|g| (0..sets).map(move |s| (g, s))).collect();
    let outcomes: Vec<Vec<(PValueSet, SetOutcome)>> = jobs
        .par_iter()
        .map(|&(g, s)| -> Result<Vec<(PValueSet, SetOutcome)>> {
            let group = &groups[g];
            let seed = derive_seed(base_seed, group.tag, s as u64);
            let nbits = group
                .batteries
                .iter()
                .map(BatteryConfig::stream_bits)
                .max()
                .unwrap_or(0);
            let stream = group.source.stream(seed, nbits)?;
            group
                .batteries
                .iter()
                .map(|b| {
                    let (pvalues, second) = run_battery(b, &stream)?;
                    let outcome = SetOutcome {
                        set: s,
                        seed,
                        pvalues_summary: PValueSummary::of(&pvalues.pvalues),
                        second_level: second,
                    };
                    Ok((pvalues, outcome))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        for (b, battery) in group.batteries.iter().enumerate() {
            let mut pooled = Vec::new();
            let mut per_set = Vec::with_capacity(sets);
            for s in 0..sets {
                let (pvalues, outcome) = &outcomes[g * sets + s][b];
                pooled.extend_from_slice(&pvalues.pvalues);
                per_set.push(outcome.clone());
            }
            let passed_i = per_set.iter().filter(|o| o.second_level.pass_i).count();
            let passed_ii = per_set.iter().filter(|o| o.second_level.pass_ii).count();
            rows.push(RowReport {
                label: group.label.clone(),
                variant: battery.variant,
                n: battery.n,
                m: battery.m,
                sets,
                passed_i,
                passed_ii,
                r_i: passed_i as f64 / sets as f64,
                r_ii: passed_ii as f64 / sets as f64,
                rate_interval_i: rate_interval(battery.alpha, battery.z_factor, sets),
                rate_interval_ii: rate_interval(battery.alpha_ii, battery.z_factor, sets),
                pvalues_summary: PValueSummary::of(&pooled),
                second_level: second_level(&pooled, battery.alpha, battery.alpha_ii, battery.z_factor)?,
                per_set,
            });
        }
    }
    Ok(rows)
}

/// Periodically corrupted base-generator streams, one row per (T, battery).
pub fn experiment1(cfg: &ExperimentConfig) -> Result<PassingRateReport> {
    cfg.validate()?;
    let groups: Vec<Group> = cfg
        .periods
        .iter()
        .map(|&t| -> Result<Group> {
            crate::generators::PeriodicCorruption::new(t)?;
            Ok(Group {
                label: format!("T={t}"),
                source: StreamSource::Periodic(cfg.base.clone(), t),
                tag: t as u64,
                batteries: cfg.batteries.clone(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(PassingRateReport {
        experiment: ExperimentKind::Periodic,
        config: cfg.clone(),
        rows: run_groups(&groups, cfg.sets, cfg.base_seed)?,
        warnings: cfg.warnings(),
    })
}

fn family_label(spec: &GeneratorSpec) -> String {
    let mut label = spec.family.name().to_string();
    for (k, v) in &spec.params {
        label.push_str(&format!(",{k}={v}"));
    }
    label
}

/// Uncorrupted generator output, one row per (generator, battery).
pub fn experiment2(cfg: &ExperimentConfig) -> Result<PassingRateReport> {
    cfg.validate()?;
    let groups: Vec<Group> = cfg
        .families
        .iter()
        .map(|spec| -> Result<Group> {
            let label = family_label(spec);
            spec.with_seed(derive_seed(cfg.base_seed, label_tag(&label), 0))
                .build()?;
            Ok(Group {
                tag: label_tag(&label),
                label,
                source: StreamSource::Plain(spec.clone()),
                batteries: cfg.batteries.clone(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(PassingRateReport {
        experiment: ExperimentKind::Generators,
        config: cfg.clone(),
        rows: run_groups(&groups, cfg.sets, cfg.base_seed)?,
        warnings: cfg.warnings(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub battery: BatteryConfig,
    pub ns: Vec<usize>,
    pub mn: usize,
    pub sets: usize,
    pub base_seed: u64,
    pub source: GeneratorSpec,
    /// Corrupt the source with this period first.
    pub period: Option<usize>,
}

/// Second-level outcomes of one battery across sequence lengths `n` at fixed
/// `mn`. Every `n` sees the same streams.
pub fn n_sweep(cfg: &SweepConfig) -> Result<PassingRateReport> {
    if cfg.sets == 0 {
        return Err(Error::Config("sets must be at least 1".into()));
    }
    let source = match cfg.period {
        Some(t) => StreamSource::Periodic(cfg.source.clone(), t),
        None => StreamSource::Plain(cfg.source.clone()),
    };
    let tag = label_tag(&format!("sweep:{}", family_label(&cfg.source)));
    let mut batteries = Vec::with_capacity(cfg.ns.len());
    let mut groups = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        if n == 0 || !cfg.mn.is_multiple_of(n) {
            return Err(Error::Config(format!("mn = {} is not a multiple of n = {n}", cfg.mn)));
        }
        let battery = cfg.battery.with_shape(n, cfg.mn / n);
        battery.validate()?;
        groups.push(Group {
            label: format!("n={n}"),
            source: source.clone(),
            tag,
            batteries: vec![battery.clone()],
        });
        batteries.push(battery);
    }
    let config = ExperimentConfig {
        batteries,
        sets: cfg.sets,
        base_seed: cfg.base_seed,
        base: cfg.source.clone(),
        periods: cfg.period.into_iter().collect(),
        families: Vec::new(),
    };
    let warnings = config.warnings();
    Ok(PassingRateReport {
        experiment: ExperimentKind::NSweep,
        rows: run_groups(&groups, cfg.sets, cfg.base_seed)?,
        config,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

/// One CSV line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub label: String,
    pub variant: BatteryVariant,
    pub n: usize,
    pub m: usize,
    pub sets: usize,
    #[serde(rename = "R_I")]
    pub r_i: f64,
    #[serde(rename = "R_II")]
    pub r_ii: f64,
    pub proportion: f64,
    #[serde(rename = "P_T")]
    pub p_t: f64,
}

pub trait Report: Serialize {
    fn csv_rows(&self) -> Vec<CsvRow>;
}

impl Report for PassingRateReport {
    fn csv_rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .map(|r| CsvRow {
                label: r.label.clone(),
                variant: r.variant,
                n: r.n,
                m: r.m,
                sets: r.sets,
                r_i: r.r_i,
                r_ii: r.r_ii,
                proportion: r.second_level.proportion,
                p_t: r.second_level.p_t,
            })
            .collect()
    }
}

impl Report for BatteryReport {
    fn csv_rows(&self) -> Vec<CsvRow> {
        let s = &self.second_level;
        let b = &self.config.battery;
        vec![CsvRow {
            label: "battery".into(),
            variant: b.variant,
            n: b.n,
            m: b.m,
            sets: 1,
            r_i: f64::from(u8::from(s.pass_i)),
            r_ii: f64::from(u8::from(s.pass_ii)),
            proportion: s.proportion,
            p_t: s.p_t,
        }]
    }
}

pub fn report_write<R: Report, W: Write>(report: &R, writer: W, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, report)?;
            writeln!(writer)?;
        }
        ReportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(writer);
            let rows = report.csv_rows();
            if rows.is_empty() {
                csv.write_record(["label", "variant", "n", "m", "sets", "R_I", "R_II", "proportion", "P_T"])?;
            }
            for row in rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}

/// Writes `report` to `path`, or to stdout when `path` is `None`.
pub fn report_emit<R: Report>(report: &R, path: Option<&Path>, format: ReportFormat) -> Result<()> {
    match path {
        Some(p) => report_write(report, BufWriter::new(File::create(p)?), format),
        None => report_write(report, io::stdout().lock(), format),
    }
}

pub fn read_report(path: impl AsRef<Path>) -> Result<PassingRateReport> {
    Ok(serde_json::from_reader(io::BufReader::new(File::open(path)?))?)
}
