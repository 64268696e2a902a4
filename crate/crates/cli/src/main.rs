use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dftt::bitstream::{write_bits, BitFormat};
use dftt::experiments::{
    battery_report, experiment1, experiment2, n_sweep, report_emit, BatteryConfig, BatteryVariant, ExperimentConfig,
    Input, ReportFormat, SweepConfig, DESK_MN, FULL_MN,
};
use dftt::generators::generate;
use dftt::theory::{verify_all, TheoryConfig};
use dftt::{Family, GeneratorSpec};

#[derive(Parser)]
#[command(name = "dftt", version, about = "Spectral (DFT) randomness tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one battery over a file or a generator.
    Test(TestArgs),
    /// Passing rates on periodically corrupted streams.
    Experiment1(Experiment1Args),
    /// Passing rates of the generator corpus.
    Experiment2(Experiment2Args),
    /// Second-level outcomes across sequence lengths at fixed mn.
    Sweep(SweepArgs),
    /// Monte-Carlo checks of the coefficient and spectrum limit laws.
    VerifyTheory(TheoryArgs),
    /// Write generator output to a file.
    Gen(GenArgs),
}

#[derive(Args)]
struct Source {
    /// Generator family (mt19937, xorshift, lcg, qcg1, qcg2, ccg, micali-schnorr, aes-ctr).
    #[arg(long, default_value = "mt19937")]
    family: Family,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Family parameter as key=value; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
}

impl Source {
    fn spec(&self) -> GeneratorSpec {
        self.params
            .iter()
            .fold(GeneratorSpec::new(self.family, self.seed), |s, (k, v)| {
                s.with_param(k, v)
            })
    }
}

#[derive(Args)]
struct Levels {
    /// Significance level of the first-level tests and of test I.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long = "alpha-ii", default_value_t = 0.0001)]
    alpha_ii: f64,
    /// z-factor of the test I interval (3 for the NIST interval).
    #[arg(long, default_value_t = 2.575)]
    z: f64,
}

impl Levels {
    fn apply(&self, b: &mut BatteryConfig) {
        b.alpha = self.alpha;
        b.alpha_ii = self.alpha_ii;
        b.z_factor = self.z;
    }
}

#[derive(Args)]
struct Output {
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "report-format", default_value = "json")]
    report_format: ReportFormat,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long, default_value = "proposed")]
    variant: BatteryVariant,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Read bits from this file instead of a generator.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "packed")]
    format: BitFormat,
    /// Use the (n, m) defaults of the full-size runs.
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    levels: Levels,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Scale {
    #[arg(long, value_delimiter = ',', default_value = "proposed,present")]
    variants: Vec<BatteryVariant>,
    #[arg(long)]
    sets: Option<usize>,
    /// Bits per set; every battery keeps its n and takes m = mn / n.
    #[arg(long)]
    mn: Option<usize>,
    /// Base seed for the per-set seeds.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Full-size defaults: mn = 10^8.
    #[arg(long)]
    full: bool,
}

impl Scale {
    fn config(&self, default_sets: usize, levels: &Levels) -> dftt::Result<ExperimentConfig> {
        let sets = self.sets.unwrap_or(default_sets);
        let base = if self.full {
            ExperimentConfig::full(&self.variants, sets)
        } else {
            ExperimentConfig::desk(&self.variants, sets)
        };
        let mn = self.mn.unwrap_or(if self.full { FULL_MN } else { DESK_MN });
        let mut cfg = base.with_mn(mn)?;
        cfg.base_seed = self.seed;
        cfg.batteries.iter_mut().for_each(|b| levels.apply(b));
        Ok(cfg)
    }
}

#[derive(Args)]
struct Experiment1Args {
    /// Corruption periods; defaults to the 24 periods 100..=120, 130, 140, 150.
    #[arg(long, value_delimiter = ',')]
    periods: Vec<usize>,
    /// Generator to corrupt.
    #[arg(long, default_value = "mt19937")]
    base: Family,
    #[command(flatten)]
    scale: Scale,
    #[command(flatten)]
    levels: Levels,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Experiment2Args {
    /// Generator families; defaults to the whole corpus.
    #[arg(long, value_delimiter = ',')]
    families: Vec<Family>,
    #[command(flatten)]
    scale: Scale,
    #[command(flatten)]
    levels: Levels,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "proposed")]
    variant: BatteryVariant,
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
    ns: Vec<usize>,
    #[arg(long, default_value_t = DESK_MN)]
    mn: usize,
    #[arg(long, default_value_t = 5)]
    sets: usize,
    /// Corrupt the stream with this period.
    #[arg(long)]
    period: Option<usize>,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    levels: Levels,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    j: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value = "mt19937")]
    family: Family,
    #[arg(long, default_value_t = 5489)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    nbits: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "packed")]
    format: BitFormat,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{s}`"))
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run(command: Command) -> dftt::Result<()> {
    match command {
        Command::Test(a) => {
            let mut cfg = if a.full {
                BatteryConfig::full(a.variant)
            } else {
                BatteryConfig::new(a.variant)
            };
            cfg.n = a.n.unwrap_or(cfg.n);
            cfg.m = a.m.unwrap_or(cfg.m);
            a.levels.apply(&mut cfg);
            let input = match a.input {
                Some(path) => Input::File { path, format: a.format },
                None => Input::Generator(a.source.spec()),
            };
            let report = battery_report(&cfg, &input)?;
            warn(&report.warnings);
            report_emit(&report, a.output.out.as_deref(), a.output.report_format)
        }
        Command::Experiment1(a) => {
            let mut cfg = a.scale.config(5, &a.levels)?;
            cfg.base = GeneratorSpec::new(a.base, 0);
            if !a.periods.is_empty() {
                cfg.periods = a.periods;
            }
            let report = experiment1(&cfg)?;
            warn(&report.warnings);
            report_emit(&report, a.output.out.as_deref(), a.output.report_format)
        }
        Command::Experiment2(a) => {
            let mut cfg = a.scale.config(20, &a.levels)?;
            if !a.families.is_empty() {
                cfg.families = a.families.iter().map(|&f| GeneratorSpec::new(f, 0)).collect();
            }
            let report = experiment2(&cfg)?;
            warn(&report.warnings);
            report_emit(&report, a.output.out.as_deref(), a.output.report_format)
        }
        Command::Sweep(a) => {
            let mut battery = BatteryConfig::new(a.variant);
            a.levels.apply(&mut battery);
            let cfg = SweepConfig {
                battery,
                ns: a.ns,
                mn: a.mn,
                sets: a.sets,
                base_seed: a.source.seed,
                source: a.source.spec(),
                period: a.period,
            };
            let report = n_sweep(&cfg)?;
            warn(&report.warnings);
            report_emit(&report, a.output.out.as_deref(), a.output.report_format)
        }
        Command::VerifyTheory(a) => {
            let cfg = TheoryConfig {
                n: a.n,
                j: a.j,
                trials: a.trials,
                source: GeneratorSpec::new(a.family, a.seed),
            };
            let reports = verify_all(&cfg)?;
            let text = serde_json::to_string_pretty(&reports)?;
            match a.out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Gen(a) => {
            let bits = generate(&a.source.spec(), a.nbits)?;
            write_bits(&bits, &a.out, a.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
