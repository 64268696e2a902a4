use dftt::experiments::{
    battery_report, experiment1, experiment2, n_sweep, read_report, report_emit, report_write, BatteryConfig,
    BatteryReport, BatteryVariant, ExperimentConfig, Input, ReportFormat, SweepConfig,
};
use dftt::{Family, GeneratorSpec};

fn small_config(sets: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::desk(&[BatteryVariant::Proposed, BatteryVariant::Present], sets);
    for b in &mut cfg.batteries {
        b.n = 64;
        b.m = 60;
    }
    cfg.periods = vec![8, 10];
    cfg.families = vec![
        GeneratorSpec::new(Family::Mt19937, 0),
        GeneratorSpec::new(Family::Ccg, 0),
    ];
    cfg
}

#[test]
fn battery_json_schema() {
    let cfg = BatteryConfig::new(BatteryVariant::Proposed).with_shape(64, 60);
    let report = battery_report(&cfg, &Input::Generator(GeneratorSpec::new(Family::Mt19937, 1))).unwrap();
    let value = serde_json::to_value(&report).unwrap();
    for key in ["config", "pvalues_summary", "second_level", "per_set"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    for key in ["count", "min", "max", "deciles"] {
        assert!(value["pvalues_summary"].get(key).is_some(), "missing {key}");
    }
    for key in ["m_p", "proportion", "interval", "pass_I", "chi2", "P_T", "pass_II"] {
        assert!(value["second_level"].get(key).is_some(), "missing {key}");
    }
    assert_eq!(value["second_level"]["interval"].as_array().unwrap().len(), 2);
    assert_eq!(value["pvalues_summary"]["count"], 31);

    let text = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<BatteryReport>(&text).unwrap(), report);
}

#[test]
fn file_input_matches_generator_input() {
    let spec = GeneratorSpec::new(Family::Xorshift, 77);
    let cfg = BatteryConfig::new(BatteryVariant::Pareschi).with_shape(128, 40);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bits.bin");
    dftt::bitstream::write_bits(
        &dftt::generators::generate(&spec, 128 * 40).unwrap(),
        &path,
        dftt::BitFormat::Packed,
    )
    .unwrap();
    let from_file = battery_report(
        &cfg,
        &Input::File {
            path,
            format: dftt::BitFormat::Packed,
        },
    )
    .unwrap();
    let from_gen = battery_report(&cfg, &Input::Generator(spec)).unwrap();
    assert_eq!(from_file.second_level, from_gen.second_level);
}

#[test]
fn passing_rates_are_exact_fractions() {
    let report = experiment1(&small_config(3)).unwrap();
    assert_eq!(report.rows.len(), 4);
    for row in &report.rows {
        assert_eq!(row.per_set.len(), 3);
        let passed = row.per_set.iter().filter(|s| s.second_level.pass_i).count();
        assert_eq!(row.passed_i, passed);
        assert_eq!(row.r_i, passed as f64 / 3.0);
        assert!((0.0..=1.0).contains(&row.r_ii));
        let pooled = row.per_set.iter().map(|s| s.pvalues_summary.count).sum::<usize>();
        assert_eq!(row.pvalues_summary.count, pooled);
    }
    assert_eq!(report.rows[0].label, "T=8");
    assert_eq!(report.rows[1].variant, BatteryVariant::Present);
}

#[test]
fn experiments_are_deterministic() {
    let cfg = small_config(2);
    assert_eq!(experiment2(&cfg).unwrap(), experiment2(&cfg).unwrap());
    let mut other = cfg.clone();
    other.base_seed = 2;
    assert_ne!(
        experiment2(&cfg).unwrap().rows[0].per_set,
        experiment2(&other).unwrap().rows[0].per_set
    );
}

#[test]
fn json_and_csv_round_trip() {
    let report = experiment2(&small_config(2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    report_emit(&report, Some(&json), ReportFormat::Json).unwrap();
    assert_eq!(read_report(&json).unwrap(), report);

    let mut csv = Vec::new();
    report_write(&report, &mut csv, ReportFormat::Csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "label,variant,n,m,sets,R_I,R_II,proportion,P_T");
    assert_eq!(lines.count(), report.rows.len());
}

#[test]
fn empty_generator_list() {
    let mut cfg = small_config(1);
    cfg.families.clear();
    let report = experiment2(&cfg).unwrap();
    assert!(report.rows.is_empty());
    let text = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<dftt::PassingRateReport>(&text).unwrap(), report);
}

#[test]
fn sweep_reuses_streams() {
    let cfg = SweepConfig {
        battery: BatteryConfig::new(BatteryVariant::Proposed),
        ns: vec![64, 128],
        mn: 64 * 128,
        sets: 2,
        base_seed: 3,
        source: GeneratorSpec::new(Family::Mt19937, 0),
        period: None,
    };
    let report = n_sweep(&cfg).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!((report.rows[0].n, report.rows[0].m), (64, 128));
    assert_eq!((report.rows[1].n, report.rows[1].m), (128, 64));
    assert_eq!(report.rows[0].per_set[1].seed, report.rows[1].per_set[1].seed);
    assert_eq!(report.rows[1].pvalues_summary.count, 2 * 63);

    let bad = SweepConfig { ns: vec![100], ..cfg };
    assert!(n_sweep(&bad).is_err());
}
