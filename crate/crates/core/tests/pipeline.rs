use dftt::bitstream::{partition, to_signed};
use dftt::firstlevel::{count_below, p_value, run_first_level, run_set, statistic_d, threshold};
use dftt::generators::generate;
use dftt::proposed::{collect_bins_with, run_proposed, run_proposed_with, test_bins, ProposedOptions};
use dftt::secondlevel::{proportion_test, second_level, uniformity_test, ALPHA_II, Z_99, Z_NIST};
use dftt::{BitSequence, Family, GeneratorSpec, SequenceSet, TestVariant};
use proptest::prelude::*;

fn mt_set(seed: u64, n: usize, m: usize) -> SequenceSet {
    partition(
        &generate(&GeneratorSpec::new(Family::Mt19937, seed), n * m).unwrap(),
        n,
        m,
    )
    .unwrap()
}

#[test]
fn set_runner_matches_single_runs() {
    let set = mt_set(11, 256, 20);
    let all = run_set(&set, &TestVariant::ALL).unwrap();
    for (v, results) in TestVariant::ALL.iter().zip(&all) {
        for (bits, r) in set.sequences().iter().zip(results) {
            assert_eq!(r, &run_first_level(&to_signed(bits), *v).unwrap());
        }
    }
}

#[test]
fn spilled_matrix_matches_memory() {
    let set = mt_set(5, 128, 700);
    let memory = run_proposed(&set).unwrap();
    let spill = ProposedOptions {
        spill_threshold_bytes: 0,
        ..ProposedOptions::default()
    };
    let matrix = collect_bins_with(&set, &spill).unwrap();
    assert!(matrix.is_spilled());
    assert_eq!(matrix.bin(3).unwrap().len(), 700);
    assert_eq!(test_bins(&matrix, &spill).unwrap(), memory);
}

#[test]
fn custom_minimum_sequence_count() {
    let set = mt_set(5, 64, 20);
    assert!(run_proposed(&set).is_err());
    let opts = ProposedOptions {
        min_sequences: 10,
        ..ProposedOptions::default()
    };
    assert_eq!(run_proposed_with(&set, &opts).unwrap().pvalues.len(), 31);
}

#[test]
fn constant_sequences_fail_first_level() {
    let ones = to_signed(&BitSequence::from_bits(&[1; 1000]));
    for v in TestVariant::ALL {
        let r = run_first_level(&ones, v).unwrap();
        assert_eq!(r.n1, 499);
        assert!(!r.passes(0.01), "{v}: p = {}", r.p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn first_level_ranges(seed in any::<u64>(), half in 2usize..400) {
        let n = 2 * half;
        let x = to_signed(&generate(&GeneratorSpec::new(Family::Mt19937, seed), n).unwrap());
        for v in TestVariant::ALL {
            let r = run_first_level(&x, v).unwrap();
            prop_assert!(r.n1 <= n / 2);
            prop_assert!((0.0..=1.0).contains(&r.p));
            prop_assert_eq!(r.t95, threshold(n, v).unwrap());
        }
    }

    #[test]
    fn count_is_monotone_in_threshold(mags in prop::collection::vec(0.0f64..100.0, 1..200), t in 0.0f64..100.0, dt in 0.0f64..10.0) {
        prop_assert!(count_below(&mags, t) <= count_below(&mags, t + dt));
    }

    #[test]
    fn pvalue_is_symmetric_in_d(d in -10.0f64..10.0) {
        prop_assert!((p_value(d) - p_value(-d)).abs() < 1e-15);
    }

    #[test]
    fn variance_divisors_scale_d(n1 in 0usize..50_000) {
        let o = statistic_d(n1, 100_000, TestVariant::Original);
        prop_assert!((statistic_d(n1, 100_000, TestVariant::Present) - 2f64.sqrt() * o).abs() < 1e-9);
        prop_assert!((statistic_d(n1, 100_000, TestVariant::Pareschi) - 1.9f64.sqrt() * o).abs() < 1e-9);
    }

    #[test]
    fn proposed_is_invariant_to_sequence_order(seed in any::<u64>(), rotate in 1usize..59) {
        let set = mt_set(seed, 32, 60);
        let mut shuffled = set.sequences().to_vec();
        shuffled.rotate_left(rotate);
        shuffled.swap(0, 7);
        let a = run_proposed(&set).unwrap();
        let b = run_proposed(&SequenceSet::new(shuffled).unwrap()).unwrap();
        prop_assert_eq!(a.pvalues.len(), 15);
        for (x, y) in a.pvalues.iter().zip(&b.pvalues) {
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(x));
        }
    }

    #[test]
    fn wider_interval_never_loses_a_pass(pvalues in prop::collection::vec(0.0f64..=1.0, 1..600)) {
        let narrow = proportion_test(&pvalues, 0.01, Z_99).unwrap();
        let wide = proportion_test(&pvalues, 0.01, Z_NIST).unwrap();
        prop_assert!(!narrow.pass || wide.pass);
        prop_assert_eq!(narrow.m_p, pvalues.iter().filter(|&&p| p >= 0.01).count());
    }

    #[test]
    fn uniformity_ranges(pvalues in prop::collection::vec(0.0f64..=1.0, 1..600)) {
        let u = uniformity_test(&pvalues, ALPHA_II).unwrap();
        prop_assert_eq!(u.deciles.iter().sum::<usize>(), pvalues.len());
        prop_assert!(u.chi2 >= 0.0 && (0.0..=1.0).contains(&u.p_t));
        let report = second_level(&pvalues, 0.01, ALPHA_II, Z_99).unwrap();
        prop_assert_eq!(report.passes(), report.pass_i && report.pass_ii);
    }
}
