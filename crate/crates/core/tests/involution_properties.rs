//! Exhaustive property sweeps and worked examples for the involutions.

use std::collections::HashMap;

use num_bigint::BigInt;
use thinned::involution::{
    fixed_point_count, involute, involute_r2, involute_stretched, is_good, is_good_structural, verify_suite, Case,
};
use thinned::partitions::{enumerate, EnumBudget, OrderedSetPartition};
use thinned::perm::run_lengths;
use thinned::series::egf_reciprocal_coeffs;
use thinned::spec::{SizeSet, ThinnedSpec};

fn part(s: &str) -> OrderedSetPartition {
    s.parse().unwrap()
}

fn union(members: &[u64], r: u64) -> ThinnedSpec {
    ThinnedSpec::from_union(members, None, 1, r).unwrap()
}

fn grouped(a: &[u64], b: &[u64], group: u64) -> ThinnedSpec {
    ThinnedSpec::new(SizeSet::from_explicit(a.iter().copied()).unwrap(), SizeSet::from_explicit(b.iter().copied()).unwrap(), group, 2)
        .unwrap()
}

/// Odd-ended specs with `b ∈ A`, paired with the largest `n` swept.
fn corpus() -> Vec<(ThinnedSpec, u32)> {
    vec![
        (union(&[1, 3], 2), 8),
        (union(&[1, 2, 3], 2), 7),
        (union(&[1, 3, 4, 5], 2), 7),
        (union(&[1, 2, 3, 5], 2), 7),
        (union(&[1, 2, 3, 4, 5], 2), 7),
        (union(&[1, 5, 6, 7], 2), 8),
        (ThinnedSpec::from_union(&[1], Some(5), 1, 2).unwrap(), 7),
        (union(&[1], 2), 8),
        (union(&[1, 3, 4, 7], 3), 8),
        (union(&[1, 3, 4, 6, 7], 3), 7),
        (union(&[1, 4, 5], 4), 8),
        (grouped(&[2, 6], &[4], 2), 8),
        (grouped(&[2], &[], 2), 8),
    ]
}

#[test]
fn property_suite_over_corpus() {
    for (spec, n_max) in corpus() {
        let report = verify_suite(n_max, &spec, EnumBudget::default()).unwrap();
        assert!(report.structural_checked, "{spec}");
        assert!(report.passed(), "{spec}: {:?}", report.failures);
        assert_eq!(report.fixed_points, report.coefficients, "{spec}");
    }
}

#[test]
fn r2_algorithm_stays_an_involution_without_odd_ends() {
    for spec in [union(&[1, 2], 2), union(&[1, 4, 6, 8], 2), union(&[1, 3, 4], 2)] {
        let report = verify_suite(7, &spec, EnumBudget::default()).unwrap();
        assert!(!report.structural_checked);
        assert!(report.passed(), "{spec}: {:?}", report.failures);
    }
}

#[test]
fn stretched_paths_for_r2_agree_including_grouped() {
    for spec in [union(&[1, 2, 3], 2), grouped(&[2, 6], &[4], 2)] {
        for n in 0..=8 {
            for p in enumerate(n, &spec, EnumBudget::default()).unwrap() {
                let a = involute_r2(&p, &spec).unwrap();
                let b = involute_stretched(&p, &spec).unwrap();
                assert_eq!(a.output, b.output, "{p}");
            }
        }
    }
}

#[test]
fn worked_examples_r2() {
    let spec = union(&[1, 2, 3], 2);
    let cases = [
        ("234/6/1/57/89", "234/6/1/57/8/9"),
        ("234/1/56/78/9", "234/1/56/789"),
        ("234/1/56/79/8", "234/1/56/7/9/8"),
        ("134/28/567/9", "134/2/8/567/9"),
    ];
    for (from, to) in cases {
        assert_eq!(involute(&part(from), &spec).unwrap().output, part(to), "{from}");
        assert_eq!(involute(&part(to), &spec).unwrap().output, part(from), "{to}");
    }
    let t = involute(&part("234/1/56/79/8"), &spec).unwrap();
    assert_eq!(t.cases(), vec![Case::B, Case::D]);
    let t = involute(&part("134/28/567/9"), &spec).unwrap();
    assert_eq!(t.cases(), vec![Case::C, Case::D]);
    // The frozen pair keeps 567 intact; splitting it instead would give 134/28/56/7/9.
    assert_ne!(t.output, part("134/28/56/7/9"));
}

#[test]
fn case_examples_r2() {
    let spec = union(&[1, 2, 3], 2);
    let t = involute(&part("1/2/3/5/6/9/47/8"), &spec).unwrap();
    assert_eq!((t.output.clone(), t.cases()), (part("1/2/3/5/6/9/478"), vec![Case::A]));
    let t = involute(&part("1/2/3/5/6/9/48/7"), &spec).unwrap();
    assert_eq!((t.output.clone(), t.cases()), (part("1/2/3/5/6/9/4/8/7"), vec![Case::B, Case::D]));
    let t = involute(&part("1/3/5/28/467/9"), &spec).unwrap();
    assert_eq!((t.output.clone(), t.cases()), (part("1/3/5/2/8/467/9"), vec![Case::C, Case::D]));
    let t = involute(&part("1/2/3/6/9/458/7"), &spec).unwrap();
    assert_eq!((t.output.clone(), t.cases()), (part("1/2/3/6/9/45/8/7"), vec![Case::B, Case::D]));

    let wide = union(&[1, 3, 4, 5], 2);
    let t = involute(&part("1/4/5/7/3/2689"), &wide).unwrap();
    assert_eq!((t.output.clone(), t.cases()), (part("1/4/5/7/3/268/9"), vec![Case::D]));
    let t = involute(&part("1/3/5/7/8/4/269"), &wide).unwrap();
    assert_eq!(t.cases(), vec![Case::E, Case::B, Case::C, Case::C]);
    assert!(t.is_fixed());
}

#[test]
fn goodness_examples() {
    let spec = union(&[1, 3, 4, 5], 2);
    assert!(is_good(&part("1/234/5/6"), &spec).unwrap());
    assert!(is_good_structural(&part("1/234/5/6"), &spec).unwrap());
    assert!(!is_good(&part("123/4/5/6"), &spec).unwrap());
    assert_eq!(involute(&part("123/4/5/6"), &spec).unwrap().output, part("1234/5/6"));
    for spec in [union(&[1, 3], 2), union(&[1, 2, 3], 2), union(&[1, 4, 5], 4)] {
        assert!(is_good(&part("9/8/7/6/5/4/3/2/1"), &spec).unwrap());
    }
}

#[test]
fn three_block_table_rows_are_fixed() {
    let spec = union(&[1, 2, 3], 2);
    for row in ["9/8/7/6/5/4/3/2/1", "234/6/1/578/9", "7/2/168/9/5/4/3", "7/1/268/9/5/4/3"] {
        assert!(is_good(&part(row), &spec).unwrap(), "{row}");
        assert!(is_good_structural(&part(row), &spec).unwrap(), "{row}");
    }
}

#[test]
fn full_intervals_fix_exactly_the_run_restricted_permutations() {
    for m in 1..=3u64 {
        let members: Vec<u64> = (1..2 * m).collect();
        let spec = union(&members, 2);
        for n in 0..=7u32 {
            let mut fixed_perms: HashMap<Vec<u32>, usize> = HashMap::new();
            for p in enumerate(n, &spec, EnumBudget::default()).unwrap() {
                if is_good(&p, &spec).unwrap() {
                    *fixed_perms.entry(p.underlying_permutation()).or_default() += 1;
                }
            }
            assert!(fixed_perms.values().all(|&k| k == 1));
            for perm in fixed_perms.keys() {
                assert!(run_lengths(perm).iter().all(|&l| l as u64 % (2 * m) <= 1), "{perm:?}");
            }
            let expected = thinned::partitions::count_perms_by_run_rule(n, |l| l as u64 % (2 * m) <= 1, 10).unwrap();
            assert_eq!(BigInt::from(fixed_perms.len()), expected);
        }
    }
}

#[test]
fn grouped_blow_up_example() {
    let spec = ThinnedSpec::new(SizeSet::from_explicit([3, 9]).unwrap(), SizeSet::from_explicit([6, 12]).unwrap(), 3, 2)
        .unwrap();
    let t = involute(&part("1,2,3,7,8,9/4,5,6,10,11,12"), &spec).unwrap();
    assert_eq!(t.output, part("1,2,3,7,8,9/4,5,6/10,11,12"));
    assert_eq!(t.cases(), vec![Case::D]);
}

fn singletons_after(head: &[u32], count: u32) -> OrderedSetPartition {
    let mut blocks = vec![head.to_vec()];
    let start = head.len() as u32 + 1;
    blocks.extend((start..start + count).map(|k| vec![k]));
    OrderedSetPartition::new(blocks).unwrap()
}

#[test]
fn stretched_r5_examples() {
    let spec = ThinnedSpec::from_union(&[1, 6, 10, 11], None, 1, 5).unwrap();
    let head: Vec<u32> = (1..=6).collect();

    let t = involute(&singletons_after(&head, 4), &spec).unwrap();
    assert_eq!(t.cases(), vec![Case::B2]);
    assert_eq!(t.output.sizes(), vec![10]);

    let t = involute(&singletons_after(&head, 10), &spec).unwrap();
    assert_eq!(t.cases(), vec![Case::B3, Case::B3, Case::DStretched]);
    assert!(t.is_fixed());

    let t = involute(&singletons_after(&head, 9), &spec).unwrap();
    assert_eq!(t.cases(), vec![Case::B3, Case::B2]);
    assert_eq!(t.output.sizes(), vec![10, 1, 1, 1, 1, 1]);
}

#[test]
fn fixed_point_count_edge_cases() {
    let spec = union(&[1, 2, 3], 2);
    assert_eq!(fixed_point_count(0, &spec, EnumBudget::default()).unwrap(), BigInt::from(1));
    let c = egf_reciprocal_coeffs(&spec, 6);
    assert_eq!(fixed_point_count(6, &spec, EnumBudget::default()).unwrap(), c.coeff(6));
}
