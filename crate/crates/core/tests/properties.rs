use std::collections::BTreeSet;

use proptest::prelude::*;

use conic_hurwitz_core::{
    certify_exceptional, decide_admissible, enumerate_data, find_witness, gauss_bonnet_margin,
    strip_units, troyanov_admissible, AdmissibleCase, AngleVector, BranchDatum, Certification,
    OracleResult, Rational,
};

/// Partitions of `n` with parts at most `max`, built independently of the library.
fn brute_partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in brute_partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn brute_data(d: u32, n: usize) -> BTreeSet<Vec<Vec<u32>>> {
    let parts: Vec<Vec<u32>> = brute_partitions(d, d)
        .into_iter()
        .filter(|p| p.iter().any(|&x| x > 1))
        .collect();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; n];
    if parts.is_empty() {
        return out;
    }
    loop {
        let rows: Vec<Vec<u32>> = idx.iter().map(|&i| parts[i].clone()).collect();
        let defect: u32 = rows.iter().flatten().map(|&x| x - 1).sum();
        if defect + 2 == 2 * d {
            let mut canon = rows;
            canon.sort_by(|a, b| b.cmp(a));
            out.insert(canon);
        }
        let mut pos = 0;
        while pos < n && idx[pos] + 1 == parts.len() {
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return out;
        }
        idx[pos] += 1;
    }
}

fn rows_of(datum: &BranchDatum) -> Vec<Vec<u32>> {
    datum.rows().iter().map(|r| r.parts().to_vec()).collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for d in 1..=6 {
        for n in 1..=4 {
            let ours: Vec<BranchDatum> = enumerate_data(d, n).collect();
            let set: BTreeSet<Vec<Vec<u32>>> = ours.iter().map(rows_of).collect();
            assert_eq!(set.len(), ours.len(), "duplicates at d={d}, n={n}");
            assert!(ours.iter().all(|x| x.is_valid() && x.is_canonical()));
            assert_eq!(set, brute_data(d, n), "d={d}, n={n}");
        }
    }
}

fn unit_fraction() -> impl Strategy<Value = Rational> {
    (1i128..=40, 2i128..=41)
        .prop_filter("in (0,1)", |(p, q)| p < q)
        .prop_map(|(p, q)| Rational::new(p, q))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i128..=30, 1i128..=6).prop_map(|(p, q)| Rational::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn three_points_in_unit_interval(v in prop::collection::vec(unit_fraction(), 3)) {
        let beta = AngleVector::new(v).unwrap();
        prop_assert_eq!(decide_admissible(&beta).admissible, troyanov_admissible(&beta).unwrap());
    }

    #[test]
    fn footballs_need_equal_angles(a in positive(), b in positive()) {
        prop_assume!(a != Rational::ONE && b != Rational::ONE);
        let beta = AngleVector::new(vec![a, b]).unwrap();
        prop_assert_eq!(decide_admissible(&beta).admissible, a == b);
    }

    #[test]
    fn no_teardrops(a in positive(), units in 0usize..5) {
        prop_assume!(a != Rational::ONE);
        let mut v = vec![Rational::ONE; units];
        v.push(a);
        let verdict = decide_admissible(&AngleVector::new(v).unwrap());
        prop_assert!(!verdict.admissible);
        prop_assert_eq!(verdict.case, AdmissibleCase::None);
    }

    #[test]
    fn admissible_needs_positive_margin(v in prop::collection::vec(positive(), 1..7)) {
        let beta = AngleVector::new(v).unwrap();
        let verdict = decide_admissible(&beta);
        if verdict.admissible && !strip_units(&beta).is_empty() {
            prop_assert!(gauss_bonnet_margin(&beta) > Rational::ZERO);
        }
    }

    #[test]
    fn case_a_is_far_from_the_lattice(v in prop::collection::vec(positive(), 1..7)) {
        let verdict = decide_admissible(&AngleVector::new(v).unwrap());
        if verdict.case == AdmissibleCase::A {
            prop_assert!(verdict.lattice.as_ref().unwrap().distance > Rational::ONE);
        }
        if matches!(verdict.case, AdmissibleCase::B | AdmissibleCase::C | AdmissibleCase::D) {
            prop_assert_eq!(verdict.lattice.as_ref().unwrap().distance, Rational::ONE);
        }
    }
}

#[test]
fn realizable_data_are_never_certified() {
    let grid: Vec<Rational> = (1..=4)
        .flat_map(|q| (1..=2 * q).map(move |p| Rational::new(p, q)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for d in 2..=5 {
        for datum in enumerate_data(d, 3) {
            if !matches!(find_witness(&datum, None), OracleResult::Realizable(_)) {
                continue;
            }
            for &a in &grid {
                for &b in &grid {
                    for &c in &grid {
                        let beta = AngleVector::new(vec![a, b, c]).unwrap();
                        assert!(
                            matches!(
                                certify_exceptional(&datum, &beta).unwrap(),
                                Certification::Refused(_)
                            ),
                            "{datum} certified with ({beta})"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn realizability_ignores_row_order() {
    for d in 2..=6 {
        for datum in enumerate_data(d, 3) {
            let mut rows = rows_of(&datum);
            rows.reverse();
            let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
            let flipped = BranchDatum::from_parts(d, &refs);
            assert!(flipped.equivalent(&datum));
            assert_eq!(
                find_witness(&datum, None).label(),
                find_witness(&flipped, None).label(),
                "{datum}"
            );
        }
    }
}
