use num_bigint::BigInt;
use polydiss::occurrence::{brute_force_count, occurrence_vector};
use polydiss::roots::{classify_dissection, generate_composite_roots, FaceTree, Mode, DEFAULT_H_CAP};
use polydiss::series::TruncSeries;
use polydiss::solve::{solve_at, solve_marked};
use polydiss::system::{build_system, TOTAL};
use polydiss::{count_occurrences, enumerate_dissections, Dissection, PatternSet};
use proptest::prelude::*;

fn dissection(n: usize, pick: usize) -> Dissection {
    let all = enumerate_dissections(n);
    all[pick % all.len()].clone()
}

fn series(c: Vec<i64>) -> TruncSeries<BigInt> {
    TruncSeries::from_coeffs(c.into_iter().map(BigInt::from).collect())
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occurrences_survive_relabelling(n in 3usize..10, pick in any::<usize>(), shift in 0usize..10, reflect in any::<bool>()) {
        let d = dissection(n, pick);
        let set = PatternSet::from_names(&["C3", "C4", "C5"]).unwrap();
        let e = d.relabel(shift % n, reflect);
        prop_assert_eq!(occurrence_vector(&d, &set), occurrence_vector(&e, &set));
    }

    #[test]
    fn fast_count_matches_brute_force(n in 3usize..10, pick in any::<usize>()) {
        let d = dissection(n, pick);
        for p in PatternSet::from_names(&["C3", "C4", "C5", "patternI"]).unwrap().patterns() {
            prop_assert_eq!(count_occurrences(&d, p), brute_force_count(&d, p));
        }
    }

    #[test]
    fn maximal_root_is_extended(n in 3usize..11, pick in any::<usize>(), h in 3usize..6) {
        let t = FaceTree::from_dissection(&dissection(n, pick));
        if let Some(nu) = t.maximal_root(h) {
            prop_assert!(t.extends(&nu));
            prop_assert!(nu.is_composite(h));
            prop_assert_eq!(nu.maximal_root(h), Some(nu.clone()));
        } else {
            prop_assert!(t.size > h);
        }
    }

    #[test]
    fn series_product_is_commutative_and_associative(a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (series(a), series(b), series(c));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
    }

    #[test]
    fn substituted_marks_match_marked_series(u in -3i64..4, which in 0usize..3) {
        let name = ["C3", "C4", "C5"][which];
        let sys = build_system(&PatternSet::from_names(&[name]).unwrap(), Mode::Full, DEFAULT_H_CAP)
            .unwrap()
            .group_classes();
        let at = solve_at(&sys, 12, &[u]).unwrap();
        let marked = solve_marked(&sys, 12).unwrap();
        for n in 0..=12 {
            prop_assert_eq!(marked[TOTAL].coeff(n).eval(&[BigInt::from(u)]), at[TOTAL].coeff(n).clone());
        }
    }
}

#[test]
fn grouping_preserves_the_series() {
    for names in [&["C3"][..], &["C4"], &["C5"], &["C3", "C4"]] {
        let set = PatternSet::from_names(names).unwrap();
        for mode in [Mode::Full, Mode::Avoiding] {
            let sys = build_system(&set, mode, DEFAULT_H_CAP).unwrap();
            let u = if mode == Mode::Full { vec![2; set.len()] } else { vec![] };
            let raw = solve_at(&sys, 14, &u).unwrap();
            let grouped = solve_at(&sys.group_classes(), 14, &u).unwrap();
            assert_eq!(raw[TOTAL], grouped[TOTAL], "{names:?} {mode:?}");
        }
    }
}

#[test]
fn every_small_dissection_has_a_catalogued_root() {
    let set = PatternSet::from_names(&["C4"]).unwrap();
    let cat = generate_composite_roots(&set, Mode::Full, DEFAULT_H_CAP).unwrap();
    for n in 3..=9 {
        for d in enumerate_dissections(n) {
            let small_root = FaceTree::from_dissection(&d).size <= cat.h;
            assert_eq!(classify_dissection(&cat, &d).is_some(), small_root, "{:?}", d.chords());
        }
    }
}
