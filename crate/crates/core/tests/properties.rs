use std::collections::BTreeSet;

use apx_core::combos::Combinations;
use apx_core::incidence::{is_incident, Incidence, IncidenceOracle, PointTuple};
use apx_core::lemmas::{independent_nullity, random_family};
use apx_core::linalg::{rank_naive, RatVector, ScaledPoints};
use apx_core::monomial::{enumerate_monomials, FamilySpec};
use apx_core::removal::{grid_construction, lattice, random_polymap, RemovalOptions};
use apx_core::sets::{construct_sets, incidence_matrix, tuple_to_setfamily, NullityMode, Set, SetFamily};
use apx_core::verify::{cube_alternating_sum, line_alternating_sum, scan_cohyperplanar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All subsets of `[ground]` of size `<= m`.
fn small_sets(ground: u32, m: usize) -> Vec<Set> {
    (0u32..1 << ground)
        .filter(|mask| mask.count_ones() as usize <= m)
        .map(|mask| (1..=ground).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect()
}

/// Least nullity over all multisets of `r` rows drawn from `candidates`:
/// a basis of their row space gives the most rank any `r` rows can reach.
fn min_nullity(x: &SetFamily, candidates: &[Set]) -> usize {
    let all = incidence_matrix(x, &SetFamily::new(candidates.to_vec())).matrix;
    x.len() - rank_naive(&all).min(x.len())
}

fn brute_min_nullity(x: &SetFamily, candidates: &[Set]) -> usize {
    let r = x.len();
    let mut best = r;
    // multisets of size r as non-decreasing index sequences
    let mut idx = vec![0usize; r];
    loop {
        let s = SetFamily::new(idx.iter().map(|&i| candidates[i].clone()).collect());
        best = best.min(independent_nullity(x, &s));
        let Some(p) = (0..r).rev().find(|&p| idx[p] + 1 < candidates.len()) else {
            break;
        };
        idx[p] += 1;
        let v = idx[p];
        idx[p + 1..].iter_mut().for_each(|i| *i = v);
    }
    best
}

#[test]
fn min_nullity_formula_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=2 {
        let candidates = small_sets(4, m);
        for _ in 0..30 {
            let r = 1 + (rand::Rng::gen_range(&mut rng, 0..4usize));
            let x = random_family(&mut rng, 4, r, false);
            assert_eq!(min_nullity(&x, &candidates), brute_min_nullity(&x, &candidates), "{x}");
        }
    }
}

#[test]
fn at_most_one_is_sharp_on_small_ground_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for m in 1..=2 {
        let candidates = small_sets(4, m);
        let bound = NullityMode::AtMostOne.bound(m) as usize;
        for _ in 0..400 {
            let r = rand::Rng::gen_range(&mut rng, 1..bound);
            let x = random_family(&mut rng, 4, r, false);
            let s = construct_sets(&x, m, NullityMode::AtMostOne).unwrap();
            let n = independent_nullity(&x, &s);
            assert!(n <= 1);
            if n == 1 {
                assert_eq!(min_nullity(&x, &candidates), 1, "m={m} X={x} S={s}");
            }
        }
    }
}

#[test]
fn exact_zero_on_every_small_family() {
    // every family of distinct subsets of [3] below the bound, m = 1 and 2
    let all: Vec<Set> = small_sets(3, 3);
    for m in 1..=2usize {
        let bound = NullityMode::ExactZero.bound(m) as usize;
        for r in 1..bound.min(all.len() + 1) {
            for idx in Combinations::new(all.len(), r) {
                let x = SetFamily::new(idx.iter().map(|&i| all[i].clone()).collect());
                let s = construct_sets(&x, m, NullityMode::ExactZero).unwrap();
                assert_eq!(independent_nullity(&x, &s), 0, "{x}");
                assert!(s.max_size() <= m);
            }
        }
    }
}

#[test]
fn non_incident_cube_tuples_have_nonempty_set_witnesses() {
    // with the origin as base, the monomial witness gives non-empty sets S_i
    // with I(X; S) nonsingular
    let pts = lattice(2, 3, 0);
    for m in 1..=2 {
        let spec = FamilySpec::new(3, 3, m).unwrap();
        for size in 2..=4 {
            for rest in Combinations::new(7, size - 1) {
                let mut idx = vec![0];
                idx.extend(rest.iter().map(|i| i + 1));
                let tuple = PointTuple::from_ints(&idx.iter().map(|&i| pts[i].clone()).collect::<Vec<_>>()).unwrap();
                let Incidence::NotIncident(w) = is_incident(&tuple, &spec).unwrap() else {
                    continue;
                };
                let x = tuple_to_setfamily(&tuple, 0).unwrap();
                let s = SetFamily::new(w.monomials.iter().map(|f| f.support()).collect());
                assert!(s.sets.iter().all(|a| !a.is_empty()));
                assert_eq!(independent_nullity(&x, &s), 0, "{idx:?}");
            }
        }
    }
}

#[test]
fn dependent_grid_subsets_have_collinear_preimages() {
    for (m, n) in [(1, 2), (2, 2), (2, 3)] {
        let c = grid_construction(m, n, &RemovalOptions::default()).unwrap();
        let images = ScaledPoints::new(&c.points);
        let src: Vec<RatVector> = c.provenance.iter().map(|p| RatVector::from_ints(p)).collect();
        let sources = ScaledPoints::new(&src);
        let mut dependent = 0;
        for idx in Combinations::new(c.points.len(), m + 2) {
            if images.dependent(&idx) {
                dependent += 1;
                assert!(sources.affine_rank(&idx) <= 1, "m={m} N={n} {idx:?}");
            }
        }
        assert!(dependent > 0);
    }
}

#[test]
fn incident_subsets_are_dependent_under_random_maps() {
    let x: Vec<RatVector> = lattice(2, 3, 0).iter().map(|p| RatVector::from_ints(p)).collect();
    let spec = FamilySpec::new(3, 3, 1).unwrap();
    let oracle = IncidenceOracle::new(&x, &spec).unwrap();
    for seed in 0..5 {
        let f = random_polymap(&spec, 50, seed).unwrap();
        let images = ScaledPoints::new(&x.iter().map(|p| f.eval(p).unwrap()).collect::<Vec<_>>());
        for idx in Combinations::new(8, 4) {
            if oracle.is_incident(&idx) {
                assert!(images.dependent(&idx));
            }
        }
    }
}

#[test]
fn scans_do_not_depend_on_worker_count() {
    let c = grid_construction(1, 3, &RemovalOptions::default()).unwrap();
    let one = scan_cohyperplanar(&c.points, 3, 1).unwrap();
    let many = scan_cohyperplanar(&c.points, 3, 8).unwrap();
    assert_eq!(one.render(), many.render());
    let again = grid_construction(1, 3, &RemovalOptions { workers: 8, ..RemovalOptions::default() }).unwrap();
    assert_eq!(again.points, c.points);
}

#[test]
fn monomial_count_matches_binomial() {
    for n in 1..=5u64 {
        for m in 0..=4u64 {
            let expected = apx_core::monomial::binomial(n + m, m);
            assert_eq!(enumerate_monomials(n as usize, m as usize).len() as u128, expected);
        }
    }
}

fn small_rational() -> impl Strategy<Value = apx_core::linalg::Rational> {
    (-40i64..=40, 1i64..=9).prop_map(|(a, b)| apx_core::linalg::ratio(a, b))
}

fn vector(n: usize) -> impl Strategy<Value = RatVector> {
    proptest::collection::vec(small_rational(), n).prop_map(RatVector::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lines_are_annihilated(n in 1usize..=3, m in 1usize..=3, seed in any::<u64>(),
                             xy in (vector(3), vector(3))) {
        let spec = FamilySpec::new(n, 2, m).unwrap();
        let f = random_polymap(&spec, 100, seed).unwrap();
        let (x, y) = (xy.0.restrict(&(0..n).collect::<Vec<_>>()), xy.1.restrict(&(0..n).collect::<Vec<_>>()));
        prop_assert!(line_alternating_sum(&f, &x, &y).unwrap().is_zero());
    }

    #[test]
    fn cubes_are_annihilated(m in 1usize..=3, seed in any::<u64>(),
                             pts in proptest::collection::vec(vector(2), 5)) {
        let spec = FamilySpec::new(2, 2, m).unwrap();
        let f = random_polymap(&spec, 100, seed).unwrap();
        prop_assert!(cube_alternating_sum(&f, &pts[0], &pts[1..=m + 1]).unwrap().is_zero());
    }

    #[test]
    fn compression_meets_bounds(seed in any::<u64>(), m in 1usize..=3, zero in any::<bool>()) {
        let mode = if zero { NullityMode::ExactZero } else { NullityMode::AtMostOne };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rand::Rng::gen_range(&mut rng, 1..mode.bound(m) as usize);
        let x = random_family(&mut rng, 6, r, false);
        let s = construct_sets(&x, m, mode).unwrap();
        prop_assert!(s.max_size() <= m);
        prop_assert!(independent_nullity(&x, &s) <= mode.max_nullity());
        let distinct: BTreeSet<&Set> = x.sets.iter().collect();
        prop_assert_eq!(distinct.len(), r);
    }
}
