//! Oracle equivalence on small instances: the search kernel against the
//! brute-force involution filter, and the blocking-pair computation against
//! the quadratic scan. The acceptance suite runs the full-size version; this
//! keeps a faster guard in the regular test run.

mod common;

use common::{pairsets, random_instance, random_matching};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srti_core::enumerate::{enumerate_stable, solve_egalitarian, EgalSolution};
use srti_core::naive;

#[test]
fn enumeration_matches_the_involution_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..150 {
        let n = rng.random_range(2..=8);
        let inst = random_instance(n, &mut rng);
        let res = enumerate_stable(&inst, u64::MAX, None);
        assert!(res.exhausted);
        let oracle = naive::all_stable_matchings(&inst);
        assert_eq!(
            pairsets(&res.matchings),
            pairsets(&oracle),
            "instance:\n{}",
            srti_core::io::serialize_instance(&inst)
        );
    }
}

#[test]
fn blocking_pairs_match_the_quadratic_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        let n = rng.random_range(2..=8);
        let inst = random_instance(n, &mut rng);
        let mu = random_matching(&inst, &mut rng);
        let fast = inst.blocking_pairs(&mu).unwrap();
        let slow = naive::blocking_pairs_by_scan(&inst, &mu);
        assert_eq!(fast, slow);
        assert_eq!(inst.is_stable(&mu).unwrap(), fast.is_empty());
    }
}

#[test]
fn egalitarian_cost_matches_enumerated_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let inst = random_instance(n, &mut rng);
        let res = enumerate_stable(&inst, u64::MAX, None);
        assert!(res.exhausted);
        let expected = res
            .matchings
            .iter()
            .map(|mu| mu.egalitarian_cost(&inst).value())
            .min();
        match (solve_egalitarian(&inst, None), expected) {
            (EgalSolution::Optimal { cost, matching }, Some(best)) => {
                assert_eq!(cost.value(), best);
                assert!(inst.is_stable(&matching).unwrap());
                assert_eq!(matching.egalitarian_cost(&inst), cost);
            }
            (EgalSolution::Unsatisfiable, None) => {}
            (got, want) => panic!("solver {got:?} vs oracle {want:?}"),
        }
    }
}
