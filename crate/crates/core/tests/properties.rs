//! Randomized regression suites over the type algebra and the composition
//! engine.

mod common;

use common::*;
use proptest::prelude::*;
use remodel_core::{normalize, parse_type_str, Hierarchy, TypeExpr};

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn normalize_is_idempotent(t in arb_ground_type()) {
        let once = normalize(&t);
        prop_assert_eq!(normalize(&once), once);
    }
}

proptest! {
    #[test]
    fn flattening_is_associative(
        a in arb_ground_type(),
        b in arb_ground_type(),
        c in arb_ground_type(),
    ) {
        let nested_right = normalize(&TypeExpr::Sequence(vec![
            a.clone(),
            TypeExpr::Sequence(vec![b.clone(), c.clone()]),
        ]));
        let nested_left = normalize(&TypeExpr::Sequence(vec![
            TypeExpr::Sequence(vec![a.clone(), b.clone()]),
            c.clone(),
        ]));
        let flat = normalize(&TypeExpr::Sequence(vec![a, b, c]));
        prop_assert_eq!(&nested_right, &flat);
        prop_assert_eq!(&nested_left, &flat);
    }

    #[test]
    fn normalized_types_round_trip_through_their_syntax(t in arb_ground_type()) {
        let t = normalize(&t);
        let reparsed = parse_type_str(&t.to_string()).unwrap();
        prop_assert_eq!(reparsed, t);
    }

    #[test]
    fn matching_an_abstracted_pattern_restores_the_origin(
        ground in arb_ground_type(),
        seed in any::<u64>(),
    ) {
        check_match_substitute(&ground, seed);
    }

    #[test]
    fn permuted_facts_always_reach_the_same_answer(seed in any::<u64>()) {
        let report = remodel_core::compose(
            family_permutation(seed),
            &Hierarchy::new(),
            10_000,
        ).unwrap();
        let result = composed_string(&report);
        prop_assert_eq!(result.as_deref(), Some("[Void; Yes]"));
    }

    #[test]
    fn composition_is_deterministic_across_runs(seed in any::<u64>()) {
        assert_deterministic(family_permutation(seed), &Hierarchy::new());
    }

    #[test]
    fn no_step_grows_the_composition(seed in any::<u64>()) {
        assert_stepwise_shrink(family_permutation(seed), &Hierarchy::new());
    }

    #[test]
    fn conditional_contracts_are_void_and_warned(
        c in 0..CONDITION_POOL.len(),
        t in 0..BRANCH_POOL.len(),
        e in 0..BRANCH_POOL.len(),
    ) {
        check_conditional_contract(CONDITION_POOL[c], BRANCH_POOL[t], BRANCH_POOL[e]);
    }
}

#[test]
fn model_composition_is_deterministic_too() {
    let (items, hierarchy) = cocome_arranged("cocome.remodel");
    assert_deterministic(items.clone(), &hierarchy);
    assert_stepwise_shrink(items, &hierarchy);
}
