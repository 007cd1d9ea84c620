//! Shared helpers for the integration test targets: fixture loading,
//! random type generation, and reusable property checks.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use remodel_core::compose::StepResult;
use remodel_core::remodel::parse_model;
use remodel_core::typer::type_model;
use remodel_core::{
    compose, match_type, normalize, parse_fixture_str, substitute, ComposeReport, Composer,
    Hierarchy, ListLen, NamedCoroutine, ThetaItem, TypeExpr,
};

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path, e))
}

pub fn fixture_items(name: &str) -> Vec<ThetaItem> {
    parse_fixture_str(&fixture(name))
        .unwrap()
        .into_iter()
        .map(|(n, t)| ThetaItem::Single(NamedCoroutine::new(&n, t)))
        .collect()
}

/// The administration-first arrangement of the trading-system model: the
/// eight build-up operations as singles, the three delete operations
/// grouped at the end.
pub fn cocome_arranged(file: &str) -> (Vec<ThetaItem>, Hierarchy) {
    let typed = type_model(&parse_model(&fixture(file)).unwrap());
    assert!(!typed.has_errors(), "model has errors: {:?}", typed.diagnostics);
    let pick = |op: &str| {
        let c = typed
            .contract(op)
            .unwrap_or_else(|| panic!("no contract {}", op));
        NamedCoroutine::new(&c.operation, c.ty.clone())
    };
    let mut items: Vec<ThetaItem> = [
        "createStore",
        "openStore",
        "createCashDesk",
        "openCashDesk",
        "createItem",
        "makeNewSale",
        "enterItem",
        "makeCashPayment",
    ]
    .iter()
    .map(|op| ThetaItem::Single(pick(op)))
    .collect();
    items.push(ThetaItem::Group(vec![
        pick("deleteStore"),
        pick("deleteCashDesk"),
        pick("deleteItem"),
    ]));
    (items, typed.hierarchy)
}

/// The family knowledge base with its fact coroutines shuffled by `seed`;
/// the rule, query, and answer keep their places at the end.
pub fn family_permutation(seed: u64) -> Vec<ThetaItem> {
    let pairs = parse_fixture_str(&fixture("prolog_family.types")).unwrap();
    let (mut facts, tail): (Vec<_>, Vec<_>) = pairs
        .into_iter()
        .partition(|(n, _)| n != "parent" && n != "query" && n != "answer");
    facts.shuffle(&mut StdRng::seed_from_u64(seed));
    facts
        .into_iter()
        .chain(tail)
        .map(|(n, t)| ThetaItem::Single(NamedCoroutine::new(&n, t)))
        .collect()
}

pub fn composed_string(report: &ComposeReport) -> Option<String> {
    match &report.outcome {
        remodel_core::Outcome::Composed(ty) => Some(ty.to_string()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Random types
// ---------------------------------------------------------------------------

/// Random variable-free type trees, arbitrarily non-normal.
pub fn arb_ground_type() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["A", "B", "C", "D", "E"])
            .prop_map(TypeExpr::concrete),
        1 => Just(TypeExpr::Void),
    ];
    leaf.prop_recursive(4, 48, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(TypeExpr::Sequence),
            prop::collection::vec(inner.clone(), 1..4).prop_map(TypeExpr::Product),
            (inner.clone(), inner.clone())
                .prop_map(|(r, y)| TypeExpr::coroutine(r, y)),
            (inner, 0u32..4).prop_map(|(e, n)| TypeExpr::List(Box::new(e), ListLen::Fixed(n))),
        ]
    })
}

/// Replaces some subterms of a normalized ground type with fresh, distinct
/// variables; the result matches the original and substitution restores it.
pub fn abstract_linear(ground: &TypeExpr, rng: &mut StdRng) -> TypeExpr {
    fn walk(t: &TypeExpr, rng: &mut StdRng, counter: &mut u32) -> TypeExpr {
        if rng.gen_bool(0.25) {
            *counter += 1;
            return TypeExpr::variable(&format!("v{}", counter));
        }
        match t {
            TypeExpr::Sequence(items) => {
                TypeExpr::Sequence(items.iter().map(|i| walk(i, rng, counter)).collect())
            }
            TypeExpr::Product(items) => {
                TypeExpr::Product(items.iter().map(|i| walk(i, rng, counter)).collect())
            }
            TypeExpr::Coroutine(r, y) => {
                TypeExpr::coroutine(walk(r, rng, counter), walk(y, rng, counter))
            }
            other => other.clone(),
        }
    }
    let mut counter = 0;
    walk(ground, rng, &mut counter)
}

/// Checks that a pattern made by [`abstract_linear`] matches its origin
/// and that substituting the resulting bindings restores the origin.
pub fn check_match_substitute(ground: &TypeExpr, seed: u64) {
    let ground = normalize(ground);
    let pattern = abstract_linear(&ground, &mut StdRng::seed_from_u64(seed));
    let bindings = match_type(&ground, &pattern, &Hierarchy::new());
    assert!(
        !bindings.is_failure(),
        "pattern {} fails to match its origin {}",
        pattern,
        ground
    );
    let rebuilt = substitute(&pattern, &bindings, &Hierarchy::new()).unwrap_or_else(|e| {
        panic!("substituting into {} failed: {}", pattern, e);
    });
    assert_eq!(
        rebuilt,
        ground,
        "substitute(match) did not restore the origin (pattern {})",
        pattern
    );
}

// ---------------------------------------------------------------------------
// Composition properties
// ---------------------------------------------------------------------------

/// Leaf count of a type; the measure composition steps must not grow.
pub fn type_size(t: &TypeExpr) -> usize {
    match t {
        TypeExpr::Concrete(_) | TypeExpr::Variable(_) => 1,
        TypeExpr::Void => 0,
        TypeExpr::Sequence(items) | TypeExpr::Product(items) => {
            items.iter().map(type_size).sum()
        }
        TypeExpr::Coroutine(r, y) => type_size(r) + type_size(y),
        TypeExpr::Constrained(base, _) => type_size(base),
        TypeExpr::List(e, ListLen::Fixed(n)) => *n as usize * type_size(e),
        TypeExpr::List(e, _) => type_size(e) + 1,
    }
}

fn composer_measure(c: &Composer) -> usize {
    c.live_types().iter().map(type_size).sum::<usize>()
        + c.pending_type().map(|t| type_size(&t)).unwrap_or(0)
        + c.external_types().iter().map(type_size).sum::<usize>()
}

/// Runs a composition step by step, asserting the total amount of material
/// held by participants, the in-flight value, and the unconsumed yields
/// never grows. Spawning a coroutine from a yield part and prefixing the
/// leftovers to the final result move material; they do not add any.
pub fn assert_stepwise_shrink(items: Vec<ThetaItem>, hierarchy: &Hierarchy) {
    let mut composer = Composer::new(items, hierarchy.clone(), 10_000).unwrap();
    let mut previous = composer_measure(&composer);
    loop {
        match composer.step() {
            StepResult::Applied(rule) => {
                let now = composer_measure(&composer);
                assert!(
                    now <= previous,
                    "step {:?} grew the composition from {} to {} leaves",
                    rule,
                    previous,
                    now
                );
                previous = now;
            }
            StepResult::Finished(_) => break,
        }
    }
}

/// Composes the same arrangement twice and checks the runs are identical.
pub fn assert_deterministic(items: Vec<ThetaItem>, hierarchy: &Hierarchy) {
    let first = compose(items.clone(), hierarchy, 10_000).unwrap();
    let second = compose(items, hierarchy, 10_000).unwrap();
    assert_eq!(first.outcome, second.outcome, "outcomes differ between runs");
    assert_eq!(first.trace, second.trace, "traces differ between runs");
    assert_eq!(first.order, second.order, "orders differ between runs");
}

// ---------------------------------------------------------------------------
// Conditional postconditions
// ---------------------------------------------------------------------------

/// A one-contract model whose postcondition is a single conditional.
pub fn conditional_model(condition: &str, then_part: &str, else_part: &str) -> String {
    format!(
        r#"
        Service S {{
            [TempProperty]
            Flag : Boolean
            [Operation]
            op() : Boolean
        }}
        Contract S::op() : Boolean {{
            precondition:
                not Flag.oclIsUndefined()
            postcondition:
                if {} then {} else {} endif
        }}
        "#,
        condition, then_part, else_part
    )
}

/// Types a single-conditional contract and checks it is void and warned
/// about.
pub fn check_conditional_contract(condition: &str, then_part: &str, else_part: &str) {
    let src = conditional_model(condition, then_part, else_part);
    let typed = type_model(&parse_model(&src).unwrap());
    let ty = typed.contract("op").unwrap().ty.to_string();
    assert_eq!(ty, "[Void; Void]", "conditional contract typed as {}", ty);
    assert!(
        typed
            .diagnostics
            .iter()
            .any(|d| d.severity == remodel_core::remodel::Severity::Warning
                && d.message.contains("conditional")),
        "missing conditional warning: {:?}",
        typed.diagnostics
    );
}

pub const CONDITION_POOL: &[&str] = &["Flag = true", "Flag.Count > 0", "not Flag.IsOld"];
pub const BRANCH_POOL: &[&str] = &[
    "result = true",
    "result = false",
    "let r : Receipt in r.oclIsNew()",
    "Flag.oclIsUndefined() = true",
];
