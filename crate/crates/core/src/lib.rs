//! Coroutine-typed requirement models: a library for inferring coroutine
//! types from operation contracts and composing them into a system type.
//!
//! The pipeline has three stages:
//!
//! 1. parse a requirement model ([`remodel`]),
//! 2. infer one coroutine type per operation contract ([`typer`]),
//! 3. compose the coroutine types with a demand-driven rewrite engine
//!    ([`compose`]) to obtain the system's composed type and a yielding
//!    order for the operations.
//!
//! [`types`] defines the type language itself and [`syntax`] its textual
//! form; [`report`] packages the outcome for consumers.

pub mod compose;
pub mod remodel;
pub mod report;
pub mod syntax;
pub mod typer;
pub mod types;

pub use compose::{
    compose, first_occurrences, ComposeError, ComposeReport, Composer, NamedCoroutine, Outcome,
    RuleId, StepResult, ThetaItem, TraceEvent,
};
pub use syntax::{parse_fixture_str, parse_type_str, SyntaxError};
pub use typer::{type_model, TypedContract, TypedModel};
pub use types::{
    eval_predicate, head, match_type, normalize, product_to_sequence, substitute, tail,
    BindingSet, Bound, Hierarchy, ListLen, Predicate, TypeError, TypeExpr,
};
