//! Infers one coroutine type per operation contract.
//!
//! The precondition names what the operation consumes, the postcondition
//! what it creates and destroys. For a contract with required resources
//! `t1`, created resources `t2` and destroyed resources `t3`, the inferred
//! type is `[t1; (t1 - t3) + t2]`: the operation demands its requirements
//! and passes them on, except for what it destroyed, plus what it created.
//!
//! Conjunct classification:
//!
//! - required (precondition): `not e.oclIsUndefined()`, also written
//!   `e.oclIsUndefined() = false`, and `T.allInstance()->includes(e)` /
//!   `not T.allInstance()->excludes(e)`;
//! - created (postcondition): assignments `field = expr` to declared
//!   temporal properties, `e.oclIsNew()`, and the `includes` forms;
//! - destroyed (postcondition): `e.oclIsUndefined()`, also written
//!   `e.oclIsUndefined() = true`, and `T.allInstance()->excludes(e)`.
//!
//! Anything else contributes nothing: arithmetic relations constrain
//! values, not resource flow, and disjunctions or implications make no
//! definite statement. A postcondition that is a single conditional makes
//! no unconditional statement at all, so the contract types as
//! `[Void; Void]` with a warning.
//!
//! Finally, concrete receive-part types with declared subtypes are
//! generalized to constrained variables, so a contract demanding a `User`
//! accepts any declared kind of user.

use crate::remodel::ast::{ArrowArgs, BinOp, Contract, Expr, Model, TypeRef};
use crate::remodel::symbols::{analyze, SymbolTable};
use crate::remodel::{Diagnostic, Severity};
use crate::types::{normalize, Hierarchy, ListLen, Predicate, TypeExpr};
use std::collections::BTreeMap;

/// A contract with its inferred coroutine type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedContract {
    pub service: String,
    pub operation: String,
    pub ty: TypeExpr,
}

/// Result of typing a whole model.
#[derive(Debug, Clone)]
pub struct TypedModel {
    pub contracts: Vec<TypedContract>,
    /// Subtype hierarchy declared by the model's actors.
    pub hierarchy: Hierarchy,
    pub diagnostics: Vec<Diagnostic>,
}

impl TypedModel {
    pub fn has_errors(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
    }

    pub fn contract(&self, operation: &str) -> Option<&TypedContract> {
        self.contracts.iter().find(|c| c.operation == operation)
    }
}

/// Analyzes and types every contract of a model.
pub fn type_model(model: &Model) -> TypedModel {
    let table = analyze(model);
    let mut diagnostics = table.diagnostics.clone();
    let mut contracts = Vec::new();
    for contract in &model.contracts {
        let ty = type_contract(contract, &table, &mut diagnostics);
        contracts.push(TypedContract {
            service: contract.service.clone(),
            operation: contract.operation.clone(),
            ty,
        });
    }
    TypedModel {
        contracts,
        hierarchy: table.hierarchy.clone(),
        diagnostics,
    }
}

// ---------------------------------------------------------------------------
// Environments and conjuncts
// ---------------------------------------------------------------------------

type Env = BTreeMap<String, TypeExpr>;

fn type_ref_type(ty: &TypeRef) -> TypeExpr {
    match ty {
        TypeRef::Named(n) | TypeRef::Enum(n, _) => TypeExpr::concrete(n),
        TypeRef::SetOf(n) => TypeExpr::List(Box::new(TypeExpr::concrete(n)), ListLen::Star),
    }
}

/// The declared names visible inside a contract body, each mapped to the
/// type its conditions denote: temporal properties denote themselves (the
/// property name as a type), parameters and definitions their declared
/// types.
fn contract_env(contract: &Contract, table: &SymbolTable) -> Env {
    let mut env = Env::new();
    for field in table.visible_fields(&contract.service) {
        env.insert(field.clone(), TypeExpr::Concrete(field));
    }
    for param in &contract.params {
        env.insert(param.name.clone(), type_ref_type(&param.ty));
    }
    for def in &contract.definitions {
        env.insert(def.name.clone(), type_ref_type(&def.ty));
    }
    env
}

struct Conjunct {
    expr: Expr,
    env: Env,
}

/// Splits a condition into its conjuncts, descending through `and` and
/// hoisting `let` bindings into each inner conjunct's environment.
fn to_conjuncts(expr: &Expr, env: &Env, out: &mut Vec<Conjunct>) {
    match expr {
        Expr::Binary(BinOp::And, l, r) => {
            to_conjuncts(l, env, out);
            to_conjuncts(r, env, out);
        }
        Expr::Let(bindings, body) => {
            let mut extended = env.clone();
            for b in bindings {
                extended.insert(b.name.clone(), type_ref_type(&b.ty));
            }
            to_conjuncts(body, &extended, out);
        }
        other => out.push(Conjunct {
            expr: other.clone(),
            env: env.clone(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Conjunct classification
// ---------------------------------------------------------------------------

/// `e.oclIsUndefined()` — the undefinedness test on a simple access.
fn undefined_test(e: &Expr) -> Option<&Expr> {
    match e {
        Expr::Dot {
            recv,
            name,
            args: Some(args),
            ..
        } if name == "oclIsUndefined" && args.is_empty() => Some(recv),
        _ => None,
    }
}

/// `e.oclIsNew()`.
fn new_test(e: &Expr) -> Option<&Expr> {
    match e {
        Expr::Dot {
            recv,
            name,
            args: Some(args),
            ..
        } if name == "oclIsNew" && args.is_empty() => Some(recv),
        _ => None,
    }
}

/// `T.allInstance()->includes(x)` or `->excludes(x)`; only the extent of a
/// class fires this, not an arbitrary collection.
fn extent_test<'a>(e: &'a Expr, op: &str) -> Option<&'a Expr> {
    match e {
        Expr::Arrow { recv, name, args } if name == op => {
            let is_extent = matches!(
                &**recv,
                Expr::Dot { recv: base, name, args: Some(a), .. }
                    if (name == "allInstance" || name == "allInstances")
                        && a.is_empty()
                        && matches!(**base, Expr::Ident(_))
            );
            if !is_extent {
                return None;
            }
            match args {
                ArrowArgs::Exprs(items) if items.len() == 1 => Some(&items[0]),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Strips `= true` and rewrites `= false` into a negation, so the boolean
/// spellings classify like their plain forms.
fn normalize_bool(e: &Expr) -> Expr {
    match e {
        Expr::Binary(BinOp::Eq, l, r) => match (&**l, &**r) {
            (inner, Expr::Bool(true)) | (Expr::Bool(true), inner) => normalize_bool(inner),
            (inner, Expr::Bool(false)) | (Expr::Bool(false), inner) => {
                Expr::Not(Box::new(inner.clone()))
            }
            _ => e.clone(),
        },
        _ => e.clone(),
    }
}

fn env_type(e: &Expr, env: &Env) -> Option<TypeExpr> {
    env.get(e.as_simple_name()?).cloned()
}

/// What a precondition conjunct requires to be present.
fn required(conjunct: &Conjunct, env_misses: &mut Vec<String>) -> Option<TypeExpr> {
    let expr = normalize_bool(&conjunct.expr);
    match &expr {
        Expr::Not(inner) => {
            if let Some(e) = undefined_test(inner) {
                return lookup(e, &conjunct.env, env_misses);
            }
            if let Some(e) = extent_test(inner, "excludes") {
                return lookup(e, &conjunct.env, env_misses);
            }
            None
        }
        _ => {
            if let Some(e) = extent_test(&expr, "includes") {
                return lookup(e, &conjunct.env, env_misses);
            }
            None
        }
    }
}

/// What a postcondition conjunct creates.
fn created(
    conjunct: &Conjunct,
    fields: &[String],
    env_misses: &mut Vec<String>,
) -> Option<TypeExpr> {
    // Assignment to a declared temporal property, before boolean
    // rewriting: `Flag = true` sets Flag, it does not merely test it.
    if let Expr::Binary(BinOp::Eq, lhs, _) = &conjunct.expr {
        if let Some(name) = lhs.as_simple_name() {
            if fields.iter().any(|f| f == name) {
                return Some(TypeExpr::concrete(name));
            }
        }
    }
    let expr = normalize_bool(&conjunct.expr);
    if let Some(e) = new_test(&expr) {
        return lookup(e, &conjunct.env, env_misses);
    }
    if let Expr::Not(inner) = &expr {
        if let Some(e) = extent_test(inner, "excludes") {
            return lookup(e, &conjunct.env, env_misses);
        }
        return None;
    }
    if let Some(e) = extent_test(&expr, "includes") {
        return lookup(e, &conjunct.env, env_misses);
    }
    None
}

/// What a postcondition conjunct destroys.
fn destroyed(conjunct: &Conjunct, env_misses: &mut Vec<String>) -> Option<TypeExpr> {
    let expr = normalize_bool(&conjunct.expr);
    if let Some(e) = undefined_test(&expr) {
        return lookup(e, &conjunct.env, env_misses);
    }
    if let Some(e) = extent_test(&expr, "excludes") {
        return lookup(e, &conjunct.env, env_misses);
    }
    None
}

fn lookup(e: &Expr, env: &Env, env_misses: &mut Vec<String>) -> Option<TypeExpr> {
    match env_type(e, env) {
        Some(t) => Some(t),
        None => {
            if let Some(name) = e.as_simple_name() {
                env_misses.push(name.to_string());
            }
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Contract typing
// ---------------------------------------------------------------------------

fn type_contract(
    contract: &Contract,
    table: &SymbolTable,
    diagnostics: &mut Vec<Diagnostic>,
) -> TypeExpr {
    let env = contract_env(contract, table);
    let fields = table.visible_fields(&contract.service);
    let span = contract.span;
    let mut env_misses: Vec<String> = Vec::new();

    let mut pre_conjuncts = Vec::new();
    if let Some(pre) = &contract.precondition {
        to_conjuncts(pre, &env, &mut pre_conjuncts);
    }
    let mut post_conjuncts = Vec::new();
    if let Some(post) = &contract.postcondition {
        to_conjuncts(post, &env, &mut post_conjuncts);
    }

    if pre_conjuncts.is_empty() && post_conjuncts.is_empty() {
        diagnostics.push(Diagnostic::note(
            span.line,
            span.col,
            format!(
                "contract {} has no conditions; it neither requires nor provides anything",
                contract.operation
            ),
        ));
        return TypeExpr::coroutine(TypeExpr::Void, TypeExpr::Void);
    }

    // A postcondition that is nothing but a conditional promises nothing
    // unconditionally.
    if post_conjuncts.len() == 1 && matches!(post_conjuncts[0].expr, Expr::If(..)) {
        diagnostics.push(Diagnostic::warning(
            span.line,
            span.col,
            format!(
                "postcondition of {} is a single conditional; the contract has no unconditional effect",
                contract.operation
            ),
        ));
        return TypeExpr::coroutine(TypeExpr::Void, TypeExpr::Void);
    }

    let required_items: Vec<TypeExpr> = pre_conjuncts
        .iter()
        .filter_map(|c| required(c, &mut env_misses))
        .collect();
    let mut created_items = Vec::new();
    let mut destroyed_items = Vec::new();
    for conjunct in &post_conjuncts {
        if matches!(conjunct.expr, Expr::If(..)) {
            diagnostics.push(Diagnostic::warning(
                span.line,
                span.col,
                format!(
                    "conditional effect in postcondition of {} is ignored",
                    contract.operation
                ),
            ));
            continue;
        }
        if let Some(t) = created(conjunct, &fields, &mut env_misses) {
            created_items.push(t);
        }
        if let Some(t) = destroyed(conjunct, &mut env_misses) {
            destroyed_items.push(t);
        }
    }

    env_misses.sort();
    env_misses.dedup();
    for name in env_misses {
        diagnostics.push(Diagnostic::warning(
            span.line,
            span.col,
            format!(
                "{} conditions {} which is not declared; the conjunct is ignored",
                contract.operation, name
            ),
        ));
    }

    // Yield part: requirements survive unless destroyed, then creations,
    // first occurrence of each type winning.
    let mut yield_items: Vec<TypeExpr> = required_items
        .iter()
        .filter(|t| !destroyed_items.contains(t))
        .cloned()
        .collect();
    yield_items.extend(created_items);
    let mut deduped: Vec<TypeExpr> = Vec::new();
    for item in yield_items {
        if !deduped.contains(&item) {
            deduped.push(item);
        }
    }

    let ty = TypeExpr::coroutine(
        normalize(&TypeExpr::Sequence(required_items)),
        normalize(&TypeExpr::Sequence(deduped)),
    );
    lift_supertypes(ty, &table.hierarchy)
}

// ---------------------------------------------------------------------------
// Supertype lifting
// ---------------------------------------------------------------------------

fn collect_names(t: &TypeExpr, out: &mut Vec<String>) {
    match t {
        TypeExpr::Concrete(n) | TypeExpr::Variable(n) => out.push(n.clone()),
        TypeExpr::Void => {}
        TypeExpr::Sequence(items) | TypeExpr::Product(items) => {
            for i in items {
                collect_names(i, out);
            }
        }
        TypeExpr::Coroutine(r, y) => {
            collect_names(r, out);
            collect_names(y, out);
        }
        TypeExpr::Constrained(base, _) => collect_names(base, out),
        TypeExpr::List(e, _) => collect_names(e, out),
    }
}

fn replace_concrete(t: &TypeExpr, from: &str, to: &TypeExpr) -> TypeExpr {
    match t {
        TypeExpr::Concrete(n) if n == from => to.clone(),
        TypeExpr::Concrete(_) | TypeExpr::Variable(_) | TypeExpr::Void => t.clone(),
        TypeExpr::Sequence(items) => {
            TypeExpr::Sequence(items.iter().map(|i| replace_concrete(i, from, to)).collect())
        }
        TypeExpr::Product(items) => {
            TypeExpr::Product(items.iter().map(|i| replace_concrete(i, from, to)).collect())
        }
        TypeExpr::Coroutine(r, y) => TypeExpr::coroutine(
            replace_concrete(r, from, to),
            replace_concrete(y, from, to),
        ),
        TypeExpr::Constrained(base, p) => {
            TypeExpr::Constrained(Box::new(replace_concrete(base, from, to)), p.clone())
        }
        TypeExpr::List(e, len) => {
            TypeExpr::List(Box::new(replace_concrete(e, from, to)), len.clone())
        }
    }
}

/// Generalizes receive-part types that are declared supertypes: each becomes
/// a fresh variable constrained to that supertype, substituted through both
/// parts, so subtypes are accepted wherever the supertype was demanded.
fn lift_supertypes(ty: TypeExpr, hierarchy: &Hierarchy) -> TypeExpr {
    let (recv, _) = match ty.as_coroutine() {
        Some(parts) => parts,
        None => return ty,
    };
    let mut recv_names = Vec::new();
    collect_names(recv, &mut recv_names);
    let mut supertypes: Vec<String> = Vec::new();
    for name in recv_names {
        if hierarchy.has_descendants(&name) && !supertypes.contains(&name) {
            supertypes.push(name);
        }
    }
    if supertypes.is_empty() {
        return ty;
    }
    let mut taken = Vec::new();
    collect_names(&ty, &mut taken);
    let mut fresh = fresh_variables(&taken);
    let mut lifted = ty;
    let mut predicates = Vec::new();
    for name in supertypes {
        let var = fresh.next().expect("unbounded variable supply");
        lifted = replace_concrete(&lifted, &name, &TypeExpr::variable(&var));
        predicates.push(Predicate::SubtypeOf { var, upper: name });
    }
    let pred = if predicates.len() == 1 {
        predicates.pop().unwrap()
    } else {
        Predicate::All(predicates)
    };
    TypeExpr::Constrained(Box::new(lifted), pred)
}

fn fresh_variables(taken: &[String]) -> impl Iterator<Item = String> + '_ {
    const LETTERS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    let firsts = LETTERS.iter().map(|s| s.to_string());
    let numbered = (1u32..).flat_map(|k| LETTERS.iter().map(move |s| format!("{}{}", s, k)));
    firsts.chain(numbered).filter(move |v| !taken.contains(v))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::remodel::parser::parse_model;

    fn typed(src: &str) -> TypedModel {
        type_model(&parse_model(src).unwrap())
    }

    fn ty_of(model: &TypedModel, op: &str) -> String {
        model.contract(op).unwrap().ty.to_string()
    }

    const STORE_PRELUDE: &str = r#"
        System Sys {
            [TempProperty]
            CurrentStore : Store
        }
        Service S {
            [TempProperty]
            CurrentSale : Sale
            [Operation]
            openStore(storeID : Integer)
        }
    "#;

    // --- classification of precondition conjuncts ---

    #[test]
    fn requires_definedness_both_spellings() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::openStore(storeID : Integer) : Boolean {
                definition:
                    store : Store = Store.allInstance()->any(s : Store | s.StoreID = storeID)
                precondition:
                    store.oclIsUndefined() = false
                postcondition:
                    CurrentStore = store and result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "openStore"), "[Store; <Store, CurrentStore>]");

        let src2 = src.replace(
            "store.oclIsUndefined() = false",
            "not store.oclIsUndefined()",
        );
        let m2 = typed(&src2);
        assert_eq!(ty_of(&m2, "openStore"), "[Store; <Store, CurrentStore>]");
    }

    #[test]
    fn value_relations_contribute_nothing() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::enter(quantity : Integer) {
                precondition:
                    not CurrentSale.oclIsUndefined() and quantity > 0 and
                    CurrentSale.IsComplete = false
                postcondition:
                    result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "enter"), "[CurrentSale; CurrentSale]");
    }

    #[test]
    fn extent_membership_requires() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::check(item : Item) {
                precondition:
                    Item.allInstance()->includes(item) and
                    not Item.allInstance()->excludes(item)
                postcondition:
                    result = true
            }
            "#
        );
        let m = typed(&src);
        // Both forms require an Item; duplicates collapse in the yield.
        assert_eq!(ty_of(&m, "check"), "[<Item, Item>; Item]");
    }

    #[test]
    fn plain_collection_membership_does_not_fire() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::check(item : Item) {
                precondition:
                    CurrentSale.Lines->includes(item)
                postcondition:
                    result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "check"), "[Void; Void]");
    }

    // --- classification of postcondition conjuncts ---

    #[test]
    fn creation_and_assignment() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::makeNewSale() {
                precondition:
                    not CurrentStore.oclIsUndefined()
                postcondition:
                    let sale : Sale in
                        sale.oclIsNew() and CurrentSale = sale and
                        CurrentSale.IsComplete = false and result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(
            ty_of(&m, "makeNewSale"),
            "[CurrentStore; <CurrentStore, Sale, CurrentSale>]"
        );
    }

    #[test]
    fn destruction_removes_from_yield() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::makeCashPayment(amount : Integer) {
                precondition:
                    not CurrentSale.oclIsUndefined()
                postcondition:
                    CurrentSale.oclIsUndefined() = true and
                    let cp : CashPayment in cp.oclIsNew()
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "makeCashPayment"), "[CurrentSale; CashPayment]");
    }

    #[test]
    fn extent_removal_destroys() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::deleteStore(storeID : Integer) {
                definition:
                    store : Store = Store.allInstance()->any(s : Store | s.StoreID = storeID)
                precondition:
                    not store.oclIsUndefined()
                postcondition:
                    Store.allInstance()->excludes(store)
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "deleteStore"), "[Store; Void]");
    }

    #[test]
    fn dotted_receivers_do_not_assign() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::touch(sli : SalesLineItem) {
                precondition:
                    not sli.oclIsUndefined()
                postcondition:
                    sli.BelongedSale = CurrentSale
            }
            "#
        );
        let m = typed(&src);
        // `sli.BelongedSale` is not a property of the service, so nothing
        // is created.
        assert_eq!(ty_of(&m, "touch"), "[SalesLineItem; SalesLineItem]");
    }

    #[test]
    fn field_assignment_to_boolean_still_creates() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::complete() {
                precondition: not CurrentSale.oclIsUndefined()
                postcondition: CurrentSale = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "complete"), "[CurrentSale; CurrentSale]");
    }

    #[test]
    fn result_assignment_is_not_a_field() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::noop() {
                postcondition: result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "noop"), "[Void; Void]");
    }

    // --- opaque and conditional conjuncts ---

    #[test]
    fn single_conditional_postcondition_voids_the_contract() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::maybe() {
                precondition: not CurrentSale.oclIsUndefined()
                postcondition:
                    if CurrentSale.Total > 0
                    then let r : Receipt in r.oclIsNew()
                    else result = false endif
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "maybe"), "[Void; Void]");
        assert!(m.diagnostics.iter().any(
            |d| d.severity == Severity::Warning && d.message.contains("single conditional")
        ));
    }

    #[test]
    fn conditional_among_others_is_ignored_with_warning() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::partial() {
                precondition: not CurrentSale.oclIsUndefined()
                postcondition:
                    let r : Receipt in r.oclIsNew() and
                    if CurrentSale.Total > 0 then result = true else result = false endif
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "partial"), "[CurrentSale; <CurrentSale, Receipt>]");
        assert!(m
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning && d.message.contains("conditional effect")));
    }

    #[test]
    fn disjunctions_and_implications_are_opaque() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::opaque() {
                precondition: not CurrentSale.oclIsUndefined()
                postcondition:
                    let r : Receipt in
                    (r.oclIsNew() or CurrentSale.oclIsUndefined() = true) and
                    (CurrentSale.Total > 0 implies result = true)
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "opaque"), "[CurrentSale; CurrentSale]");
    }

    #[test]
    fn contract_without_conditions_gets_note() {
        let src = format!("{}{}", STORE_PRELUDE, "Contract S::empty() { }");
        let m = typed(&src);
        assert_eq!(ty_of(&m, "empty"), "[Void; Void]");
        assert!(m.diagnostics.iter().any(|d| d.severity == Severity::Note
            && d.message.contains("no conditions")));
    }

    // --- declarations ---

    #[test]
    fn set_parameters_type_as_indefinite_lists() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::bulk(items : Set(Item)) {
                precondition: not items.oclIsUndefined()
                postcondition: result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "bulk"), "[Item^*; Item^*]");
    }

    #[test]
    fn undeclared_names_warn_and_contribute_nothing() {
        let src = format!(
            "{}{}",
            STORE_PRELUDE,
            r#"
            Contract S::typo() {
                precondition: not mystery.oclIsUndefined()
                postcondition: result = true
            }
            "#
        );
        let m = typed(&src);
        assert_eq!(ty_of(&m, "typo"), "[Void; Void]");
        assert!(m
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning && d.message.contains("mystery")));
    }

    // --- supertype lifting ---

    #[test]
    fn supertype_receives_become_constrained_variables() {
        let src = r#"
            Actor User
            Actor Faculty extends User
            Actor Student extends User
            Service Lib {
                [Operation] borrow(userID : Integer, copyID : Integer)
            }
            Contract Lib::borrow(userID : Integer, copyID : Integer) {
                definition:
                    user : User = User.allInstance()->any(u : User | u.ID = userID),
                    copy : BookCopy = BookCopy.allInstance()->any(c : BookCopy | c.ID = copyID)
                precondition:
                    not user.oclIsUndefined() and not copy.oclIsUndefined()
                postcondition:
                    let b : Borrow in b.oclIsNew()
            }
        "#;
        let m = typed(src);
        assert_eq!(
            ty_of(&m, "borrow"),
            "[<x, BookCopy>; <x, BookCopy, Borrow>] / x <: User"
        );
    }

    #[test]
    fn multiple_supertypes_share_one_constraint() {
        let src = r#"
            Actor User
            Actor Faculty extends User
            Actor Medium
            Actor Book extends Medium
            Service Lib { [Operation] lend(a : Integer) }
            Contract Lib::lend(a : Integer) {
                definition:
                    user : User = User.allInstance()->any(u : User | u.ID = a),
                    medium : Medium = Medium.allInstance()->any(m : Medium | m.ID = a)
                precondition:
                    not user.oclIsUndefined() and not medium.oclIsUndefined()
                postcondition:
                    let b : Borrow in b.oclIsNew()
            }
        "#;
        let m = typed(src);
        assert_eq!(
            ty_of(&m, "lend"),
            "[<x, y>; <x, y, Borrow>] / x <: User, y <: Medium"
        );
    }

    #[test]
    fn subtype_yields_are_not_lifted() {
        // Only the receive part triggers lifting; a supertype that appears
        // only in the yield stays concrete.
        let src = r#"
            Actor User
            Actor Faculty extends User
            Service Lib { [Operation] register() }
            Contract Lib::register() {
                postcondition: let u : User in u.oclIsNew()
            }
        "#;
        let m = typed(src);
        assert_eq!(ty_of(&m, "register"), "[Void; User]");
    }
}
