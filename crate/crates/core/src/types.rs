//! Core type expressions and the operations the composition engine is built on:
//! normalization, head/tail decomposition, pattern matching with bindings,
//! substitution and constraint evaluation.

use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Type expressions
// ---------------------------------------------------------------------------

/// Length annotation of a `List` type: `T^3`, `T^*`, `T^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ListLen {
    Fixed(u32),
    /// Indefinite length (`*`).
    Star,
    /// A length variable such as `n` in `Int^n`.
    Var(String),
}

impl fmt::Display for ListLen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListLen::Fixed(n) => write!(f, "{}", n),
            ListLen::Star => write!(f, "*"),
            ListLen::Var(v) => write!(f, "{}", v),
        }
    }
}

/// A predicate attached to a constrained type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    /// `x <: Upper` — the binding of `x` must be a (transitive) subtype of `Upper`.
    SubtypeOf { var: String, upper: String },
    /// `(x, y) notin {(A, B), ...}` — the bound names must not form one of the
    /// excluded tuples. A single variable is the 1-tuple case.
    NotInSet {
        vars: Vec<String>,
        excluded: Vec<Vec<String>>,
    },
    /// Conjunction of predicates.
    All(Vec<Predicate>),
}

impl Predicate {
    /// All variable names the predicate mentions.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Predicate::SubtypeOf { var, .. } => vec![var.as_str()],
            Predicate::NotInSet { vars, .. } => vars.iter().map(|v| v.as_str()).collect(),
            Predicate::All(ps) => ps.iter().flat_map(|p| p.variables()).collect(),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::SubtypeOf { var, upper } => write!(f, "{} <: {}", var, upper),
            Predicate::NotInSet { vars, excluded } => {
                if vars.len() == 1 {
                    write!(f, "{} notin {{", vars[0])?;
                } else {
                    write!(f, "({}) notin {{", vars.join(", "))?;
                }
                for (i, tuple) in excluded.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if tuple.len() == 1 {
                        write!(f, "{}", tuple[0])?;
                    } else {
                        write!(f, "({})", tuple.join(", "))?;
                    }
                }
                write!(f, "}}")
            }
            Predicate::All(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", p)?;
                }
                Ok(())
            }
        }
    }
}

/// The type language.
///
/// Concrete types start with an uppercase letter, variables with a lowercase
/// letter. `Sequence` is ordered and associative; normalization keeps it flat,
/// free of `Void` and with at least two items. `Product` is an ordered tuple
/// that is *not* flattened into enclosing sequences. `Coroutine` pairs a
/// receive part with a yield part. `Constrained` attaches a predicate to a
/// base type. `List` is `element ^ length`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Concrete(String),
    Variable(String),
    Void,
    Sequence(Vec<TypeExpr>),
    Product(Vec<TypeExpr>),
    Coroutine(Box<TypeExpr>, Box<TypeExpr>),
    Constrained(Box<TypeExpr>, Predicate),
    List(Box<TypeExpr>, ListLen),
}

impl TypeExpr {
    pub fn concrete(name: &str) -> TypeExpr {
        TypeExpr::Concrete(name.to_string())
    }

    pub fn variable(name: &str) -> TypeExpr {
        TypeExpr::Variable(name.to_string())
    }

    pub fn coroutine(recv: TypeExpr, yld: TypeExpr) -> TypeExpr {
        TypeExpr::Coroutine(Box::new(recv), Box::new(yld))
    }

    /// Builds a sequence from parts and normalizes it.
    pub fn seq(items: Vec<TypeExpr>) -> TypeExpr {
        normalize(&TypeExpr::Sequence(items))
    }

    pub fn is_void(&self) -> bool {
        matches!(self, TypeExpr::Void)
    }

    pub fn is_coroutine(&self) -> bool {
        match self {
            TypeExpr::Coroutine(..) => true,
            TypeExpr::Constrained(base, _) => base.is_coroutine(),
            _ => false,
        }
    }

    /// The receive and yield parts if this is a (possibly constrained) coroutine.
    pub fn as_coroutine(&self) -> Option<(&TypeExpr, &TypeExpr)> {
        match self {
            TypeExpr::Coroutine(r, y) => Some((r, y)),
            TypeExpr::Constrained(base, _) => base.as_coroutine(),
            _ => None,
        }
    }
}

/// Writes a list item, parenthesizing constrained types whose `/ ...` suffix
/// would otherwise swallow the following comma.
fn fmt_item(t: &TypeExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        TypeExpr::Constrained(..) => write!(f, "({})", t),
        _ => write!(f, "{}", t),
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Concrete(n) | TypeExpr::Variable(n) => write!(f, "{}", n),
            TypeExpr::Void => write!(f, "Void"),
            TypeExpr::Sequence(items) => {
                write!(f, "<")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    fmt_item(t, f)?;
                }
                write!(f, ">")
            }
            TypeExpr::Product(items) => {
                write!(f, "(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    fmt_item(t, f)?;
                }
                write!(f, ")")
            }
            TypeExpr::Coroutine(r, y) => write!(f, "[{}; {}]", r, y),
            TypeExpr::Constrained(base, p) => write!(f, "{} / {}", base, p),
            TypeExpr::List(e, len) => {
                // Parenthesize composite elements so the suffix binds visibly.
                match **e {
                    TypeExpr::Concrete(_) | TypeExpr::Variable(_) | TypeExpr::Product(_) => {
                        write!(f, "{}^{}", e, len)
                    }
                    _ => write!(f, "({})^{}", e, len),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeError {
    /// head/tail of `Void`.
    EmptyDecomposition(&'static str),
    /// head/tail of a list with a variable length.
    UnknownLength(String),
    /// `productToSequence` on a non-product.
    NotAProduct(String),
    /// Constraint evaluation saw an unbound variable.
    UnboundVariable(String),
    /// Substitution fully instantiated a predicate that evaluates to false.
    ConstraintViolated(String),
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeError::EmptyDecomposition(op) => write!(f, "{} of Void is undefined", op),
            TypeError::UnknownLength(v) => {
                write!(f, "cannot decompose a list with unresolved length {}", v)
            }
            TypeError::NotAProduct(t) => write!(f, "{} is not a product type", t),
            TypeError::UnboundVariable(v) => {
                write!(f, "constraint references unbound variable {}", v)
            }
            TypeError::ConstraintViolated(p) => write!(f, "constraint violated: {}", p),
        }
    }
}

impl std::error::Error for TypeError {}

// ---------------------------------------------------------------------------
// Subtype hierarchy
// ---------------------------------------------------------------------------

/// A single-inheritance subtype hierarchy over concrete type names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hierarchy {
    parent: BTreeMap<String, String>,
}

impl Hierarchy {
    pub fn new() -> Hierarchy {
        Hierarchy::default()
    }

    /// Declares `child` as a direct subtype of `parent`. Returns false when
    /// the link would close a cycle (the link is then not added).
    pub fn add(&mut self, child: &str, parent: &str) -> bool {
        if child == parent || self.is_subtype(parent, child) {
            return false;
        }
        self.parent.insert(child.to_string(), parent.to_string());
        true
    }

    /// Reflexive-transitive subtype test on names.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup {
            return true;
        }
        let mut cur = sub;
        while let Some(p) = self.parent.get(cur) {
            if p == sup {
                return true;
            }
            cur = p;
        }
        false
    }

    /// True when some declared type has `name` as a strict ancestor.
    /// Every strict ancestor is the direct parent of something, so checking
    /// the direct links suffices.
    pub fn has_descendants(&self, name: &str) -> bool {
        self.parent.values().any(|p| p == name)
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parent.iter().map(|(c, p)| (c.as_str(), p.as_str()))
    }
}

// ---------------------------------------------------------------------------
// Bindings
// ---------------------------------------------------------------------------

/// What a variable can be bound to: a type, or a list length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Ty(TypeExpr),
    Len(u32),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Ty(t) => write!(f, "{}", t),
            Bound::Len(n) => write!(f, "{}", n),
        }
    }
}

/// Result of a match: failure, or a finite map from variable names to values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingSet {
    Failure,
    Bindings(BTreeMap<String, Bound>),
}

impl BindingSet {
    pub fn empty() -> BindingSet {
        BindingSet::Bindings(BTreeMap::new())
    }

    pub fn single(name: &str, value: Bound) -> BindingSet {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), value);
        BindingSet::Bindings(m)
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, BindingSet::Failure)
    }

    pub fn get(&self, name: &str) -> Option<&Bound> {
        match self {
            BindingSet::Failure => None,
            BindingSet::Bindings(m) => m.get(name),
        }
    }

    /// Union of two binding sets. Conflicting bindings for the same variable
    /// collapse the result to failure; failure is absorbing.
    pub fn join(self, other: BindingSet) -> BindingSet {
        match (self, other) {
            (BindingSet::Bindings(mut a), BindingSet::Bindings(b)) => {
                for (k, v) in b {
                    match a.get(&k) {
                        Some(existing) if *existing != v => return BindingSet::Failure,
                        Some(_) => {}
                        None => {
                            a.insert(k, v);
                        }
                    }
                }
                BindingSet::Bindings(a)
            }
            _ => BindingSet::Failure,
        }
    }
}

impl fmt::Display for BindingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingSet::Failure => write!(f, "failure"),
            BindingSet::Bindings(m) => {
                write!(f, "{{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{} = {}", k, v)?;
                }
                write!(f, "}}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Rewrites a type into canonical form:
/// sequences are flattened and drop `Void` items, empty sequences become
/// `Void`, one-item sequences collapse to the item, `T^0` becomes `Void`,
/// and normalization recurses into every composite. Idempotent.
pub fn normalize(t: &TypeExpr) -> TypeExpr {
    match t {
        TypeExpr::Concrete(_) | TypeExpr::Variable(_) | TypeExpr::Void => t.clone(),
        TypeExpr::Sequence(items) => {
            let mut flat = Vec::new();
            for item in items {
                match normalize(item) {
                    TypeExpr::Void => {}
                    TypeExpr::Sequence(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            match flat.len() {
                0 => TypeExpr::Void,
                1 => flat.pop().unwrap(),
                _ => TypeExpr::Sequence(flat),
            }
        }
        TypeExpr::Product(items) => {
            // Components keep their positions, but a tuple of fewer than
            // two things is not a tuple — `(A)` is just `A`.
            let mut inner: Vec<TypeExpr> = items.iter().map(normalize).collect();
            match inner.len() {
                0 => TypeExpr::Void,
                1 => inner.pop().unwrap(),
                _ => TypeExpr::Product(inner),
            }
        }
        TypeExpr::Coroutine(r, y) => TypeExpr::coroutine(normalize(r), normalize(y)),
        TypeExpr::Constrained(base, p) => {
            TypeExpr::Constrained(Box::new(normalize(base)), p.clone())
        }
        TypeExpr::List(e, len) => {
            let elem = normalize(e);
            if elem.is_void() || matches!(len, ListLen::Fixed(0)) {
                TypeExpr::Void
            } else {
                TypeExpr::List(Box::new(elem), len.clone())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Head / tail
// ---------------------------------------------------------------------------

/// First demandable element of a type. Sequences expose the head of their
/// first item; lists of known non-zero length expose the element type;
/// every other non-`Void` type is its own head.
pub fn head(t: &TypeExpr) -> Result<TypeExpr, TypeError> {
    match t {
        TypeExpr::Void => Err(TypeError::EmptyDecomposition("head")),
        TypeExpr::Sequence(items) => head(&items[0]),
        TypeExpr::List(e, len) => match len {
            ListLen::Fixed(0) => Err(TypeError::EmptyDecomposition("head")),
            ListLen::Fixed(_) | ListLen::Star => Ok((**e).clone()),
            ListLen::Var(v) => Err(TypeError::UnknownLength(v.clone())),
        },
        other => Ok(other.clone()),
    }
}

/// What remains after removing the head. Dual of [`head`]; the result is
/// normalized. `T^*` keeps its indefinite length.
pub fn tail(t: &TypeExpr) -> Result<TypeExpr, TypeError> {
    match t {
        TypeExpr::Void => Err(TypeError::EmptyDecomposition("tail")),
        TypeExpr::Sequence(items) => {
            let first = tail(&items[0])?;
            let mut rest = vec![first];
            rest.extend(items[1..].iter().cloned());
            Ok(normalize(&TypeExpr::Sequence(rest)))
        }
        TypeExpr::List(e, len) => match len {
            ListLen::Fixed(0) => Err(TypeError::EmptyDecomposition("tail")),
            ListLen::Fixed(n) => Ok(normalize(&TypeExpr::List(e.clone(), ListLen::Fixed(n - 1)))),
            ListLen::Star => Ok(TypeExpr::List(e.clone(), ListLen::Star)),
            ListLen::Var(v) => Err(TypeError::UnknownLength(v.clone())),
        },
        _ => Ok(TypeExpr::Void),
    }
}

// ---------------------------------------------------------------------------
// Product conversion
// ---------------------------------------------------------------------------

/// Converts a product into the sequence of its members (one level only).
pub fn product_to_sequence(t: &TypeExpr) -> Result<TypeExpr, TypeError> {
    match t {
        TypeExpr::Product(items) => Ok(normalize(&TypeExpr::Sequence(items.clone()))),
        other => Err(TypeError::NotAProduct(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

/// Matches a candidate type against a pattern, producing bindings for the
/// pattern's variables or failure.
///
/// A variable pattern binds the candidate. Concrete names match equal names
/// and, via `hierarchy`, concrete supertypes. Products match componentwise
/// with the same arity; sequences likewise. A coroutine pattern only matches
/// coroutine candidates (receive and yield bindings are joined). Constrained
/// patterns additionally require the predicate to hold on the collected
/// bindings. List patterns with a variable length bind the candidate's length.
pub fn match_type(candidate: &TypeExpr, pattern: &TypeExpr, hierarchy: &Hierarchy) -> BindingSet {
    match pattern {
        TypeExpr::Variable(v) => BindingSet::single(v, Bound::Ty(candidate.clone())),
        TypeExpr::Void => {
            if candidate.is_void() {
                BindingSet::empty()
            } else {
                BindingSet::Failure
            }
        }
        TypeExpr::Concrete(p) => match candidate {
            TypeExpr::Concrete(c) if hierarchy.is_subtype(c, p) => BindingSet::empty(),
            _ => BindingSet::Failure,
        },
        TypeExpr::Product(ps) => match candidate {
            TypeExpr::Product(cs) if cs.len() == ps.len() => {
                let mut acc = BindingSet::empty();
                for (c, p) in cs.iter().zip(ps) {
                    acc = acc.join(match_type(c, p, hierarchy));
                    if acc.is_failure() {
                        return BindingSet::Failure;
                    }
                }
                acc
            }
            _ => BindingSet::Failure,
        },
        TypeExpr::Sequence(ps) => match candidate {
            TypeExpr::Sequence(cs) if cs.len() == ps.len() => {
                let mut acc = BindingSet::empty();
                for (c, p) in cs.iter().zip(ps) {
                    acc = acc.join(match_type(c, p, hierarchy));
                    if acc.is_failure() {
                        return BindingSet::Failure;
                    }
                }
                acc
            }
            _ => BindingSet::Failure,
        },
        TypeExpr::Coroutine(pr, py) => match candidate {
            TypeExpr::Coroutine(cr, cy) => {
                match_type(cr, pr, hierarchy).join(match_type(cy, py, hierarchy))
            }
            TypeExpr::Constrained(base, _) => match_type(base, pattern, hierarchy),
            _ => BindingSet::Failure,
        },
        TypeExpr::Constrained(base, pred) => {
            let bindings = match_type(candidate, base, hierarchy);
            if bindings.is_failure() {
                return BindingSet::Failure;
            }
            match eval_predicate(pred, &bindings, hierarchy) {
                Ok(true) => bindings,
                _ => BindingSet::Failure,
            }
        }
        TypeExpr::List(pe, plen) => match candidate {
            TypeExpr::List(ce, clen) => {
                let elem = match_type(ce, pe, hierarchy);
                if elem.is_failure() {
                    return BindingSet::Failure;
                }
                let len = match (clen, plen) {
                    (ListLen::Fixed(c), ListLen::Fixed(p)) if c == p => BindingSet::empty(),
                    (_, ListLen::Star) => BindingSet::empty(),
                    (ListLen::Fixed(c), ListLen::Var(v)) => BindingSet::single(v, Bound::Len(*c)),
                    _ => BindingSet::Failure,
                };
                elem.join(len)
            }
            _ => BindingSet::Failure,
        },
    }
}

// ---------------------------------------------------------------------------
// Constraint evaluation
// ---------------------------------------------------------------------------

fn bound_name(b: &Bound) -> Option<&str> {
    match b {
        Bound::Ty(TypeExpr::Concrete(n)) | Bound::Ty(TypeExpr::Variable(n)) => Some(n),
        _ => None,
    }
}

/// Evaluates a predicate under a binding set. Every variable the predicate
/// references must be bound, otherwise this is an error.
pub fn eval_predicate(
    pred: &Predicate,
    bindings: &BindingSet,
    hierarchy: &Hierarchy,
) -> Result<bool, TypeError> {
    match pred {
        Predicate::SubtypeOf { var, upper } => {
            let b = bindings
                .get(var)
                .ok_or_else(|| TypeError::UnboundVariable(var.clone()))?;
            match b {
                Bound::Ty(TypeExpr::Concrete(n)) => Ok(hierarchy.is_subtype(n, upper)),
                _ => Ok(false),
            }
        }
        Predicate::NotInSet { vars, excluded } => {
            let mut names = Vec::with_capacity(vars.len());
            for v in vars {
                let b = bindings
                    .get(v)
                    .ok_or_else(|| TypeError::UnboundVariable(v.clone()))?;
                names.push(bound_name(b).map(str::to_string));
            }
            for tuple in excluded {
                if tuple.len() == names.len()
                    && tuple
                        .iter()
                        .zip(&names)
                        .all(|(t, n)| n.as_deref() == Some(t.as_str()))
                {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Predicate::All(ps) => {
            for p in ps {
                if !eval_predicate(p, bindings, hierarchy)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

fn pred_fully_bound(pred: &Predicate, bindings: &BindingSet) -> bool {
    pred.variables().iter().all(|v| bindings.get(v).is_some())
}

/// Applies a binding set to a type. Variables are replaced by their bound
/// types, list-length variables by their bound lengths. A constraint whose
/// variables are all eliminated is re-evaluated and dropped when satisfied;
/// if it fails the substitution is an error. The result is normalized.
pub fn substitute(
    t: &TypeExpr,
    bindings: &BindingSet,
    hierarchy: &Hierarchy,
) -> Result<TypeExpr, TypeError> {
    let out = match t {
        TypeExpr::Variable(v) => match bindings.get(v) {
            Some(Bound::Ty(b)) => b.clone(),
            _ => t.clone(),
        },
        TypeExpr::Concrete(_) | TypeExpr::Void => t.clone(),
        TypeExpr::Sequence(items) => {
            let subbed = items
                .iter()
                .map(|i| substitute(i, bindings, hierarchy))
                .collect::<Result<Vec<_>, _>>()?;
            TypeExpr::Sequence(subbed)
        }
        TypeExpr::Product(items) => {
            let subbed = items
                .iter()
                .map(|i| substitute(i, bindings, hierarchy))
                .collect::<Result<Vec<_>, _>>()?;
            TypeExpr::Product(subbed)
        }
        TypeExpr::Coroutine(r, y) => TypeExpr::Coroutine(
            Box::new(substitute(r, bindings, hierarchy)?),
            Box::new(substitute(y, bindings, hierarchy)?),
        ),
        TypeExpr::Constrained(base, pred) => {
            let base = substitute(base, bindings, hierarchy)?;
            if pred_fully_bound(pred, bindings) {
                if eval_predicate(pred, bindings, hierarchy)? {
                    base
                } else {
                    return Err(TypeError::ConstraintViolated(pred.to_string()));
                }
            } else {
                TypeExpr::Constrained(Box::new(base), pred.clone())
            }
        }
        TypeExpr::List(e, len) => {
            let elem = substitute(e, bindings, hierarchy)?;
            let len = match len {
                ListLen::Var(v) => match bindings.get(v) {
                    Some(Bound::Len(n)) => ListLen::Fixed(*n),
                    _ => len.clone(),
                },
                other => other.clone(),
            };
            TypeExpr::List(Box::new(elem), len)
        }
    };
    Ok(normalize(&out))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> TypeExpr {
        TypeExpr::concrete(n)
    }

    fn v(n: &str) -> TypeExpr {
        TypeExpr::variable(n)
    }

    // --- normalize ---

    #[test]
    fn normalize_flattens_and_drops_void() {
        let t = TypeExpr::Sequence(vec![
            TypeExpr::Sequence(vec![c("A"), TypeExpr::Void]),
            c("B"),
        ]);
        assert_eq!(normalize(&t), TypeExpr::Sequence(vec![c("A"), c("B")]));
    }

    #[test]
    fn normalize_collapses_singleton_sequence() {
        let t = TypeExpr::Sequence(vec![TypeExpr::Void, c("A"), TypeExpr::Void]);
        assert_eq!(normalize(&t), c("A"));
    }

    #[test]
    fn normalize_collapses_singleton_product() {
        // A one-tuple is its element; Void components still count toward
        // the arity of larger tuples.
        assert_eq!(normalize(&TypeExpr::Product(vec![c("A")])), c("A"));
        assert_eq!(normalize(&TypeExpr::Product(vec![])), TypeExpr::Void);
        let pair = TypeExpr::Product(vec![c("A"), TypeExpr::Void]);
        assert_eq!(normalize(&pair), pair);
    }

    #[test]
    fn normalize_empty_sequence_and_zero_list() {
        assert_eq!(normalize(&TypeExpr::Sequence(vec![])), TypeExpr::Void);
        let l = TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(0));
        assert_eq!(normalize(&l), TypeExpr::Void);
    }

    #[test]
    fn normalize_recurses_into_coroutines_and_products() {
        let t = TypeExpr::coroutine(
            TypeExpr::Sequence(vec![TypeExpr::Sequence(vec![c("A")]), TypeExpr::Void]),
            TypeExpr::Product(vec![TypeExpr::Sequence(vec![c("B")]), c("C")]),
        );
        assert_eq!(
            normalize(&t),
            TypeExpr::coroutine(c("A"), TypeExpr::Product(vec![c("B"), c("C")]))
        );
    }

    #[test]
    fn normalize_is_idempotent_on_samples() {
        let samples = vec![
            TypeExpr::Sequence(vec![c("A"), TypeExpr::Sequence(vec![c("B"), c("C")])]),
            TypeExpr::coroutine(TypeExpr::Void, TypeExpr::Sequence(vec![])),
            TypeExpr::List(Box::new(TypeExpr::Void), ListLen::Star),
        ];
        for s in samples {
            let once = normalize(&s);
            assert_eq!(normalize(&once), once);
        }
    }

    // --- head / tail ---

    #[test]
    fn head_of_atoms_is_identity() {
        assert_eq!(head(&c("K")).unwrap(), c("K"));
        assert_eq!(head(&v("x")).unwrap(), v("x"));
        let co = TypeExpr::coroutine(c("A"), c("B"));
        assert_eq!(head(&co).unwrap(), co);
        let prod = TypeExpr::Product(vec![c("A"), c("B")]);
        assert_eq!(head(&prod).unwrap(), prod);
    }

    #[test]
    fn head_and_tail_of_sequence() {
        let s = TypeExpr::Sequence(vec![c("A"), c("B"), c("C")]);
        assert_eq!(head(&s).unwrap(), c("A"));
        assert_eq!(tail(&s).unwrap(), TypeExpr::Sequence(vec![c("B"), c("C")]));
        let two = TypeExpr::Sequence(vec![c("A"), c("B")]);
        assert_eq!(tail(&two).unwrap(), c("B"));
    }

    #[test]
    fn head_tail_of_lists() {
        let l5 = TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(5));
        assert_eq!(head(&l5).unwrap(), c("Int"));
        assert_eq!(
            tail(&l5).unwrap(),
            TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(4))
        );
        let l1 = TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(1));
        assert_eq!(tail(&l1).unwrap(), TypeExpr::Void);
        let star = TypeExpr::List(Box::new(c("Int")), ListLen::Star);
        assert_eq!(tail(&star).unwrap(), star.clone());
        assert_eq!(head(&star).unwrap(), c("Int"));
    }

    #[test]
    fn head_tail_of_void_fail() {
        assert!(head(&TypeExpr::Void).is_err());
        assert!(tail(&TypeExpr::Void).is_err());
    }

    #[test]
    fn tail_of_atom_is_void() {
        assert_eq!(tail(&c("K")).unwrap(), TypeExpr::Void);
        let prod = TypeExpr::Product(vec![c("A"), c("B")]);
        assert_eq!(tail(&prod).unwrap(), TypeExpr::Void);
    }

    // --- product_to_sequence ---

    #[test]
    fn product_to_sequence_is_one_level() {
        let p = TypeExpr::Product(vec![
            TypeExpr::Product(vec![c("A"), c("B")]),
            c("C"),
        ]);
        assert_eq!(
            product_to_sequence(&p).unwrap(),
            TypeExpr::Sequence(vec![TypeExpr::Product(vec![c("A"), c("B")]), c("C")])
        );
        assert!(product_to_sequence(&c("A")).is_err());
    }

    #[test]
    fn product_to_sequence_of_coroutines() {
        let p = TypeExpr::Product(vec![
            TypeExpr::coroutine(c("A"), TypeExpr::Void),
            TypeExpr::coroutine(c("B"), TypeExpr::Void),
        ]);
        let s = product_to_sequence(&p).unwrap();
        assert!(matches!(s, TypeExpr::Sequence(ref items) if items.len() == 2));
    }

    // --- match_type ---

    #[test]
    fn match_concrete_and_variable() {
        let h = Hierarchy::new();
        assert_eq!(match_type(&c("A"), &c("A"), &h), BindingSet::empty());
        assert!(match_type(&c("A"), &c("B"), &h).is_failure());
        assert_eq!(
            match_type(&c("A"), &v("x"), &h),
            BindingSet::single("x", Bound::Ty(c("A")))
        );
    }

    #[test]
    fn match_uses_subtype_widening() {
        let mut h = Hierarchy::new();
        assert!(h.add("Faculty", "User"));
        assert_eq!(match_type(&c("Faculty"), &c("User"), &h), BindingSet::empty());
        assert!(match_type(&c("User"), &c("Faculty"), &h).is_failure());
    }

    #[test]
    fn match_products_componentwise() {
        let h = Hierarchy::new();
        let cand = TypeExpr::Product(vec![c("Child"), c("Jane"), c("Sam")]);
        let pat = TypeExpr::Product(vec![c("Child"), v("x"), v("y")]);
        let b = match_type(&cand, &pat, &h);
        assert_eq!(b.get("x"), Some(&Bound::Ty(c("Jane"))));
        assert_eq!(b.get("y"), Some(&Bound::Ty(c("Sam"))));
        // arity mismatch
        let pat2 = TypeExpr::Product(vec![c("Child"), v("x")]);
        assert!(match_type(&cand, &pat2, &h).is_failure());
    }

    #[test]
    fn match_conflicting_bindings_fail() {
        let h = Hierarchy::new();
        let cand = TypeExpr::Product(vec![c("A"), c("B")]);
        let pat = TypeExpr::Product(vec![v("x"), v("x")]);
        assert!(match_type(&cand, &pat, &h).is_failure());
        let same = TypeExpr::Product(vec![c("A"), c("A")]);
        assert!(!match_type(&same, &pat, &h).is_failure());
    }

    #[test]
    fn match_non_coroutine_against_coroutine_pattern_fails() {
        let h = Hierarchy::new();
        let pat = TypeExpr::coroutine(v("a"), v("b"));
        assert!(match_type(&c("A"), &pat, &h).is_failure());
        let cand = TypeExpr::coroutine(c("A"), c("B"));
        let b = match_type(&cand, &pat, &h);
        assert_eq!(b.get("a"), Some(&Bound::Ty(c("A"))));
        assert_eq!(b.get("b"), Some(&Bound::Ty(c("B"))));
    }

    #[test]
    fn match_constrained_pattern_checks_predicate() {
        let h = Hierarchy::new();
        let pat = TypeExpr::Constrained(
            Box::new(TypeExpr::Product(vec![c("Male"), v("x")])),
            Predicate::NotInSet {
                vars: vec!["x".into()],
                excluded: vec![vec!["John".into()], vec!["Sam".into()], vec!["George".into()]],
            },
        );
        let sue = TypeExpr::Product(vec![c("Male"), c("Sue")]);
        assert!(!match_type(&sue, &pat, &h).is_failure());
        let sam = TypeExpr::Product(vec![c("Male"), c("Sam")]);
        assert!(match_type(&sam, &pat, &h).is_failure());
    }

    #[test]
    fn match_list_lengths() {
        let h = Hierarchy::new();
        let c5 = TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(5));
        let pn = TypeExpr::List(Box::new(c("Int")), ListLen::Var("n".into()));
        assert_eq!(
            match_type(&c5, &pn, &h),
            BindingSet::single("n", Bound::Len(5))
        );
        let star_pat = TypeExpr::List(Box::new(c("Int")), ListLen::Star);
        assert_eq!(match_type(&c5, &star_pat, &h), BindingSet::empty());
        let star_cand = TypeExpr::List(Box::new(c("Int")), ListLen::Star);
        assert_eq!(match_type(&star_cand, &star_pat, &h), BindingSet::empty());
        // indefinite candidate cannot promise a fixed length
        let p3 = TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(3));
        assert!(match_type(&star_cand, &p3, &h).is_failure());
        assert!(match_type(&c5, &p3, &h).is_failure());
    }

    // --- eval_predicate ---

    #[test]
    fn eval_subtype_predicate() {
        let mut h = Hierarchy::new();
        h.add("Faculty", "User");
        let p = Predicate::SubtypeOf {
            var: "x".into(),
            upper: "User".into(),
        };
        let b = BindingSet::single("x", Bound::Ty(c("Faculty")));
        assert_eq!(eval_predicate(&p, &b, &h).unwrap(), true);
        let b2 = BindingSet::single("x", Bound::Ty(c("Librarian")));
        assert_eq!(eval_predicate(&p, &b2, &h).unwrap(), false);
    }

    #[test]
    fn eval_notin_predicate() {
        let h = Hierarchy::new();
        let p = Predicate::NotInSet {
            vars: vec!["x".into(), "y".into()],
            excluded: vec![vec!["John".into(), "Sue".into()]],
        };
        let hit = BindingSet::single("x", Bound::Ty(c("John")))
            .join(BindingSet::single("y", Bound::Ty(c("Sue"))));
        assert_eq!(eval_predicate(&p, &hit, &h).unwrap(), false);
        let miss = BindingSet::single("x", Bound::Ty(c("Jane")))
            .join(BindingSet::single("y", Bound::Ty(c("Sue"))));
        assert_eq!(eval_predicate(&p, &miss, &h).unwrap(), true);
    }

    #[test]
    fn eval_unbound_is_error() {
        let h = Hierarchy::new();
        let p = Predicate::SubtypeOf {
            var: "x".into(),
            upper: "User".into(),
        };
        assert!(eval_predicate(&p, &BindingSet::empty(), &h).is_err());
    }

    // --- substitute ---

    #[test]
    fn substitute_replaces_variables_everywhere() {
        let h = Hierarchy::new();
        let t = TypeExpr::coroutine(
            TypeExpr::Sequence(vec![v("x"), c("BookCopy")]),
            TypeExpr::Sequence(vec![v("x"), c("Reserve")]),
        );
        let b = BindingSet::single("x", Bound::Ty(c("Faculty")));
        let out = substitute(&t, &b, &h).unwrap();
        assert_eq!(
            out,
            TypeExpr::coroutine(
                TypeExpr::Sequence(vec![c("Faculty"), c("BookCopy")]),
                TypeExpr::Sequence(vec![c("Faculty"), c("Reserve")]),
            )
        );
    }

    #[test]
    fn substitute_list_length() {
        let h = Hierarchy::new();
        let t = TypeExpr::List(Box::new(c("Int")), ListLen::Var("n".into()));
        let b = BindingSet::single("n", Bound::Len(5));
        assert_eq!(
            substitute(&t, &b, &h).unwrap(),
            TypeExpr::List(Box::new(c("Int")), ListLen::Fixed(5))
        );
    }

    #[test]
    fn substitute_discharges_satisfied_constraints() {
        let mut h = Hierarchy::new();
        h.add("Faculty", "User");
        let t = TypeExpr::Constrained(
            Box::new(TypeExpr::coroutine(v("x"), c("Reserve"))),
            Predicate::SubtypeOf {
                var: "x".into(),
                upper: "User".into(),
            },
        );
        let ok = BindingSet::single("x", Bound::Ty(c("Faculty")));
        assert_eq!(
            substitute(&t, &ok, &h).unwrap(),
            TypeExpr::coroutine(c("Faculty"), c("Reserve"))
        );
        let bad = BindingSet::single("x", Bound::Ty(c("Intruder")));
        assert!(substitute(&t, &bad, &h).is_err());
    }

    #[test]
    fn substitute_leaves_unbound_variables() {
        let h = Hierarchy::new();
        let t = TypeExpr::Sequence(vec![v("x"), v("y")]);
        let b = BindingSet::single("x", Bound::Ty(c("A")));
        assert_eq!(
            substitute(&t, &b, &h).unwrap(),
            TypeExpr::Sequence(vec![c("A"), v("y")])
        );
    }

    // --- display ---

    #[test]
    fn display_forms() {
        let t = TypeExpr::coroutine(
            TypeExpr::Sequence(vec![c("CurrentSale"), c("Item")]),
            c("CashPayment"),
        );
        assert_eq!(t.to_string(), "[<CurrentSale, Item>; CashPayment]");
        let l = TypeExpr::List(Box::new(c("Int")), ListLen::Star);
        assert_eq!(l.to_string(), "Int^*");
        let p = TypeExpr::Constrained(
            Box::new(TypeExpr::coroutine(v("x"), c("A"))),
            Predicate::SubtypeOf {
                var: "x".into(),
                upper: "User".into(),
            },
        );
        assert_eq!(p.to_string(), "[x; A] / x <: User");
    }
}
