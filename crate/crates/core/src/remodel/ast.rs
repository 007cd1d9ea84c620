//! Abstract syntax of requirement models: actors, services with their
//! temporal properties and operations, and operation contracts written in
//! an OCL-like constraint language.

/// Source position (1-based) of a syntax node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub actors: Vec<Actor>,
    pub services: Vec<Service>,
    pub contracts: Vec<Contract>,
    /// Top-level sections the parser does not know; kept for reporting.
    pub skipped: Vec<SkippedSection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    pub name: String,
    pub extends: Option<String>,
    pub description: Option<String>,
    pub use_cases: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Service {
    pub name: String,
    /// `System` blocks hold state visible to every contract; `Service`
    /// blocks only to their own contracts.
    pub is_system: bool,
    pub description: Option<String>,
    pub fields: Vec<Field>,
    pub operations: Vec<OpSig>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub ty: TypeRef,
    pub span: Span,
}

/// A type as written in declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRef {
    Named(String),
    /// `Name[LIT | LIT | ...]` enumeration declaration.
    Enum(String, Vec<String>),
    /// `Set(Name)`.
    SetOf(String),
}

impl TypeRef {
    pub fn base_name(&self) -> &str {
        match self {
            TypeRef::Named(n) | TypeRef::Enum(n, _) | TypeRef::SetOf(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSig {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<TypeRef>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub service: String,
    pub operation: String,
    pub params: Vec<Param>,
    pub ret: Option<TypeRef>,
    pub definitions: Vec<Definition>,
    pub precondition: Option<Expr>,
    pub postcondition: Option<Expr>,
    pub span: Span,
}

/// `name : Type = expr` in a contract's definition section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub ty: TypeRef,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedSection {
    pub keyword: String,
    pub span: Span,
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetBinding {
    pub name: String,
    pub ty: TypeRef,
    pub init: Option<Expr>,
}

/// Arguments of a `->` collection operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowArgs {
    None,
    Exprs(Vec<Expr>),
    /// `->any(i : Item | body)` style iterator.
    Iterator {
        var: String,
        ty: Option<String>,
        body: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Let(Vec<LetBinding>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `recv.name` attribute access or `recv.name(args)` call;
    /// `at_pre` marks a `@pre` suffix on the attribute.
    Dot {
        recv: Box<Expr>,
        name: String,
        at_pre: bool,
        args: Option<Vec<Expr>>,
    },
    /// `recv->name(...)` collection operation.
    Arrow {
        recv: Box<Expr>,
        name: String,
        args: ArrowArgs,
    },
    Ident(String),
    SelfLit,
    ResultLit,
    Bool(bool),
    Num(i64),
    Str(String),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.to_string())
    }

    /// `self.Name` or bare `Name` as a field reference, `Name` otherwise —
    /// the identifier an access denotes, when it is a simple access.
    pub fn as_simple_name(&self) -> Option<&str> {
        match self {
            Expr::Ident(n) => Some(n),
            Expr::Dot {
                recv,
                name,
                args: None,
                ..
            } if matches!(**recv, Expr::SelfLit) => Some(name),
            _ => None,
        }
    }
}
