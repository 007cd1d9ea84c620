//! Recursive-descent parser for requirement model sources.

use super::ast::*;
use super::lexer::{tokenize, TokKind, Token};
use super::{Diagnostic, Severity};

pub fn parse_model(src: &str) -> Result<Model, Diagnostic> {
    let tokens = tokenize(src).map_err(|e| Diagnostic {
        severity: Severity::Error,
        line: e.line,
        col: e.col,
        message: e.message,
    })?;
    Parser { tokens, pos: 0 }.model()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    // --- token helpers ---

    fn tok(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn kind(&self) -> &TokKind {
        &self.tok().kind
    }

    fn span(&self) -> Span {
        Span {
            line: self.tok().line,
            col: self.tok().col,
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.tok().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            line: self.tok().line,
            col: self.tok().col,
            message: message.into(),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.kind(), TokKind::Punct(p) if *p == c)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.at_punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}', found {}", c, self.kind())))
        }
    }

    fn at_ident(&self, text: &str) -> bool {
        matches!(self.kind(), TokKind::Ident(s) if s == text)
    }

    fn eat_ident(&mut self, text: &str) -> bool {
        if self.at_ident(text) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<String> {
        match self.kind().clone() {
            TokKind::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {}, found {}", what, other))),
        }
    }

    fn peek_kind(&self, ahead: usize) -> &TokKind {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    // --- model structure ---

    fn model(&mut self) -> PResult<Model> {
        let mut model = Model {
            actors: Vec::new(),
            services: Vec::new(),
            contracts: Vec::new(),
            skipped: Vec::new(),
        };
        loop {
            let mut description = None;
            while self.at_punct('@') {
                let (name, value) = self.annotation()?;
                if name == "Description" {
                    description = Some(value);
                }
            }
            match self.kind().clone() {
                TokKind::Eof => break,
                TokKind::Ident(kw) => match kw.as_str() {
                    "Actor" => {
                        let actor = self.actor(description)?;
                        model.actors.push(actor);
                    }
                    "System" | "Service" => {
                        let service = self.service(kw == "System", description)?;
                        model.services.push(service);
                    }
                    "Contract" => {
                        let contract = self.contract()?;
                        model.contracts.push(contract);
                    }
                    _ => {
                        let skipped = self.skip_section(&kw)?;
                        model.skipped.push(skipped);
                    }
                },
                other => {
                    return Err(self.error(format!("expected a declaration, found {}", other)))
                }
            }
        }
        Ok(model)
    }

    fn annotation(&mut self) -> PResult<(String, String)> {
        self.expect_punct('@')?;
        let name = self.expect_ident("annotation name")?;
        self.expect_punct('(')?;
        let value = match self.kind().clone() {
            TokKind::Str(s) => {
                self.bump();
                s
            }
            other => return Err(self.error(format!("expected string literal, found {}", other))),
        };
        self.expect_punct(')')?;
        Ok((name, value))
    }

    fn actor(&mut self, description: Option<String>) -> PResult<Actor> {
        let span = self.span();
        self.bump(); // Actor
        let name = self.expect_ident("actor name")?;
        let extends = if self.eat_ident("extends") {
            Some(self.expect_ident("actor name")?)
        } else {
            None
        };
        let mut actor = Actor {
            name,
            extends,
            description,
            use_cases: Vec::new(),
            span,
        };
        if self.eat_punct('{') {
            loop {
                if self.eat_punct('}') {
                    break;
                }
                if self.at_punct('@') {
                    let (name, value) = self.annotation()?;
                    if name == "Description" && actor.description.is_none() {
                        actor.description = Some(value);
                    }
                } else if self.eat_ident("usecase") {
                    actor.use_cases.push(self.expect_ident("use case name")?);
                } else {
                    return Err(
                        self.error(format!("expected 'usecase' or '}}', found {}", self.kind()))
                    );
                }
            }
        }
        Ok(actor)
    }

    fn service(&mut self, is_system: bool, description: Option<String>) -> PResult<Service> {
        let span = self.span();
        self.bump(); // System | Service
        let name = self.expect_ident("service name")?;
        self.expect_punct('{')?;
        let mut service = Service {
            name,
            is_system,
            description,
            fields: Vec::new(),
            operations: Vec::new(),
            span,
        };
        while !self.eat_punct('}') {
            self.expect_punct('[')?;
            let section = self.expect_ident("section name")?;
            self.expect_punct(']')?;
            match section.as_str() {
                "TempProperty" => {
                    while matches!(self.kind(), TokKind::Ident(_)) {
                        let span = self.span();
                        let fname = self.expect_ident("property name")?;
                        self.expect_punct(':')?;
                        let ty = self.type_ref()?;
                        service.fields.push(Field {
                            name: fname,
                            ty,
                            span,
                        });
                    }
                }
                "Operation" => {
                    while matches!(self.kind(), TokKind::Ident(_)) {
                        service.operations.push(self.op_sig()?);
                    }
                }
                other => {
                    return Err(self.error(format!(
                        "unknown service section [{}]; expected [TempProperty] or [Operation]",
                        other
                    )))
                }
            }
        }
        Ok(service)
    }

    fn op_sig(&mut self) -> PResult<OpSig> {
        let span = self.span();
        let name = self.expect_ident("operation name")?;
        self.expect_punct('(')?;
        let params = self.params()?;
        let ret = if self.eat_punct(':') {
            Some(self.type_ref()?)
        } else {
            None
        };
        Ok(OpSig {
            name,
            params,
            ret,
            span,
        })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.eat_punct(')') {
            return Ok(params);
        }
        loop {
            let name = self.expect_ident("parameter name")?;
            self.expect_punct(':')?;
            let ty = self.type_ref()?;
            params.push(Param { name, ty });
            if self.eat_punct(',') {
                continue;
            }
            self.expect_punct(')')?;
            return Ok(params);
        }
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let name = self.expect_ident("type name")?;
        if name == "Set" && self.eat_punct('(') {
            let inner = self.expect_ident("type name")?;
            self.expect_punct(')')?;
            return Ok(TypeRef::SetOf(inner));
        }
        // A following '[' opens an enumeration literal list, unless it is
        // the next service section marker such as [Operation].
        let next_is_section = matches!(
            self.peek_kind(1),
            TokKind::Ident(s) if s == "TempProperty" || s == "Operation"
        ) && *self.peek_kind(2) == TokKind::Punct(']');
        if !next_is_section && self.eat_punct('[') {
            let mut lits = vec![self.expect_ident("enumeration literal")?];
            while self.eat_punct('|') {
                lits.push(self.expect_ident("enumeration literal")?);
            }
            self.expect_punct(']')?;
            return Ok(TypeRef::Enum(name, lits));
        }
        Ok(TypeRef::Named(name))
    }

    fn contract(&mut self) -> PResult<Contract> {
        let span = self.span();
        self.bump(); // Contract
        let service = self.expect_ident("service name")?;
        if !matches!(self.kind(), TokKind::ColonColon) {
            return Err(self.error(format!("expected '::', found {}", self.kind())));
        }
        self.bump();
        let operation = self.expect_ident("operation name")?;
        self.expect_punct('(')?;
        let params = self.params()?;
        let ret = if self.eat_punct(':') {
            Some(self.type_ref()?)
        } else {
            None
        };
        self.expect_punct('{')?;
        let mut contract = Contract {
            service,
            operation,
            params,
            ret,
            definitions: Vec::new(),
            precondition: None,
            postcondition: None,
            span,
        };
        while !self.eat_punct('}') {
            let label = self.expect_ident("'definition', 'precondition' or 'postcondition'")?;
            self.expect_punct(':')?;
            match label.as_str() {
                "definition" => contract.definitions = self.definitions()?,
                "precondition" => contract.precondition = Some(self.expr()?),
                "postcondition" => contract.postcondition = Some(self.expr()?),
                other => {
                    return Err(self.error(format!("unknown contract section '{}'", other)));
                }
            }
        }
        Ok(contract)
    }

    /// `name : Type = expr` entries, separated by commas or juxtaposition.
    fn definitions(&mut self) -> PResult<Vec<Definition>> {
        let mut defs = Vec::new();
        loop {
            let name = self.expect_ident("definition name")?;
            self.expect_punct(':')?;
            let ty = self.type_ref()?;
            self.expect_punct('=')?;
            let expr = self.expr()?;
            defs.push(Definition { name, ty, expr });
            if self.eat_punct(',') {
                continue;
            }
            // Juxtaposed next definition: IDENT ':' where the name is not a
            // contract section label.
            if let TokKind::Ident(next) = self.kind() {
                let is_label = matches!(
                    next.as_str(),
                    "definition" | "precondition" | "postcondition"
                );
                if !is_label && *self.peek_kind(1) == TokKind::Punct(':') {
                    continue;
                }
            }
            return Ok(defs);
        }
    }

    /// Skips an unknown top-level section: everything up to its opening
    /// brace, then the balanced braces.
    fn skip_section(&mut self, keyword: &str) -> PResult<SkippedSection> {
        let span = self.span();
        while !self.at_punct('{') {
            if matches!(self.kind(), TokKind::Eof) {
                return Err(self.error(format!(
                    "unknown section '{}' never opens a '{{' block",
                    keyword
                )));
            }
            self.bump();
        }
        let mut depth = 0usize;
        loop {
            match self.kind() {
                TokKind::Punct('{') => depth += 1,
                TokKind::Punct('}') => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        break;
                    }
                }
                TokKind::Eof => return Err(self.error("unbalanced '{' in skipped section")),
                _ => {}
            }
            self.bump();
        }
        Ok(SkippedSection {
            keyword: keyword.to_string(),
            span,
        })
    }

    // --- expressions ---

    fn expr(&mut self) -> PResult<Expr> {
        self.implies_expr()
    }

    fn implies_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.or_expr()?;
        while self.eat_ident("implies") {
            let rhs = self.or_expr()?;
            lhs = Expr::binary(BinOp::Implies, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_ident("or") {
            let rhs = self.and_expr()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat_ident("and") {
            let rhs = self.not_expr()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_ident("not") {
            let inner = self.not_expr()?;
            return Ok(Expr::Not(Box::new(inner)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.kind() {
            TokKind::Punct('=') => Some(BinOp::Eq),
            TokKind::Ne => Some(BinOp::Ne),
            TokKind::Punct('<') => Some(BinOp::Lt),
            TokKind::Punct('>') => Some(BinOp::Gt),
            TokKind::Le => Some(BinOp::Le),
            TokKind::Ge => Some(BinOp::Ge),
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                let rhs = self.additive()?;
                Ok(Expr::binary(op, lhs, rhs))
            }
            None => Ok(lhs),
        }
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.kind() {
                TokKind::Punct('+') => BinOp::Add,
                TokKind::Punct('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        loop {
            let op = match self.kind() {
                TokKind::Punct('*') => BinOp::Mul,
                TokKind::Punct('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.postfix()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct('.') {
                let name = self.expect_ident("attribute or operation name")?;
                let at_pre = if self.at_punct('@') && *self.peek_kind(1) == TokKind::Ident("pre".into()) {
                    self.bump();
                    self.bump();
                    true
                } else {
                    false
                };
                let args = if self.eat_punct('(') {
                    Some(self.call_args()?)
                } else {
                    None
                };
                e = Expr::Dot {
                    recv: Box::new(e),
                    name,
                    at_pre,
                    args,
                };
            } else if matches!(self.kind(), TokKind::Arrow) {
                self.bump();
                let name = self.expect_ident("collection operation name")?;
                self.expect_punct('(')?;
                let args = self.arrow_args()?;
                e = Expr::Arrow {
                    recv: Box::new(e),
                    name,
                    args,
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat_punct(')') {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_punct(',') {
                continue;
            }
            self.expect_punct(')')?;
            return Ok(args);
        }
    }

    fn arrow_args(&mut self) -> PResult<ArrowArgs> {
        if self.eat_punct(')') {
            return Ok(ArrowArgs::None);
        }
        // Iterator form: IDENT [':' IDENT] '|' body
        if let TokKind::Ident(var) = self.kind().clone() {
            let has_typed_iter = *self.peek_kind(1) == TokKind::Punct(':')
                && matches!(self.peek_kind(2), TokKind::Ident(_))
                && *self.peek_kind(3) == TokKind::Punct('|');
            let has_bare_iter = *self.peek_kind(1) == TokKind::Punct('|');
            if has_typed_iter || has_bare_iter {
                self.bump();
                let ty = if has_typed_iter {
                    self.bump();
                    Some(self.expect_ident("iterator type")?)
                } else {
                    None
                };
                self.expect_punct('|')?;
                let body = self.expr()?;
                self.expect_punct(')')?;
                return Ok(ArrowArgs::Iterator {
                    var,
                    ty,
                    body: Box::new(body),
                });
            }
        }
        let exprs = self.call_args()?;
        Ok(ArrowArgs::Exprs(exprs))
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.kind().clone() {
            TokKind::Ident(s) => match s.as_str() {
                "let" => {
                    self.bump();
                    let mut bindings = vec![self.let_binding()?];
                    while self.eat_punct(',') {
                        bindings.push(self.let_binding()?);
                    }
                    if !self.eat_ident("in") {
                        return Err(self.error(format!("expected 'in', found {}", self.kind())));
                    }
                    let body = self.expr()?;
                    Ok(Expr::Let(bindings, Box::new(body)))
                }
                "if" => {
                    self.bump();
                    let cond = self.expr()?;
                    if !self.eat_ident("then") {
                        return Err(self.error(format!("expected 'then', found {}", self.kind())));
                    }
                    let then = self.expr()?;
                    if !self.eat_ident("else") {
                        return Err(self.error(format!("expected 'else', found {}", self.kind())));
                    }
                    let els = self.expr()?;
                    if !self.eat_ident("endif") {
                        return Err(self.error(format!("expected 'endif', found {}", self.kind())));
                    }
                    Ok(Expr::If(Box::new(cond), Box::new(then), Box::new(els)))
                }
                "self" => {
                    self.bump();
                    Ok(Expr::SelfLit)
                }
                "result" => {
                    self.bump();
                    Ok(Expr::ResultLit)
                }
                "true" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                _ => {
                    self.bump();
                    Ok(Expr::Ident(s))
                }
            },
            TokKind::Number(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            TokKind::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            TokKind::Punct('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(')')?;
                Ok(e)
            }
            TokKind::Punct('-') => {
                self.bump();
                let inner = self.postfix()?;
                Ok(Expr::binary(BinOp::Sub, Expr::Num(0), inner))
            }
            other => Err(self.error(format!("expected an expression, found {}", other))),
        }
    }

    fn let_binding(&mut self) -> PResult<LetBinding> {
        let name = self.expect_ident("binding name")?;
        self.expect_punct(':')?;
        let ty = self.type_ref()?;
        let init = if self.eat_punct('=') {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(LetBinding { name, ty, init })
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
