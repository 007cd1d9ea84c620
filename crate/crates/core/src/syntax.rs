//! Textual form of type expressions and the `name: type` fixture format.
//!
//! The grammar, in loose EBNF (whitespace free between tokens):
//!
//! ```text
//! type     := postfix ('/' pred (',' pred)*)*
//! postfix  := atom ('^' (NUMBER | '*' | IDENT))*
//! atom     := '[' type ';' type ']'
//!           | '<' type (',' type)* '>'
//!           | '(' type (',' type)* ')'          -- 1 item: grouping
//!           | 'Void' | IDENT
//! pred     := IDENT '<:' IDENT
//!           | vars 'notin' '{' tuple (',' tuple)* '}'
//! vars     := IDENT | '(' IDENT (',' IDENT)* ')'
//! tuple    := IDENT | '(' IDENT (',' IDENT)* ')'
//! ```
//!
//! Identifiers starting with an uppercase letter are concrete types, the
//! rest are variables. Printing (the `Display` impl on [`TypeExpr`]) and
//! parsing round-trip on normalized types.

use crate::types::{ListLen, Predicate, TypeExpr};
use std::fmt;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    /// Error inside a single type expression, with a character offset.
    Type { offset: usize, message: String },
    /// Error in a fixture file, with a 1-based line number.
    Fixture { line: usize, message: String },
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::Type { offset, message } => {
                write!(f, "type syntax error at offset {}: {}", offset, message)
            }
            SyntaxError::Fixture { line, message } => write!(f, "line {}: {}", line, message),
        }
    }
}

impl std::error::Error for SyntaxError {}

// ---------------------------------------------------------------------------
// Scanner
// ---------------------------------------------------------------------------

struct Scanner {
    chars: Vec<char>,
    pos: usize,
}

impl Scanner {
    fn new(src: &str) -> Scanner {
        Scanner {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Type {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c)))
        }
    }

    /// Consumes `<:` if present (must not treat a lone `<` as one).
    fn eat_subtype_op(&mut self) -> bool {
        if self.peek() == Some('<') && self.chars.get(self.pos + 1) == Some(&':') {
            self.pos += 2;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        if let Some(&c) = self.chars.get(self.pos) {
            if c.is_alphabetic() || c == '_' {
                self.pos += 1;
                while let Some(&c) = self.chars.get(self.pos) {
                    if c.is_alphanumeric() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                return Ok(self.chars[start..self.pos].iter().collect());
            }
        }
        Err(self.error("expected identifier"))
    }

    fn number(&mut self) -> Result<u32, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| self.error(format!("length {} out of range", text)))
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    // --- types ---

    fn parse_type(&mut self) -> Result<TypeExpr, SyntaxError> {
        let mut t = self.parse_postfix()?;
        while self.eat('/') {
            let preds = self.parse_pred_list()?;
            let pred = if preds.len() == 1 {
                preds.into_iter().next().unwrap()
            } else {
                Predicate::All(preds)
            };
            t = TypeExpr::Constrained(Box::new(t), pred);
        }
        Ok(t)
    }

    fn parse_postfix(&mut self) -> Result<TypeExpr, SyntaxError> {
        let mut t = self.parse_atom()?;
        while self.eat('^') {
            let len = if self.eat('*') {
                ListLen::Star
            } else if self.peek().map_or(false, |c| c.is_ascii_digit()) {
                ListLen::Fixed(self.number()?)
            } else {
                ListLen::Var(self.ident()?)
            };
            t = TypeExpr::List(Box::new(t), len);
        }
        Ok(t)
    }

    fn parse_atom(&mut self) -> Result<TypeExpr, SyntaxError> {
        match self.peek() {
            Some('[') => {
                self.expect('[')?;
                let recv = self.parse_type()?;
                self.expect(';')?;
                let yld = self.parse_type()?;
                self.expect(']')?;
                Ok(TypeExpr::Coroutine(Box::new(recv), Box::new(yld)))
            }
            Some('<') => {
                self.expect('<')?;
                let mut items = vec![self.parse_type()?];
                while self.eat(',') {
                    items.push(self.parse_type()?);
                }
                self.expect('>')?;
                Ok(TypeExpr::Sequence(items))
            }
            Some('(') => {
                self.expect('(')?;
                let mut items = vec![self.parse_type()?];
                while self.eat(',') {
                    items.push(self.parse_type()?);
                }
                self.expect(')')?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(TypeExpr::Product(items))
                }
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.ident()?;
                if name == "Void" {
                    Ok(TypeExpr::Void)
                } else if name.chars().next().unwrap().is_uppercase() {
                    Ok(TypeExpr::Concrete(name))
                } else {
                    Ok(TypeExpr::Variable(name))
                }
            }
            Some(c) => Err(self.error(format!("unexpected character '{}'", c))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    // --- predicates ---

    /// One or more comma-separated predicates. A comma only continues the
    /// list when what follows actually parses as a predicate, so list
    /// contexts like `<a / p, b>` keep their own commas.
    fn parse_pred_list(&mut self) -> Result<Vec<Predicate>, SyntaxError> {
        let mut preds = vec![self.parse_pred()?];
        loop {
            let save = self.pos;
            if !self.eat(',') {
                break;
            }
            match self.parse_pred() {
                Ok(p) => preds.push(p),
                Err(_) => {
                    self.pos = save;
                    break;
                }
            }
        }
        Ok(preds)
    }

    fn parse_pred(&mut self) -> Result<Predicate, SyntaxError> {
        let vars = if self.eat('(') {
            let mut vars = vec![self.ident()?];
            while self.eat(',') {
                vars.push(self.ident()?);
            }
            self.expect(')')?;
            vars
        } else {
            vec![self.ident()?]
        };
        if vars.len() == 1 && self.eat_subtype_op() {
            return Ok(Predicate::SubtypeOf {
                var: vars.into_iter().next().unwrap(),
                upper: self.ident()?,
            });
        }
        let kw_pos = self.pos;
        let kw = self.ident()?;
        if kw != "notin" {
            return Err(SyntaxError::Type {
                offset: kw_pos,
                message: format!("expected 'notin' or '<:', found '{}'", kw),
            });
        }
        self.expect('{')?;
        let mut excluded = vec![self.parse_tuple()?];
        while self.eat(',') {
            excluded.push(self.parse_tuple()?);
        }
        self.expect('}')?;
        Ok(Predicate::NotInSet { vars, excluded })
    }

    fn parse_tuple(&mut self) -> Result<Vec<String>, SyntaxError> {
        if self.eat('(') {
            let mut names = vec![self.ident()?];
            while self.eat(',') {
                names.push(self.ident()?);
            }
            self.expect(')')?;
            Ok(names)
        } else {
            Ok(vec![self.ident()?])
        }
    }
}

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

/// Parses a single type expression. The whole input must be consumed.
pub fn parse_type_str(src: &str) -> Result<TypeExpr, SyntaxError> {
    let mut s = Scanner::new(src);
    let t = s.parse_type()?;
    if !s.at_end() {
        return Err(s.error("trailing input after type"));
    }
    Ok(t)
}

/// Parses a fixture: one `name: type` entry per line. Blank lines and
/// `#` comments are skipped. Names must be unique identifiers.
pub fn parse_fixture_str(src: &str) -> Result<Vec<(String, TypeExpr)>, SyntaxError> {
    let mut out: Vec<(String, TypeExpr)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let colon = line.find(':').ok_or_else(|| SyntaxError::Fixture {
            line: lineno,
            message: "expected 'name: type'".to_string(),
        })?;
        let name = line[..colon].trim();
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_')
            || name.chars().next().unwrap().is_numeric()
        {
            return Err(SyntaxError::Fixture {
                line: lineno,
                message: format!("invalid coroutine name '{}'", name),
            });
        }
        if out.iter().any(|(n, _)| n == name) {
            return Err(SyntaxError::Fixture {
                line: lineno,
                message: format!("duplicate coroutine name '{}'", name),
            });
        }
        let ty = parse_type_str(&line[colon + 1..]).map_err(|e| {
            let msg = match e {
                SyntaxError::Type { message, .. } => message,
                SyntaxError::Fixture { message, .. } => message,
            };
            SyntaxError::Fixture {
                line: lineno,
                message: msg,
            }
        })?;
        out.push((name.to_string(), ty));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::normalize;

    fn roundtrip(src: &str) {
        let t = parse_type_str(src).unwrap_or_else(|e| panic!("parse {:?}: {}", src, e));
        assert_eq!(t.to_string(), src, "print of parse should equal input");
        let again = parse_type_str(&t.to_string()).unwrap();
        assert_eq!(again, t);
    }

    // --- canonical printing round-trips ---

    #[test]
    fn roundtrip_plain_coroutines() {
        roundtrip("[Store; <Store, CurrentStore>]");
        roundtrip("[<CashDesk, CurrentStore>; <CashDesk, CurrentStore, CurrentCashDesk>]");
        roundtrip("[CurrentSale; CashPayment]");
        roundtrip("[Void; Store]");
        roundtrip("[Item; Void]");
    }

    #[test]
    fn roundtrip_composed_type() {
        roundtrip(
            "[Void; <CurrentStore, CurrentCashDesk, Sale, CashPayment, SalesLineItem, CurrentSaleLine>]",
        );
    }

    #[test]
    fn roundtrip_products_and_constraints() {
        roundtrip("[(Child, John, Sue); Void]");
        roundtrip("[(Child, x, y); No] / (x, y) notin {(John, Sue), (Jane, Sue)}");
        roundtrip("[(Male, x); No] / x notin {John, Sam, George}");
        roundtrip("[x; <(Parent, x, Jane), (Male, x), Yes>]");
        roundtrip("[x; A] / x <: User");
    }

    #[test]
    fn roundtrip_lists() {
        roundtrip("Int^5");
        roundtrip("Int^*");
        roundtrip("Int^n");
        roundtrip("(Coin, Note)^*");
        roundtrip("[Int^3; <Done, Int>]");
    }

    #[test]
    fn roundtrip_constrained_inside_sequence_needs_parens() {
        let t = parse_type_str("<([x; A] / x <: User), B>").unwrap();
        assert_eq!(t.to_string(), "<([x; A] / x <: User), B>");
    }

    // --- parser details ---

    #[test]
    fn grouping_parens_are_transparent() {
        assert_eq!(
            parse_type_str("(Store)").unwrap(),
            parse_type_str("Store").unwrap()
        );
    }

    #[test]
    fn multiple_predicates_after_one_slash() {
        let t = parse_type_str("[x; y] / x <: User, y <: Item").unwrap();
        match t {
            TypeExpr::Constrained(_, Predicate::All(ps)) => assert_eq!(ps.len(), 2),
            other => panic!("expected All constraint, got {:?}", other),
        }
    }

    #[test]
    fn case_determines_variable_or_concrete() {
        assert_eq!(parse_type_str("store").unwrap(), TypeExpr::variable("store"));
        assert_eq!(parse_type_str("Store").unwrap(), TypeExpr::concrete("Store"));
        assert_eq!(parse_type_str("Void").unwrap(), TypeExpr::Void);
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(parse_type_str("").is_err());
        assert!(parse_type_str("[A; B").is_err());
        assert!(parse_type_str("A B").is_err());
        assert!(parse_type_str("<A,>").is_err());
        assert!(parse_type_str("[x; y] / x ~ y").is_err());
        assert!(parse_type_str("Int^").is_err());
    }

    #[test]
    fn parse_normalizes_nothing() {
        // The parser is faithful; normalization is the caller's choice.
        let t = parse_type_str("<A>").unwrap();
        assert_eq!(t, TypeExpr::Sequence(vec![TypeExpr::concrete("A")]));
        assert_eq!(normalize(&t), TypeExpr::concrete("A"));
    }

    // --- fixture format ---

    #[test]
    fn fixture_parses_names_comments_blanks() {
        let src = "\n# facts\nchild1: [(Child, John, Sue); Void]\n\nanswer: [Void; Sam] # trailing\n";
        let entries = parse_fixture_str(src).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].0, "child1");
        assert_eq!(entries[1].0, "answer");
        assert_eq!(entries[1].1.to_string(), "[Void; Sam]");
    }

    #[test]
    fn fixture_rejects_duplicates_and_bad_lines() {
        assert!(parse_fixture_str("a: A\na: B\n").is_err());
        assert!(parse_fixture_str("just some text\n").is_err());
        assert!(parse_fixture_str("9name: A\n").is_err());
        let err = parse_fixture_str("ok: A\nbad: [A;\n").unwrap_err();
        match err {
            SyntaxError::Fixture { line, .. } => assert_eq!(line, 2),
            other => panic!("expected fixture error, got {:?}", other),
        }
    }
}
