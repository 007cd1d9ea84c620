//! Tokenizer for requirement model sources. Tracks 1-based line and column
//! positions; `//` comments run to end of line.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Ident(String),
    Number(i64),
    Str(String),
    /// Single-character punctuation or operator.
    Punct(char),
    /// `->`
    Arrow,
    /// `::`
    ColonColon,
    /// `<=`
    Le,
    /// `>=`
    Ge,
    /// `<>`
    Ne,
    Eof,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Ident(s) => write!(f, "'{}'", s),
            TokKind::Number(n) => write!(f, "'{}'", n),
            TokKind::Str(_) => write!(f, "string literal"),
            TokKind::Punct(c) => write!(f, "'{}'", c),
            TokKind::Arrow => write!(f, "'->'"),
            TokKind::ColonColon => write!(f, "'::'"),
            TokKind::Le => write!(f, "'<='"),
            TokKind::Ge => write!(f, "'>='"),
            TokKind::Ne => write!(f, "'<>'"),
            TokKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for LexError {}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            out.push(Token {
                kind: TokKind::Ident(chars[start..i].iter().collect()),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse().map_err(|_| LexError {
                line: tline,
                col: tcol,
                message: format!("number {} out of range", text),
            })?;
            out.push(Token {
                kind: TokKind::Number(value),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c == '"' {
            bump!();
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump!();
            }
            if chars.get(i) != Some(&'"') {
                return Err(LexError {
                    line: tline,
                    col: tcol,
                    message: "unterminated string literal".to_string(),
                });
            }
            let text: String = chars[start..i].iter().collect();
            bump!();
            out.push(Token {
                kind: TokKind::Str(text),
                line: tline,
                col: tcol,
            });
            continue;
        }
        let two = |kind: TokKind| Token {
            kind,
            line: tline,
            col: tcol,
        };
        match c {
            '-' if chars.get(i + 1) == Some(&'>') => {
                bump!();
                bump!();
                out.push(two(TokKind::Arrow));
            }
            ':' if chars.get(i + 1) == Some(&':') => {
                bump!();
                bump!();
                out.push(two(TokKind::ColonColon));
            }
            '<' if chars.get(i + 1) == Some(&'=') => {
                bump!();
                bump!();
                out.push(two(TokKind::Le));
            }
            '<' if chars.get(i + 1) == Some(&'>') => {
                bump!();
                bump!();
                out.push(two(TokKind::Ne));
            }
            '>' if chars.get(i + 1) == Some(&'=') => {
                bump!();
                bump!();
                out.push(two(TokKind::Ge));
            }
            '(' | ')' | '{' | '}' | '[' | ']' | ',' | ';' | ':' | '.' | '|' | '=' | '<' | '>'
            | '+' | '-' | '*' | '/' | '@' => {
                bump!();
                out.push(two(TokKind::Punct(c)));
            }
            other => {
                return Err(LexError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character '{}'", other),
                });
            }
        }
    }
    out.push(Token {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
