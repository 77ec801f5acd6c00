//! Recursive-descent parser for the function DSL.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;      division by nonzero constants only
//! factor := atom ("^" integer)? ;
//! atom   := number | coord | func "(" expr ")" | "(" expr ")" | "-" atom ;
//! coord  := "x" positive-integer ;
//! func   := "sin" | "cos" | "exp" ;
//! ```

use std::fmt;

use thiserror::Error;

use super::{Prim, SmoothExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnknownIdentifier(String),
    BadCoordinate(String),
    BadNumber(String),
    NonIntegerExponent(String),
    DivisionByNonConstant,
    DivisionByZero,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::BadCoordinate(s) => {
                write!(f, "`{s}` is not a coordinate (use x1, x2, ...)")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{s}`"),
            ParseErrorKind::NonIntegerExponent(s) => {
                write!(f, "non-integer exponent `{s}` (expected a non-negative integer)")
            }
            ParseErrorKind::DivisionByNonConstant => {
                f.write_str("division is only allowed by constant expressions")
            }
            ParseErrorKind::DivisionByZero => f.write_str("division by zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        let tok = if let Some(tok) = single {
            i += 1;
            tok
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            Tok::Number(chars[start..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::UnexpectedChar(c),
            });
        };
        column += match &tok {
            Tok::Number(s) | Tok::Ident(s) => s.chars().count(),
            _ => 1,
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(at: &Spanned, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: at.line,
            column: at.column,
            kind,
        }
    }

    fn unexpected(at: &Spanned, expected: &'static str) -> ParseError {
        Self::error_at(
            at,
            ParseErrorKind::UnexpectedToken {
                found: at.tok.describe(),
                expected,
            },
        )
    }

    fn expr(&mut self) -> Result<SmoothExpr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(SmoothExpr::scale(-1.0, self.term()?));
                }
                _ => break,
            }
        }
        Ok(SmoothExpr::add(terms))
    }

    fn term(&mut self) -> Result<SmoothExpr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Tok::Slash => {
                    let at = self.bump();
                    match self.factor()? {
                        SmoothExpr::Const(0.0) => {
                            return Err(Self::error_at(&at, ParseErrorKind::DivisionByZero))
                        }
                        SmoothExpr::Const(c) => factors.push(SmoothExpr::Const(1.0 / c)),
                        _ => {
                            return Err(Self::error_at(
                                &at,
                                ParseErrorKind::DivisionByNonConstant,
                            ))
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(SmoothExpr::mul(factors))
    }

    fn factor(&mut self) -> Result<SmoothExpr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.bump();
        match &at.tok {
            Tok::Number(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                let p: u32 = s.parse().map_err(|_| {
                    Self::error_at(&at, ParseErrorKind::NonIntegerExponent(s.clone()))
                })?;
                Ok(SmoothExpr::pow(base, p))
            }
            Tok::Number(s) => Err(Self::error_at(
                &at,
                ParseErrorKind::NonIntegerExponent(s.clone()),
            )),
            Tok::LParen | Tok::Minus | Tok::Ident(_) => Err(Self::error_at(
                &at,
                ParseErrorKind::NonIntegerExponent(at.tok.describe()),
            )),
            _ => Err(Self::unexpected(&at, "an integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<SmoothExpr, ParseError> {
        let at = self.bump();
        match &at.tok {
            Tok::Number(s) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(SmoothExpr::Const(v)),
                _ => Err(Self::error_at(&at, ParseErrorKind::BadNumber(s.clone()))),
            },
            Tok::Minus => Ok(SmoothExpr::scale(-1.0, self.atom()?)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Ok(prim) = name.parse::<Prim>() {
                    let open = self.bump();
                    if open.tok != Tok::LParen {
                        return Err(Self::unexpected(&open, "`(` after function name"));
                    }
                    let arg = self.expr()?;
                    self.expect_close()?;
                    return Ok(SmoothExpr::prim(prim, arg));
                }
                if let Some(digits) = name.strip_prefix('x') {
                    if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                        return match digits.parse::<usize>() {
                            Ok(k) if k >= 1 => Ok(SmoothExpr::Coord(k)),
                            _ => Err(Self::error_at(
                                &at,
                                ParseErrorKind::BadCoordinate(name.clone()),
                            )),
                        };
                    }
                }
                Err(Self::error_at(
                    &at,
                    ParseErrorKind::UnknownIdentifier(name.clone()),
                ))
            }
            _ => Err(Self::unexpected(&at, "a number, coordinate, function or `(`")),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        let at = self.bump();
        if at.tok == Tok::RParen {
            Ok(())
        } else {
            Err(Self::unexpected(&at, "`)`"))
        }
    }
}

/// Parses DSL text into a [`SmoothExpr`].
pub fn parse(text: &str) -> Result<SmoothExpr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    let end = p.peek().clone();
    if end.tok != Tok::End {
        return Err(Parser::unexpected(&end, "an operator or end of input"));
    }
    Ok(e)
}
