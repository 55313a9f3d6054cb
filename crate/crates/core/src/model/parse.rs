//! Recursive-descent parser for beta expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right. The
//! exponent must be a constant integer expression and is folded here.

use std::fmt;

use super::expr::{Expr, Func};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    Arity { name: String, expected: usize, got: usize },
    Exponent(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::Arity { name, expected, got } => {
                write!(f, "`{name}` takes {expected} argument(s), got {got}")
            }
            ParseErrorKind::Exponent(msg) => write!(f, "bad exponent: {msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let tok = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax(format!("malformed number `{lit}`")),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let c = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError { offset: start, kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")) });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    params: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), kind: ParseErrorKind::Syntax(msg.into()) })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?;
        let bad = |msg: String| ParseError { offset: at, kind: ParseErrorKind::Exponent(msg) };
        if exponent.max_param().is_some() {
            return Err(bad("exponent must not depend on parameters".into()));
        }
        let v = exponent.eval(&[]).map_err(|e| bad(e.to_string()))?;
        if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
            return Err(bad(format!("exponent {v} is not an integer")));
        }
        Ok(Expr::Pow(Box::new(base), v as i32))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                let is_call = *self.peek() == Tok::LParen;
                if let Some(func) = Func::from_name(&name) {
                    if !is_call {
                        return Err(ParseError {
                            offset: at,
                            kind: ParseErrorKind::Arity { name, expected: 1, got: 0 },
                        });
                    }
                    let args = self.call_args()?;
                    let got = args.len();
                    let mut args = args.into_iter();
                    match (args.next(), got) {
                        (Some(arg), 1) => Ok(Expr::Call(func, Box::new(arg))),
                        _ => Err(ParseError { offset: at, kind: ParseErrorKind::Arity { name, expected: 1, got } }),
                    }
                } else if let Some(k) = self.params.iter().position(|p| *p == name) {
                    if is_call {
                        let got = self.call_args()?.len();
                        return Err(ParseError { offset: at, kind: ParseErrorKind::Arity { name, expected: 0, got } });
                    }
                    Ok(Expr::Param(k))
                } else {
                    Err(ParseError { offset: at, kind: ParseErrorKind::UnknownIdentifier(name) })
                }
            }
            Tok::End => {
                self.pos = self.toks.len() - 1;
                self.syntax("unexpected end of input")
            }
            other => {
                self.pos -= 1;
                self.syntax(format!("unexpected token {other:?}"))
            }
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.bump(); // (
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return self.syntax("expected `,` or `)`"),
            }
        }
    }
}

/// Parses `text` with identifiers resolved against `params` (0-based).
pub fn parse_expression(text: &str, params: &[String]) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::Syntax("empty expression".into()) });
    }
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, params };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax(format!("trailing input {:?}", p.peek()));
    }
    Ok(e)
}
