//! Recursive-descent parser for chart expressions.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := primary ("^" exponent)?
//! exponent := "-"? digits | "(" "-"? digits ")"
//! primary  := number | "x" digits | func "(" expr ")" | "(" expr ")"
//! func     := "exp" | "ln" | "sin" | "cos" | "sqrt"
//! number   := digits ("." digits?)? (("e" | "E") ("+" | "-")? digits)?
//! ```
//!
//! Whitespace is insignificant. `^` binds tighter than unary minus, so
//! `-x1^2` is `-(x1^2)`. Chained powers (`x1^2^3`) are rejected.

use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnknownIdentifier(String),
    CoordinateOutOfRange { index: usize, dim: usize },
    ExpectedIntegerExponent,
    ChainedPower,
    InvalidNumber(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {}", describe(.kind))]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character {c:?}"),
        ParseErrorKind::UnexpectedEnd => "unexpected end of input".into(),
        ParseErrorKind::UnknownIdentifier(s) => format!("unknown identifier {s:?}"),
        ParseErrorKind::CoordinateOutOfRange { index, dim } => {
            format!("coordinate out of range: x{index} with dimension {dim}")
        }
        ParseErrorKind::ExpectedIntegerExponent => "exponent must be an integer literal".into(),
        ParseErrorKind::ChainedPower => "chained '^' is ambiguous; add parentheses".into(),
        ParseErrorKind::InvalidNumber(s) => format!("invalid number {s:?}"),
    }
}

/// Parses `text` into an expression over coordinates `x1..x{dim}`.
pub fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error_here());
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }

    fn error_here(&self) -> ParseError {
        match self.src.get(self.pos) {
            Some(&c) => self.err(self.pos, ParseErrorKind::UnexpectedChar(c as char)),
            None => self.err(self.pos, ParseErrorKind::UnexpectedEnd),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_here())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let k = self.exponent()?;
        if self.peek() == Some(b'^') {
            return Err(self.err(self.pos, ParseErrorKind::ChainedPower));
        }
        Ok(Expr::pow(base, k))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let start = {
            self.skip_ws();
            self.pos
        };
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
            self.skip_ws();
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let integer_end = self.pos;
        if digits_start == integer_end
            || matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E'))
        {
            return Err(self.err(start, ParseErrorKind::ExpectedIntegerExponent));
        }
        let text = std::str::from_utf8(&self.src[digits_start..integer_end]).unwrap();
        let magnitude: i32 = text
            .parse()
            .map_err(|_| self.err(start, ParseErrorKind::InvalidNumber(text.into())))?;
        if parenthesized {
            self.expect(b')')?;
        }
        Ok(if negative { -magnitude } else { magnitude })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err(self.pos, ParseErrorKind::UnexpectedEnd)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error_here()),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let digits = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > digits {
                i = j;
            }
        }
        let text = std::str::from_utf8(&bytes[start..i]).unwrap();
        let value: f64 = text
            .parse()
            .map_err(|_| self.err(start, ParseErrorKind::InvalidNumber(text.into())))?;
        self.pos = i;
        Ok(Expr::constant(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(func) = Func::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::call(func, arg));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| {
                    self.err(start, ParseErrorKind::UnknownIdentifier(name.into()))
                })?;
                if index == 0 || index > self.dim {
                    return Err(self.err(
                        start,
                        ParseErrorKind::CoordinateOutOfRange {
                            index,
                            dim: self.dim,
                        },
                    ));
                }
                return Ok(Expr::var(index - 1));
            }
        }
        Err(self.err(start, ParseErrorKind::UnknownIdentifier(name.into())))
    }
}
