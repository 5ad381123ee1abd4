//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := ('+' | '-') factor | base ('^' uint)?
//! base     := rational | var | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```
//!
//! Multiplication must be written out; `2x1` and `x1 x2` are rejected.

use num_bigint::BigInt;
use num_traits::Zero;
use std::str::FromStr;

use super::Polynomial;
use crate::rational::Rational;

/// Largest accepted exponent literal.
pub const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown variable `{name}`")]
    UnknownVariable { line: usize, column: usize, name: String },
    #[error("{line}:{column}: exponent `{text}` is too large (max {MAX_EXPONENT})")]
    ExponentOverflow { line: usize, column: usize, text: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start_line, start_col) = (line, col);
        if ch.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push(Token { tok: Tok::Num(s), line: start_line, column: start_col });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: start_line, column: start_col });
        } else if "+-*/^()".contains(ch) {
            out.push(Token { tok: Tok::Sym(ch), line: start_line, column: start_col });
            i += 1;
            col += 1;
        } else {
            return Err(ParseError::Syntax {
                line,
                column: col,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, tok: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: tok.line, column: tok.column, message: message.into() }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym('+') => {
                    self.next();
                    acc = &acc + &self.term()?;
                }
                Tok::Sym('-') => {
                    self.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Sym('*') => {
                    self.next();
                    acc = &acc * &self.factor()?;
                }
                Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(') => {
                    let t = self.peek().clone();
                    return Err(self.syntax(&t, "implicit multiplication; write `*` explicitly"));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek().tok {
            Tok::Sym('-') => {
                self.next();
                return Ok(-self.factor()?);
            }
            Tok::Sym('+') => {
                self.next();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        if self.peek().tok == Tok::Sym('^') {
            self.next();
            let t = self.next();
            let Tok::Num(text) = &t.tok else {
                return Err(self.syntax(&t, "expected a non-negative integer exponent"));
            };
            let e: u32 = match text.parse::<u32>() {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => {
                    return Err(ParseError::ExponentOverflow {
                        line: t.line,
                        column: t.column,
                        text: text.clone(),
                    })
                }
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.vars.len();
        let t = self.next();
        match &t.tok {
            Tok::Num(num) => {
                let numer = BigInt::from_str(num).expect("digits");
                if self.peek().tok == Tok::Sym('/') {
                    self.next();
                    let dt = self.next();
                    let Tok::Num(den) = &dt.tok else {
                        return Err(self.syntax(&dt, "expected a denominator after `/`"));
                    };
                    let den = BigInt::from_str(den).expect("digits");
                    if den.is_zero() {
                        return Err(self.syntax(&dt, "zero denominator"));
                    }
                    Ok(Polynomial::constant(n, Rational::new(numer, den)))
                } else {
                    Ok(Polynomial::constant(n, Rational::from_integer(numer)))
                }
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| v == name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => Err(ParseError::UnknownVariable { line: t.line, column: t.column, name: name.clone() }),
            },
            Tok::Sym('(') => {
                let inner = self.expr()?;
                let close = self.next();
                if close.tok != Tok::Sym(')') {
                    return Err(self.syntax(&close, "expected `)`"));
                }
                Ok(inner)
            }
            Tok::End => Err(self.syntax(&t, "unexpected end of input")),
            Tok::Sym(c) => Err(self.syntax(&t, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses `text` over the ordered variable list `vars`.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0, vars };
    let p = parser.expr()?;
    let t = parser.peek().clone();
    if t.tok != Tok::End {
        return Err(parser.syntax(&t, "trailing input"));
    }
    Ok(p)
}
