//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' UINT)?
//! atom   := UINT | IDENT | '(' expr ')'
//! IDENT  := [a-zA-Z_][a-zA-Z0-9_]*
//! ```

use num_bigint::BigInt;

use super::{IntPoly, PolySystem, Vars};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
                self.bump();
            }
            let (line, column) = (self.line, self.column);
            let Some(&c) = self.chars.peek() else {
                out.push(Spanned {
                    tok: Tok::End,
                    line,
                    column,
                });
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                Tok::Int(s.parse().expect("digits"))
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                Tok::Ident(s)
            } else {
                self.bump();
                match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => {
                        return Err(Error::Parse {
                            line,
                            column,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                }
            };
            out.push(Spanned { tok, line, column });
        }
    }
}

struct Parser<'v> {
    toks: Vec<Spanned>,
    pos: usize,
    vars: &'v Vars,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<IntPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<IntPoly> {
        let mut acc = self.unary()?;
        while self.peek().tok == Tok::Star {
            self.advance();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<IntPoly> {
        match self.peek().tok {
            Tok::Minus => {
                self.advance();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<IntPoly> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.advance();
        match self.peek().tok.clone() {
            Tok::Int(e) => {
                let e: u32 = match e.try_into() {
                    Ok(e) if e <= 10_000 => e,
                    _ => return self.err("exponent too large"),
                };
                self.advance();
                if self.peek().tok == Tok::Caret {
                    return self.err("chained exponents need parentheses");
                }
                Ok(base.pow(e))
            }
            _ => self.err("exponent must be a nonnegative integer literal"),
        }
    }

    fn atom(&mut self) -> Result<IntPoly> {
        match self.peek().tok.clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(IntPoly::constant(self.vars.clone(), v))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.advance();
                    Ok(IntPoly::var(self.vars.clone(), i))
                }
                None => self.err(format!("unknown variable `{name}`")),
            },
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.advance();
                Ok(inner)
            }
            Tok::End => self.err("unexpected end of expression"),
            _ => self.err("expected a number, variable or `(`"),
        }
    }
}

/// Parses one polynomial over `vars`.
pub fn parse_poly(vars: &Vars, src: &str) -> Result<IntPoly> {
    let toks = Lexer::new(src).tokens()?;
    let mut parser = Parser {
        toks,
        pos: 0,
        vars,
    };
    let p = parser.expr()?;
    if parser.peek().tok != Tok::End {
        return parser.err("trailing input");
    }
    Ok(p)
}

/// Parses a list of polynomials. Errors carry the failing polynomial's
/// position as the line number.
pub fn parse_system<S: AsRef<str>>(vars: &Vars, srcs: &[S]) -> Result<PolySystem> {
    for (i, v) in vars.iter().enumerate() {
        let valid = v
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::invalid(format!("invalid variable name `{v}`")));
        }
        if vars[..i].contains(v) {
            return Err(Error::invalid(format!("duplicate variable `{v}`")));
        }
    }
    let polys = srcs
        .iter()
        .enumerate()
        .map(|(k, s)| {
            parse_poly(vars, s.as_ref()).map_err(|e| match e {
                Error::Parse { column, message, .. } => Error::Parse {
                    line: k + 1,
                    column,
                    message,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(vars.clone(), polys)
}
