//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | IDENT | '(' expr ')'
//! ```
//!
//! Division is only allowed by a nonzero constant, so `p/q` literals and
//! `x/3` both work. Decimal literals and implicit multiplication are
//! rejected.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::MPoly;
use crate::{Error, Result, Q};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'e' || bytes[i] == b'E') {
                    return Err(Error::Syntax {
                        offset: i,
                        message: "decimal literals are not allowed; write p/q".into(),
                    });
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            '.' => {
                return Err(Error::Syntax {
                    offset: i,
                    message: "decimal literals are not allowed; write p/q".into(),
                })
            }
            other => {
                return Err(Error::Syntax {
                    offset: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let d = self.unary()?;
                    if d.total_degree() > 0 {
                        return Err(Error::Syntax {
                            offset: at,
                            message: "division is only allowed by a constant".into(),
                        });
                    }
                    let c = d.constant_term();
                    if c.is_zero() {
                        return Err(Error::Syntax {
                            offset: at,
                            message: "division by zero".into(),
                        });
                    }
                    acc = acc.scale(&(Q::from_integer(1.into()) / c));
                }
                Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    return Err(Error::Syntax {
                        offset: self.offset(),
                        message: "implicit multiplication is not allowed; use `*`".into(),
                    })
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Int(n), _)) => {
                self.pos += 1;
                let e: u32 = n.try_into().map_err(|_| Error::BadExponent {
                    offset: at,
                    message: "exponent too large".into(),
                })?;
                Ok(base.pow(e))
            }
            Some((Tok::Minus, _)) => Err(Error::BadExponent {
                offset: at,
                message: "negative exponents are not allowed".into(),
            }),
            _ => Err(Error::BadExponent {
                offset: at,
                message: "exponent must be a nonnegative integer literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<MPoly> {
        let at = self.offset();
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Int(n), _)) => {
                self.pos += 1;
                Ok(MPoly::constant(self.nvars(), Q::from_integer(n)))
            }
            Some((Tok::Ident(name), _)) => {
                self.pos += 1;
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(Error::UnknownVariable { name, offset: at })?;
                Ok(MPoly::var(self.nvars(), i))
            }
            Some((Tok::LParen, _)) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(Error::Syntax {
                        offset: self.offset(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(_) => Err(Error::Syntax {
                offset: at,
                message: "expected a number, variable or `(`".into(),
            }),
            None => Err(Error::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses `text` as a polynomial in the named variables.
pub fn parse_polynomial(text: &str, variables: &[String]) -> Result<MPoly> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        vars: variables,
    };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "unexpected token".into(),
        });
    }
    Ok(poly)
}
