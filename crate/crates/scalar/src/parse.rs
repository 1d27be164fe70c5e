//! Text grammar for scalars:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := ("-" | "+") factor | base ("^" uint)?
//! base   := uint | coordinate | "(" expr ")"
//! ```
//!
//! A rational literal `a/b` is read as the division of two integers.

use num_bigint::BigInt;

use crate::error::ScalarError;
use crate::rational::Rational;
use crate::scalar::Scalar;

const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(usize, Tok)>, ScalarError> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: BigInt = lx.src[start..i].parse().expect("digits");
                lx.toks.push((start, Tok::Int(v)));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((start, Tok::Ident(lx.src[start..i].to_string())));
            } else if "+-*/^()".contains(c) {
                lx.toks.push((i, Tok::Sym(c)));
                i += 1;
            } else {
                return Err(ScalarError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
        lx.toks.push((src.len(), Tok::End));
        Ok(lx.toks)
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ScalarError> {
        Err(ScalarError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                return Ok(-self.factor()?);
            }
            Tok::Sym('+') => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        if self.peek() == &Tok::Sym('^') {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Tok::Int(e) => {
                    let e: u32 = e
                        .try_into()
                        .ok()
                        .filter(|&e| e <= MAX_EXPONENT)
                        .ok_or_else(|| ScalarError::Syntax {
                            pos,
                            msg: "exponent too large".into(),
                        })?;
                    Ok(base.pow(e))
                }
                _ => Err(ScalarError::Syntax {
                    pos,
                    msg: "expected unsigned integer exponent".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Scalar, ScalarError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(Scalar::from_rational(Rational::from_bigint(v))),
            Tok::Ident(name) => match self.coords.iter().position(|c| *c == name) {
                Some(i) => Ok(Scalar::var(i)),
                None => Err(ScalarError::UnknownCoordinate { pos, name }),
            },
            Tok::Sym('(') => {
                let inner = self.expr()?;
                if self.peek() != &Tok::Sym(')') {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(ScalarError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Tok::Sym(c) => Err(ScalarError::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }
}

/// Parses `text` over a chart whose coordinates are named by `coords`.
pub fn parse_scalar(text: &str, coords: &[String]) -> Result<Scalar, ScalarError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        coords,
    };
    let s = p.expr()?;
    if p.peek() != &Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(s)
}
