//! Recursive-descent parser for operator expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := '-'? factor factor*
//! factor := base ('^' INT)?                 ('q^-INT' allowed for q)
//! base   := INT ('/' INT)? | 'q' | IDENT | '(' expr ')'
//!         | '[' expr ',' expr ']' '_n'? | '{' expr ',' expr '}'
//!         | ('sumperm'|'sumcyc') '(' expr (',' expr)* ')'
//!         | ('phase'|'cos') '(' 'N' (('+'|'-') INT)? ')' | 'narcsin' '(' ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::expr::{DiagFn, Expr};
use super::{Alphabet, Gen};
use crate::laurent::LaurentScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Unexpected {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("at byte {offset}: undeclared generator `{name}`")]
    Undeclared { offset: usize, name: String },
    #[error("at byte {offset}: {message}")]
    Invalid { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Unexpected { offset, .. }
            | ParseError::Undeclared { offset, .. }
            | ParseError::Invalid { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    Tag,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(i) => format!("integer {i}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Tag => "`_n`".to_string(),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if c == '_' {
            if bytes.get(i + 1) == Some(&b'n') && !bytes.get(i + 2).is_some_and(|b| b.is_ascii_alphanumeric()) {
                out.push((i, Tok::Tag));
                i += 2;
            } else {
                return Err(ParseError::Unexpected {
                    offset: i,
                    expected: vec!["`_n`".into()],
                    found: "`_`".into(),
                });
            }
        } else if "+-^()[]{},/".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ParseError::Unexpected {
                offset: i,
                expected: vec!["expression".into()],
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alphabet: &'a Alphabet,
}

const FACTOR_START: &[&str] = &["integer", "`q`", "generator", "`(`", "`[`", "`{`", "`sumperm`", "`sumcyc`", "`phase`", "`cos`", "`narcsin`"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Unexpected {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&[&format!("`{c}`")])
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = Expr::add(acc, self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_) | Tok::Ident(_) | Tok::Sym('(') | Tok::Sym('[') | Tok::Sym('{')
        )
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.term()?)));
        }
        if !self.starts_factor() {
            return self.unexpected(FACTOR_START);
        }
        let mut items = vec![self.factor()?];
        while self.starts_factor() {
            items.push(self.factor()?);
        }
        Ok(Expr::product(items))
    }

    fn small_int(&mut self) -> Result<u32, ParseError> {
        let off = self.offset();
        match self.bump() {
            Tok::Int(v) => u32::try_from(v).map_err(|_| ParseError::Invalid {
                offset: off,
                message: "exponent too large".into(),
            }),
            other => Err(ParseError::Unexpected {
                offset: off,
                expected: vec!["integer".into()],
                found: other.describe(),
            }),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let is_q = matches!(self.peek(), Tok::Ident(s) if s == "q");
        let base = self.base()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        if is_q && *self.peek() == Tok::Sym('-') {
            self.bump();
            let e = self.small_int()?;
            return Ok(Expr::Scalar(LaurentScalar::q_pow(-(e as i32))));
        }
        if *self.peek() == Tok::Sym('-') {
            return Err(ParseError::Invalid {
                offset: self.offset(),
                message: "negative exponents are only allowed on q".into(),
            });
        }
        let e = self.small_int()?;
        if is_q {
            return Ok(Expr::Scalar(LaurentScalar::q_pow(e as i32)));
        }
        Ok(base.pow(e))
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_sym('(')?;
        let mut xs = vec![self.expr()?];
        while *self.peek() == Tok::Sym(',') {
            self.bump();
            xs.push(self.expr()?);
        }
        self.expect_sym(')')?;
        Ok(xs)
    }

    fn shift_arg(&mut self) -> Result<i32, ParseError> {
        self.expect_sym('(')?;
        match self.bump() {
            Tok::Ident(s) if s == "N" => {}
            other => {
                self.pos -= 1;
                let _ = other;
                return self.unexpected(&["`N`"]);
            }
        }
        let k = match self.peek() {
            Tok::Sym('+') => {
                self.bump();
                self.small_int()? as i32
            }
            Tok::Sym('-') => {
                self.bump();
                -(self.small_int()? as i32)
            }
            _ => 0,
        };
        self.expect_sym(')')?;
        Ok(k)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.bump() {
            Tok::Int(num) => {
                if *self.peek() == Tok::Sym('/') {
                    self.bump();
                    let doff = self.offset();
                    let den = match self.bump() {
                        Tok::Int(d) => d,
                        other => {
                            return Err(ParseError::Unexpected {
                                offset: doff,
                                expected: vec!["integer".into()],
                                found: other.describe(),
                            })
                        }
                    };
                    if den.is_zero() {
                        return Err(ParseError::Invalid {
                            offset: doff,
                            message: "zero denominator".into(),
                        });
                    }
                    return Ok(Expr::Scalar(LaurentScalar::from_rational(BigRational::new(num, den))));
                }
                Ok(Expr::Scalar(LaurentScalar::from_rational(BigRational::from_integer(num))))
            }
            Tok::Ident(name) => match name.as_str() {
                "q" => Ok(Expr::Scalar(LaurentScalar::q())),
                "sumperm" => Ok(Expr::SumPerm(self.args()?)),
                "sumcyc" => Ok(Expr::SumCyc(self.args()?)),
                "phase" => Ok(Expr::Func(DiagFn::Phase(self.shift_arg()?))),
                "cos" => Ok(Expr::Func(DiagFn::Cos(self.shift_arg()?))),
                "narcsin" => {
                    self.expect_sym('(')?;
                    self.expect_sym(')')?;
                    Ok(Expr::Func(DiagFn::NArcsin))
                }
                _ => match Gen::from_name(&name) {
                    Some(g) if self.alphabet.contains(g) => Ok(Expr::Gen(g)),
                    _ => Err(ParseError::Undeclared { offset: off, name }),
                },
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Sym('[') => {
                let x = self.expr()?;
                self.expect_sym(',')?;
                let y = self.expr()?;
                self.expect_sym(']')?;
                if *self.peek() == Tok::Tag {
                    self.bump();
                    Ok(Expr::bracket(x, y))
                } else {
                    Ok(Expr::comm(x, y))
                }
            }
            Tok::Sym('{') => {
                let x = self.expr()?;
                self.expect_sym(',')?;
                let y = self.expr()?;
                self.expect_sym('}')?;
                Ok(Expr::anti(x, y))
            }
            other => Err(ParseError::Unexpected {
                offset: off,
                expected: FACTOR_START.iter().map(|s| s.to_string()).collect(),
                found: other.describe(),
            }),
        }
    }
}

/// Parse with the standard alphabet.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &Alphabet::standard())
}

/// Parse, accepting only generators declared in `alphabet`.
pub fn parse_with(text: &str, alphabet: &Alphabet) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        alphabet,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.unexpected(&["`+`", "`-`", "end of input"]);
    }
    Ok(e)
}
