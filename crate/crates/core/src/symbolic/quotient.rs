//! Normal ordering in the algebra generated by `a†`, `b`, `N` subject to
//! `b a† = q a† b + 1`, `N a† = a† (N + 1)`, `N b = b (N − 1)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::expr::Expr;
use super::free::{expand_free, ExpandError};
use super::Gen;
use crate::laurent::LaurentScalar;
use crate::matrix::CMatrix;
use crate::rep::GentileRep;

/// `(a†)^j b^k N^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormalWord {
    pub j: u32,
    pub k: u32,
    pub m: u32,
}

impl NormalWord {
    pub const UNIT: NormalWord = NormalWord { j: 0, k: 0, m: 0 };

    fn len(&self) -> u32 {
        self.j + self.k + self.m
    }

    pub fn gens(&self) -> Vec<Gen> {
        let mut out = vec![Gen::Adag; self.j as usize];
        out.extend(std::iter::repeat(Gen::B).take(self.k as usize));
        out.extend(std::iter::repeat(Gen::N).take(self.m as usize));
        out
    }
}

impl Ord for NormalWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| other.j.cmp(&self.j))
            .then_with(|| other.k.cmp(&self.k))
            .then_with(|| other.m.cmp(&self.m))
    }
}

impl PartialOrd for NormalWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn power_str(name: &str, e: u32) -> Option<String> {
    match e {
        0 => None,
        1 => Some(name.to_string()),
        e => Some(format!("{name}^{e}")),
    }
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            power_str("adag", self.j),
            power_str("b", self.k),
            power_str("N", self.m),
        ]
        .into_iter()
        .flatten()
        .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuotientPoly {
    terms: BTreeMap<NormalWord, LaurentScalar>,
}

fn binomial(m: u32, i: u32) -> BigRational {
    let mut acc = BigInt::from(1);
    for t in 0..i {
        acc = acc * BigInt::from(m - t) / BigInt::from(t + 1);
    }
    BigRational::from_integer(acc)
}

impl QuotientPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut p = Self::zero();
        p.add_term(NormalWord::UNIT, LaurentScalar::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalWord, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: NormalWord) -> LaurentScalar {
        self.terms.get(&w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: NormalWord, c: LaurentScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &QuotientPoly) -> QuotientPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &LaurentScalar) -> QuotientPoly {
        let mut out = QuotientPoly::zero();
        for (w, d) in &self.terms {
            out.add_term(*w, d * c);
        }
        out
    }

    /// Right-multiply by one generator and reduce.
    pub fn times_gen(&self, g: Gen) -> QuotientPoly {
        let mut out = QuotientPoly::zero();
        for (w, c) in &self.terms {
            match g {
                Gen::N => out.add_term(NormalWord { m: w.m + 1, ..*w }, c.clone()),
                Gen::B => {
                    // N^m b = b (N − 1)^m
                    shifted_n_powers(&mut out, NormalWord { k: w.k + 1, ..*w }, c, -1);
                }
                Gen::Adag => {
                    // b^k a† = q^k a† b^k + [k]_q b^{k−1};  N^m a† = a† (N + 1)^m
                    let lead = c * &LaurentScalar::q_pow(w.k as i32);
                    shifted_n_powers(&mut out, NormalWord { j: w.j + 1, ..*w }, &lead, 1);
                    if w.k > 0 {
                        let tail = c * &LaurentScalar::q_integer(w.k);
                        shifted_n_powers(&mut out, NormalWord { k: w.k - 1, ..*w }, &tail, 1);
                    }
                }
                other => unreachable!("generator {other} outside the rewriter alphabet"),
            }
        }
        out
    }

    pub fn mul(&self, other: &QuotientPoly) -> QuotientPoly {
        let mut out = QuotientPoly::zero();
        for (w, c) in &other.terms {
            let mut part = self.clone();
            for g in w.gens() {
                part = part.times_gen(g);
            }
            out = out.add(&part.scale(c));
        }
        out
    }

    /// Evaluate in the representation with `q = e^{i2π/(n+1)}`.
    pub fn eval(&self, rep: &GentileRep) -> CMatrix {
        let dim = rep.dim();
        let mut acc = CMatrix::zeros(dim);
        for (w, c) in &self.terms {
            let m = &(&rep.a_dag.pow(w.j) * &rep.b.pow(w.k)) * &rep.num.pow(w.m);
            acc = &acc + &m.scale(c.eval(rep.n));
        }
        acc
    }

    pub fn digest(&self) -> String {
        match self.terms.iter().next() {
            None => "0".to_string(),
            Some((w, c)) => format!("{} terms; lowest ({c}) {w}", self.terms.len()),
        }
    }
}

/// Add `c · (a†)^j b^k (N + s)^m` for `w = (j, k, m)`.
fn shifted_n_powers(out: &mut QuotientPoly, w: NormalWord, c: &LaurentScalar, s: i64) {
    for i in 0..=w.m {
        // C(m, i) s^{m−i} N^i
        let mut coef = binomial(w.m, i);
        for _ in 0..(w.m - i) {
            coef *= BigRational::from_integer(BigInt::from(s));
        }
        if coef.is_zero() {
            continue;
        }
        out.add_term(NormalWord { m: i, ..w }, c.scale(&coef));
    }
}

impl fmt::Display for QuotientPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let (neg, prefix) = crate::laurent::term_prefix(c);
            let sep = match (i, neg) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            if *w == NormalWord::UNIT {
                let body = prefix.trim_end();
                write!(f, "{sep}{}", if body.is_empty() { "1" } else { body })?;
            } else {
                write!(f, "{sep}{prefix}{w}")?;
            }
        }
        Ok(())
    }
}

/// Normal-ordered form of an expression over `adag`, `b`, `N`.
pub fn normal_order(e: &Expr) -> Result<QuotientPoly, ExpandError> {
    if let Some(g) = e.generators().into_iter().find(|g| !g.is_quotient()) {
        return Err(ExpandError::NotQuotient(g));
    }
    let free = expand_free(e)?;
    let mut out = QuotientPoly::zero();
    for (w, c) in free.terms() {
        let mut p = QuotientPoly::one();
        for g in &w.0 {
            p = p.times_gen(*g);
        }
        out = out.add(&p.scale(c));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientCheck {
    pub holds: bool,
    pub residual: QuotientPoly,
}

/// `normal_order(lhs − rhs) == 0`.
pub fn quotient_check(lhs: &Expr, rhs: &Expr) -> Result<QuotientCheck, ExpandError> {
    let residual = normal_order(&Expr::sub(lhs.clone(), rhs.clone()))?;
    Ok(QuotientCheck {
        holds: residual.is_zero(),
        residual,
    })
}
