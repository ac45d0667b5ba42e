//! Noncommutative polynomials over the Laurent ring in formal `q`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use super::expr::Expr;
use super::Gen;
use crate::laurent::LaurentScalar;
use crate::matrix::CMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("`{0}` is a function of N and has no polynomial expansion")]
    NotPolynomial(String),
    #[error("generator `{0}` is outside the rewriter alphabet adag, b, N")]
    NotQuotient(Gen),
}

/// A word in the generators. Ordered length-first, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Gen>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<&str> = self.0.iter().map(|g| g.name()).collect();
        write!(f, "{}", names.join(" "))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreePoly {
    terms: BTreeMap<Word, LaurentScalar>,
}

impl FreePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: LaurentScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(Word::default(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(LaurentScalar::one())
    }

    pub fn generator(g: Gen) -> Self {
        let mut p = Self::zero();
        p.add_term(Word(vec![g]), LaurentScalar::one());
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

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, w: Word, c: LaurentScalar) {
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

    pub fn add(&self, other: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FreePoly) -> FreePoly {
        self.add(&other.scale(&LaurentScalar::from_int(-1)))
    }

    pub fn scale(&self, c: &LaurentScalar) -> FreePoly {
        let mut out = FreePoly::zero();
        for (w, d) in &self.terms {
            out.add_term(w.clone(), d * c);
        }
        out
    }

    pub fn mul(&self, other: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.0.clone();
                w.extend_from_slice(&w2.0);
                out.add_term(Word(w), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> FreePoly {
        let mut acc = FreePoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Rename generators word by word.
    pub fn rename(&self, map: &BTreeMap<Gen, Gen>) -> FreePoly {
        let mut out = FreePoly::zero();
        for (w, c) in &self.terms {
            let w2 = w.0.iter().map(|g| *map.get(g).unwrap_or(g)).collect();
            out.add_term(Word(w2), c.clone());
        }
        out
    }

    /// Substitute a rational value for `q`; coefficients become constants.
    pub fn specialize(&self, value: &BigRational) -> FreePoly {
        let mut out = FreePoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), LaurentScalar::from_rational(c.specialize(value)));
        }
        out
    }

    /// Evaluate with matrices for the generators and a complex `q`.
    pub fn eval(&self, dim: usize, q: Complex64, gens: &dyn Fn(Gen) -> CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(dim);
        let mut cache: BTreeMap<Gen, CMatrix> = BTreeMap::new();
        for (w, c) in &self.terms {
            let mut m = CMatrix::identity(dim);
            for g in &w.0 {
                let gm = cache.entry(*g).or_insert_with(|| gens(*g));
                m = &m * gm;
            }
            acc = &acc + &m.scale(c.eval_at(q));
        }
        acc
    }

    /// Short stable digest: number of terms and the leading term.
    pub fn digest(&self) -> String {
        match self.terms.iter().next() {
            None => "0".to_string(),
            Some((w, c)) => format!("{} terms; lowest ({c}) {w}", self.terms.len()),
        }
    }
}

impl fmt::Display for FreePoly {
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
            if w.0.is_empty() {
                let body = prefix.trim_end();
                write!(f, "{sep}{}", if body.is_empty() { "1" } else { body })?;
            } else {
                write!(f, "{sep}{prefix}{w}")?;
            }
        }
        Ok(())
    }
}

/// Fully distribute an expression over formal `q`.
pub fn expand_free(e: &Expr) -> Result<FreePoly, ExpandError> {
    let q = LaurentScalar::q();
    Ok(match e {
        Expr::Gen(g) => FreePoly::generator(*g),
        Expr::Scalar(s) => FreePoly::constant(s.clone()),
        Expr::Func(f) => return Err(ExpandError::NotPolynomial(Expr::Func(*f).to_string())),
        Expr::Neg(x) => expand_free(x)?.scale(&LaurentScalar::from_int(-1)),
        Expr::Add(x, y) => expand_free(x)?.add(&expand_free(y)?),
        Expr::Sub(x, y) => expand_free(x)?.sub(&expand_free(y)?),
        Expr::Product(xs) => {
            let mut acc = FreePoly::one();
            for x in xs {
                acc = acc.mul(&expand_free(x)?);
            }
            acc
        }
        Expr::Pow(x, k) => expand_free(x)?.pow(*k),
        Expr::Bracket(x, y) => {
            let (px, py) = (expand_free(x)?, expand_free(y)?);
            px.mul(&py).sub(&py.mul(&px).scale(&q))
        }
        Expr::Comm(x, y) => {
            let (px, py) = (expand_free(x)?, expand_free(y)?);
            px.mul(&py).sub(&py.mul(&px))
        }
        Expr::Anti(x, y) => {
            let (px, py) = (expand_free(x)?, expand_free(y)?);
            px.mul(&py).add(&py.mul(&px))
        }
        Expr::SumPerm(xs) | Expr::SumCyc(xs) => {
            let cyclic = matches!(e, Expr::SumCyc(_));
            let mut body = FreePoly::one();
            for x in xs {
                body = body.mul(&expand_free(x)?);
            }
            let mut acc = FreePoly::zero();
            for map in Expr::orderings(xs, cyclic) {
                acc = acc.add(&body.rename(&map));
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse;

    fn zero(text: &str) -> bool {
        expand_free(&parse(text).unwrap()).unwrap().is_zero()
    }

    #[test]
    fn self_bracket() {
        assert!(zero("[u,u]_n - (1-q) u^2"));
    }

    #[test]
    fn swap_relation() {
        assert!(zero("[u,v]_n + q^-1 [v,u]_n + (q - q^-1) v u"));
    }

    #[test]
    fn perm_sum_relation() {
        assert!(zero("sumperm([u1, u2]_n) - (1-q) sumperm(u1 u2)"));
        let p = expand_free(&parse("sumperm(u1, u2)").unwrap()).unwrap();
        assert_eq!(p.to_string(), "u1 u2 + u2 u1");
    }

    #[test]
    fn nonzero_residual_survives() {
        let p = expand_free(&parse("[u,v]_n - [v,u]_n").unwrap()).unwrap();
        assert!(!p.is_zero());
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn functions_are_rejected() {
        assert!(matches!(
            expand_free(&parse("phase(N) b").unwrap()),
            Err(ExpandError::NotPolynomial(_))
        ));
    }

    #[test]
    fn words_order_length_first() {
        let p = expand_free(&parse("v u w + u + 2").unwrap()).unwrap();
        let words: Vec<String> = p.terms().map(|(w, _)| w.to_string()).collect();
        assert_eq!(words, vec!["1", "u", "v u w"]);
    }
}
