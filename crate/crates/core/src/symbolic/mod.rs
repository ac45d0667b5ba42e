//! Operator expressions: parsing, free expansion over formal `q`, and normal
//! ordering in the algebra generated by `a†`, `b`, `N`.

mod eval;
mod expr;
mod free;
mod parse;
mod quotient;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{ket_eval, matrix_eval, EvalError, MatrixEnv};
pub use expr::{DiagFn, Expr};
pub use free::{expand_free, ExpandError, FreePoly, Word};
pub use parse::{parse, parse_with, ParseError};
pub use quotient::{normal_order, quotient_check, NormalWord, QuotientCheck, QuotientPoly};

/// Free generators `u, v, w, o, u1 … u9` followed by the ladder alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    Free(u8),
    Adag,
    B,
    A,
    Bdag,
    N,
}

const FREE_NAMES: [&str; 13] = [
    "u", "v", "w", "o", "u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "u9",
];

impl Gen {
    pub fn name(self) -> &'static str {
        match self {
            Gen::Free(i) => FREE_NAMES[i as usize],
            Gen::Adag => "adag",
            Gen::B => "b",
            Gen::A => "a",
            Gen::Bdag => "bdag",
            Gen::N => "N",
        }
    }

    pub fn from_name(s: &str) -> Option<Gen> {
        if let Some(i) = FREE_NAMES.iter().position(|n| *n == s) {
            return Some(Gen::Free(i as u8));
        }
        Some(match s {
            "adag" => Gen::Adag,
            "b" => Gen::B,
            "a" => Gen::A,
            "bdag" => Gen::Bdag,
            "N" => Gen::N,
            _ => return None,
        })
    }

    /// `u_k` for `k` in 1..=9.
    pub fn indexed(k: usize) -> Gen {
        assert!((1..=9).contains(&k), "indexed generator out of range");
        Gen::Free(3 + k as u8)
    }

    pub fn is_free(self) -> bool {
        matches!(self, Gen::Free(_))
    }

    pub fn is_quotient(self) -> bool {
        matches!(self, Gen::Adag | Gen::B | Gen::N)
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The set of generator names a parse session accepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    gens: BTreeSet<Gen>,
}

impl Alphabet {
    pub fn new(gens: impl IntoIterator<Item = Gen>) -> Self {
        Self {
            gens: gens.into_iter().collect(),
        }
    }

    /// Every known generator.
    pub fn standard() -> Self {
        let mut gens: BTreeSet<Gen> = (0..FREE_NAMES.len() as u8).map(Gen::Free).collect();
        gens.extend([Gen::Adag, Gen::B, Gen::A, Gen::Bdag, Gen::N]);
        Self { gens }
    }

    pub fn free() -> Self {
        Self::new((0..FREE_NAMES.len() as u8).map(Gen::Free))
    }

    /// `adag, b, N`: the alphabet of the normal-ordering rewriter.
    pub fn quotient() -> Self {
        Self::new([Gen::Adag, Gen::B, Gen::N])
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.gens.contains(&g)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.gens.iter().map(|g| g.name()).collect()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::standard()
    }
}
