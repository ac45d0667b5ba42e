use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Gen;
use crate::laurent::LaurentScalar;

/// Diagonal functions of `N` available in matrix evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagFn {
    /// `e^{i2π(N+k)/(n+1)}`.
    Phase(i32),
    /// `cos(2π(N+k)/(n+1))`.
    Cos(i32),
    /// `((n+1)/2π)·arcsin[(i/2)(a†b − b†a + ab† − ba†)]`, principal branch.
    NArcsin,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Gen(Gen),
    Scalar(LaurentScalar),
    Func(DiagFn),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    /// `[x, y]_n = xy − q·yx`.
    Bracket(Box<Expr>, Box<Expr>),
    /// `[x, y] = xy − yx`.
    Comm(Box<Expr>, Box<Expr>),
    /// `{x, y} = xy + yx`.
    Anti(Box<Expr>, Box<Expr>),
    /// Product of the arguments summed over all permutations of the
    /// generators it contains.
    SumPerm(Vec<Expr>),
    /// Same, over cyclic shifts of the sorted generator list.
    SumCyc(Vec<Expr>),
}

impl Expr {
    pub fn gen(g: Gen) -> Expr {
        Expr::Gen(g)
    }

    pub fn scalar(s: LaurentScalar) -> Expr {
        Expr::Scalar(s)
    }

    pub fn int(c: i64) -> Expr {
        Expr::Scalar(LaurentScalar::from_int(c))
    }

    pub fn product(items: Vec<Expr>) -> Expr {
        match items.len() {
            0 => Expr::int(1),
            1 => items.into_iter().next().unwrap(),
            _ => Expr::Product(items),
        }
    }

    pub fn pow(self, e: u32) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn bracket(x: Expr, y: Expr) -> Expr {
        Expr::Bracket(Box::new(x), Box::new(y))
    }

    pub fn comm(x: Expr, y: Expr) -> Expr {
        Expr::Comm(Box::new(x), Box::new(y))
    }

    pub fn anti(x: Expr, y: Expr) -> Expr {
        Expr::Anti(Box::new(x), Box::new(y))
    }

    pub fn sub(x: Expr, y: Expr) -> Expr {
        Expr::Sub(Box::new(x), Box::new(y))
    }

    pub fn add(x: Expr, y: Expr) -> Expr {
        Expr::Add(Box::new(x), Box::new(y))
    }

    /// Sum of a list (`0` when empty).
    pub fn sum(items: Vec<Expr>) -> Expr {
        let mut it = items.into_iter();
        match it.next() {
            None => Expr::int(0),
            Some(first) => it.fold(first, Expr::add),
        }
    }

    /// Every generator occurring in the expression.
    pub fn generators(&self) -> BTreeSet<Gen> {
        let mut out = BTreeSet::new();
        self.collect_gens(&mut out);
        out
    }

    fn collect_gens(&self, out: &mut BTreeSet<Gen>) {
        match self {
            Expr::Gen(g) => {
                out.insert(*g);
            }
            Expr::Scalar(_) => {}
            // the arcsin construction is built from the ladder operators
            Expr::Func(DiagFn::NArcsin) => {
                out.extend([Gen::Adag, Gen::B, Gen::A, Gen::Bdag]);
            }
            Expr::Func(_) => {
                out.insert(Gen::N);
            }
            Expr::Neg(x) | Expr::Pow(x, _) => x.collect_gens(out),
            Expr::Add(x, y)
            | Expr::Sub(x, y)
            | Expr::Bracket(x, y)
            | Expr::Comm(x, y)
            | Expr::Anti(x, y) => {
                x.collect_gens(out);
                y.collect_gens(out);
            }
            Expr::Product(xs) | Expr::SumPerm(xs) | Expr::SumCyc(xs) => {
                xs.iter().for_each(|x| x.collect_gens(out))
            }
        }
    }

    pub fn has_functions(&self) -> bool {
        match self {
            Expr::Func(_) => true,
            Expr::Gen(_) | Expr::Scalar(_) => false,
            Expr::Neg(x) | Expr::Pow(x, _) => x.has_functions(),
            Expr::Add(x, y)
            | Expr::Sub(x, y)
            | Expr::Bracket(x, y)
            | Expr::Comm(x, y)
            | Expr::Anti(x, y) => x.has_functions() || y.has_functions(),
            Expr::Product(xs) | Expr::SumPerm(xs) | Expr::SumCyc(xs) => {
                xs.iter().any(Expr::has_functions)
            }
        }
    }

    /// Rename generators.
    pub fn substitute(&self, map: &BTreeMap<Gen, Gen>) -> Expr {
        let sub = |x: &Expr| Box::new(x.substitute(map));
        match self {
            Expr::Gen(g) => Expr::Gen(*map.get(g).unwrap_or(g)),
            Expr::Scalar(_) | Expr::Func(_) => self.clone(),
            Expr::Neg(x) => Expr::Neg(sub(x)),
            Expr::Pow(x, e) => Expr::Pow(sub(x), *e),
            Expr::Add(x, y) => Expr::Add(sub(x), sub(y)),
            Expr::Sub(x, y) => Expr::Sub(sub(x), sub(y)),
            Expr::Bracket(x, y) => Expr::Bracket(sub(x), sub(y)),
            Expr::Comm(x, y) => Expr::Comm(sub(x), sub(y)),
            Expr::Anti(x, y) => Expr::Anti(sub(x), sub(y)),
            Expr::Product(xs) => Expr::Product(xs.iter().map(|x| x.substitute(map)).collect()),
            Expr::SumPerm(xs) => Expr::SumPerm(xs.iter().map(|x| x.substitute(map)).collect()),
            Expr::SumCyc(xs) => Expr::SumCyc(xs.iter().map(|x| x.substitute(map)).collect()),
        }
    }

    /// The generator renamings a permutation or cyclic sum ranges over.
    pub(crate) fn orderings(args: &[Expr], cyclic: bool) -> Vec<BTreeMap<Gen, Gen>> {
        let gens: Vec<Gen> = args
            .iter()
            .flat_map(|a| a.generators())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let k = gens.len();
        let images: Vec<Vec<usize>> = if cyclic {
            (0..k.max(1))
                .map(|s| (0..k).map(|i| (i + s) % k.max(1)).collect())
                .collect()
        } else {
            permutations(k)
        };
        images
            .into_iter()
            .map(|img| gens.iter().zip(&img).map(|(g, &j)| (*g, gens[j])).collect())
            .collect()
    }

    fn is_atom(&self) -> bool {
        match self {
            Expr::Gen(_) | Expr::Func(_) => true,
            Expr::Bracket(..) | Expr::Comm(..) | Expr::Anti(..) => true,
            Expr::SumPerm(_) | Expr::SumCyc(_) => true,
            Expr::Scalar(s) => {
                s.len() <= 1
                    && s.terms().all(|(k, c)| {
                        use num_traits::{One, Signed};
                        !c.is_negative() && (k == 0 || c.is_one())
                    })
            }
            _ => false,
        }
    }
}

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

fn write_factor(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    if e.is_atom() {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, xs: &[Expr]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

fn write_shift(f: &mut fmt::Formatter<'_>, name: &str, k: i32) -> fmt::Result {
    match k {
        0 => write!(f, "{name}(N)"),
        k if k > 0 => write!(f, "{name}(N+{k})"),
        k => write!(f, "{name}(N-{})", -k),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Gen(g) => write!(f, "{g}"),
            Expr::Scalar(s) => write!(f, "{s}"),
            Expr::Func(DiagFn::Phase(k)) => write_shift(f, "phase", *k),
            Expr::Func(DiagFn::Cos(k)) => write_shift(f, "cos", *k),
            Expr::Func(DiagFn::NArcsin) => write!(f, "narcsin()"),
            Expr::Neg(x) => {
                write!(f, "-")?;
                write_factor(f, x)
            }
            Expr::Add(x, y) => write!(f, "{x} + {y}"),
            Expr::Sub(x, y) => {
                write!(f, "{x} - ")?;
                match **y {
                    Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => write!(f, "({y})"),
                    _ => write!(f, "{y}"),
                }
            }
            Expr::Product(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    match x {
                        Expr::Pow(..) => write!(f, "{x}")?,
                        _ => write_factor(f, x)?,
                    }
                }
                Ok(())
            }
            Expr::Pow(x, e) => {
                match &**x {
                    Expr::Scalar(s) if s.terms().any(|(k, _)| k != 0) => write!(f, "({x})")?,
                    _ => write_factor(f, x)?,
                }
                write!(f, "^{e}")
            }
            Expr::Bracket(x, y) => write!(f, "[{x}, {y}]_n"),
            Expr::Comm(x, y) => write!(f, "[{x}, {y}]"),
            Expr::Anti(x, y) => write!(f, "{{{x}, {y}}}"),
            Expr::SumPerm(xs) => write_list(f, "sumperm", xs),
            Expr::SumCyc(xs) => write_list(f, "sumcyc", xs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_enumeration() {
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn cyclic_orderings() {
        let args = vec![Expr::Product(vec![
            Expr::Gen(Gen::indexed(1)),
            Expr::Gen(Gen::indexed(2)),
            Expr::Gen(Gen::indexed(3)),
        ])];
        let maps = Expr::orderings(&args, true);
        assert_eq!(maps.len(), 3);
        assert_eq!(maps[1][&Gen::indexed(1)], Gen::indexed(2));
        assert_eq!(maps[1][&Gen::indexed(3)], Gen::indexed(1));
    }
}
