//! Direct numerical evaluation of expressions, bypassing symbolic expansion.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use super::expr::{DiagFn, Expr};
use super::Gen;
use crate::eigen::EigenError;
use crate::laurent::{root_of_unity, LaurentScalar};
use crate::matrix::{CMatrix, DimensionMismatch};
use crate::rep::{bracket_number, number_from_arcsin, GentileRep, RepError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no matrix bound to generator `{0}`")]
    Unbound(Gen),
    #[error("`{0}` needs a Gentile representation")]
    NeedsRepresentation(String),
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Generator matrices plus the value of `q`.
#[derive(Clone, Debug)]
pub struct MatrixEnv {
    dim: usize,
    q: Complex64,
    gens: BTreeMap<Gen, CMatrix>,
    rep: Option<GentileRep>,
}

impl MatrixEnv {
    /// Ladder operators of `rep` with `q = e^{i2π/(n+1)}`.
    pub fn from_rep(rep: &GentileRep) -> Self {
        let gens = BTreeMap::from([
            (Gen::Adag, rep.a_dag.clone()),
            (Gen::B, rep.b.clone()),
            (Gen::A, rep.a.clone()),
            (Gen::Bdag, rep.b_dag.clone()),
            (Gen::N, rep.num.clone()),
        ]);
        Self {
            dim: rep.dim(),
            q: rep.q,
            gens,
            rep: Some(rep.clone()),
        }
    }

    /// Arbitrary generator matrices (all of dimension `dim`) and a value of `q`.
    pub fn new(dim: usize, q: Complex64, gens: BTreeMap<Gen, CMatrix>) -> Self {
        Self {
            dim,
            q,
            gens,
            rep: None,
        }
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn scalar(&self, s: &LaurentScalar) -> Complex64 {
        match &self.rep {
            Some(r) => s.eval(r.n),
            None => s.eval_at(self.q),
        }
    }
}

fn diag_fn_value(f: DiagFn, n: usize, nu: usize) -> Complex64 {
    let period = (n + 1) as i64;
    match f {
        DiagFn::Phase(k) => root_of_unity(nu as i64 + k as i64, period),
        DiagFn::Cos(k) => Complex64::new(root_of_unity(nu as i64 + k as i64, period).re, 0.0),
        DiagFn::NArcsin => unreachable!("handled by the caller"),
    }
}

/// Evaluate `e` with dense matrix products.
pub fn matrix_eval(e: &Expr, env: &MatrixEnv) -> Result<CMatrix, EvalError> {
    let id = || CMatrix::identity(env.dim);
    Ok(match e {
        Expr::Gen(g) => env.gens.get(g).cloned().ok_or(EvalError::Unbound(*g))?,
        Expr::Scalar(s) => id().scale(env.scalar(s)),
        Expr::Func(f) => {
            let rep = env
                .rep
                .as_ref()
                .ok_or_else(|| EvalError::NeedsRepresentation(e.to_string()))?;
            match f {
                DiagFn::NArcsin => number_from_arcsin(rep)?.operator,
                _ => CMatrix::from_diag((0..rep.dim()).map(|nu| diag_fn_value(*f, rep.n, nu))),
            }
        }
        Expr::Neg(x) => -&matrix_eval(x, env)?,
        Expr::Add(x, y) => matrix_eval(x, env)?.try_add(&matrix_eval(y, env)?)?,
        Expr::Sub(x, y) => matrix_eval(x, env)?.try_sub(&matrix_eval(y, env)?)?,
        Expr::Product(xs) => {
            let mut acc = id();
            for x in xs {
                acc = acc.try_mul(&matrix_eval(x, env)?)?;
            }
            acc
        }
        Expr::Pow(x, k) => matrix_eval(x, env)?.pow(*k),
        Expr::Bracket(x, y) | Expr::Comm(x, y) | Expr::Anti(x, y) => {
            let mx = matrix_eval(x, env)?;
            let my = matrix_eval(y, env)?;
            let xy = mx.try_mul(&my)?;
            let yx = my.try_mul(&mx)?;
            match e {
                Expr::Bracket(..) => xy.try_sub(&yx.scale(env.q))?,
                Expr::Comm(..) => xy.try_sub(&yx)?,
                _ => xy.try_add(&yx)?,
            }
        }
        Expr::SumPerm(xs) | Expr::SumCyc(xs) => {
            let body = Expr::Product(xs.clone());
            let mut acc = CMatrix::zeros(env.dim);
            for map in Expr::orderings(xs, matches!(e, Expr::SumCyc(_))) {
                acc = acc.try_add(&matrix_eval(&body.substitute(&map), env)?)?;
            }
            acc
        }
    })
}

struct KetCtx {
    n: usize,
    amp: Vec<Complex64>,
}

impl KetCtx {
    fn apply_gen(&self, g: Gen, v: &[Complex64]) -> Result<Vec<Complex64>, EvalError> {
        let dim = self.n + 1;
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (nu, &c) in v.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            match g {
                Gen::Adag if nu < self.n => out[nu + 1] += c * self.amp[nu + 1],
                Gen::Bdag if nu < self.n => out[nu + 1] += c * self.amp[nu + 1].conj(),
                Gen::B if nu > 0 => out[nu - 1] += c * self.amp[nu],
                Gen::A if nu > 0 => out[nu - 1] += c * self.amp[nu].conj(),
                Gen::N => out[nu] += c * nu as f64,
                Gen::Free(_) => return Err(EvalError::Unbound(g)),
                _ => {}
            }
        }
        Ok(out)
    }

    fn narcsin_value(&self, nu: usize) -> Result<f64, EvalError> {
        let dim = self.n + 1;
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[nu] = Complex64::new(1.0, 0.0);
        let path = |gs: [Gen; 2]| -> Result<Vec<Complex64>, EvalError> {
            let t = self.apply_gen(gs[1], &e)?;
            self.apply_gen(gs[0], &t)
        };
        let t1 = path([Gen::Adag, Gen::B])?;
        let t2 = path([Gen::Bdag, Gen::A])?;
        let t3 = path([Gen::A, Gen::Bdag])?;
        let t4 = path([Gen::B, Gen::Adag])?;
        let m = (t1[nu] - t2[nu] + t3[nu] - t4[nu]) * Complex64::new(0.0, 0.5);
        Ok(dim as f64 / (2.0 * PI) * m.re.clamp(-1.0, 1.0).asin())
    }

    fn apply(&self, e: &Expr, v: &[Complex64]) -> Result<Vec<Complex64>, EvalError> {
        let zip = |a: Vec<Complex64>, b: Vec<Complex64>, s: Complex64| -> Vec<Complex64> {
            a.into_iter().zip(b).map(|(x, y)| x + s * y).collect()
        };
        let one = Complex64::new(1.0, 0.0);
        Ok(match e {
            Expr::Gen(g) => self.apply_gen(*g, v)?,
            Expr::Scalar(s) => {
                let c = s.eval(self.n);
                v.iter().map(|x| x * c).collect()
            }
            Expr::Func(DiagFn::NArcsin) => v
                .iter()
                .enumerate()
                .map(|(nu, x)| self.narcsin_value(nu).map(|f| x * f))
                .collect::<Result<_, _>>()?,
            Expr::Func(f) => v
                .iter()
                .enumerate()
                .map(|(nu, x)| x * diag_fn_value(*f, self.n, nu))
                .collect(),
            Expr::Neg(x) => self.apply(x, v)?.into_iter().map(|z| -z).collect(),
            Expr::Add(x, y) => zip(self.apply(x, v)?, self.apply(y, v)?, one),
            Expr::Sub(x, y) => zip(self.apply(x, v)?, self.apply(y, v)?, -one),
            Expr::Product(xs) => {
                let mut cur = v.to_vec();
                for x in xs.iter().rev() {
                    cur = self.apply(x, &cur)?;
                }
                cur
            }
            Expr::Pow(x, k) => {
                let mut cur = v.to_vec();
                for _ in 0..*k {
                    cur = self.apply(x, &cur)?;
                }
                cur
            }
            Expr::Bracket(x, y) | Expr::Comm(x, y) | Expr::Anti(x, y) => {
                let xy = self.apply(x, &self.apply(y, v)?)?;
                let yx = self.apply(y, &self.apply(x, v)?)?;
                let s = match e {
                    Expr::Bracket(..) => -crate::rep::phase(self.n),
                    Expr::Comm(..) => -one,
                    _ => one,
                };
                zip(xy, yx, s)
            }
            Expr::SumPerm(xs) | Expr::SumCyc(xs) => {
                let body = Expr::Product(xs.clone());
                let mut acc = vec![Complex64::new(0.0, 0.0); v.len()];
                for map in Expr::orderings(xs, matches!(e, Expr::SumCyc(_))) {
                    acc = zip(acc, self.apply(&body.substitute(&map), v)?, one);
                }
                acc
            }
        })
    }
}

/// Evaluate `e` on the Fock basis by acting with the ladder rules on each
/// ket `|ν⟩`, never forming the generator matrices.
pub fn ket_eval(e: &Expr, n: usize) -> Result<CMatrix, EvalError> {
    let amp = (0..=n + 1)
        .map(|v| bracket_number(n, v).map(|z| z.sqrt()))
        .collect::<Result<Vec<_>, _>>()?;
    let ctx = KetCtx { n, amp };
    let dim = n + 1;
    let mut out = CMatrix::zeros(dim);
    for col in 0..dim {
        let mut e_col = vec![Complex64::new(0.0, 0.0); dim];
        e_col[col] = Complex64::new(1.0, 0.0);
        let img = ctx.apply(e, &e_col)?;
        for (row, z) in img.into_iter().enumerate() {
            out[(row, col)] = z;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_abs_diff;
    use crate::rep::build_rep;
    use crate::symbolic::parse;

    #[test]
    fn defining_relation_is_identity() {
        let e = parse("[b, adag]_n").unwrap();
        for n in 1..=6 {
            let r = build_rep(n).unwrap();
            let m = matrix_eval(&e, &MatrixEnv::from_rep(&r)).unwrap();
            assert!(max_abs_diff(&m, &r.identity()).unwrap() < 1e-12);
            let k = ket_eval(&e, n).unwrap();
            assert!(max_abs_diff(&k, &r.identity()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ket_and_matrix_agree() {
        let exprs = [
            "phase(N-1) N b - N b phase(N-1)",
            "[N b, adag b] - N b phase(N-1)",
            "narcsin() - N",
            "cos(N) adag - adag b bdag a",
            "sumperm(adag b N)",
        ];
        for text in exprs {
            let e = parse(text).unwrap();
            for n in [1, 2, 3, 5] {
                let r = build_rep(n).unwrap();
                let m = matrix_eval(&e, &MatrixEnv::from_rep(&r)).unwrap();
                let k = ket_eval(&e, n).unwrap();
                assert!(max_abs_diff(&m, &k).unwrap() < 1e-12, "{text} n={n}");
            }
        }
    }

    #[test]
    fn functions_need_a_representation() {
        let env = MatrixEnv::new(2, Complex64::new(1.0, 0.0), BTreeMap::new());
        assert!(matches!(
            matrix_eval(&parse("phase(N)").unwrap(), &env),
            Err(EvalError::NeedsRepresentation(_))
        ));
        assert!(matches!(matrix_eval(&parse("u").unwrap(), &env), Err(EvalError::Unbound(_))));
    }
}
