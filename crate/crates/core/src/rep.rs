//! Matrix realization of a single Gentile mode on `|0⟩ … |n⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::eigen::{matrix_arcsin, EigenError};
use crate::json::F17;
use crate::laurent::root_of_unity;
use crate::matrix::{CMatrix, DimensionMismatch};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("maximum occupation n must be at least 1")]
    InvalidN,
    #[error("index {value} outside 0..={max}")]
    OutOfRange { value: usize, max: usize },
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// `⟨ν⟩_n = Σ_{j<ν} q^j` with `q = e^{i2π/(n+1)}`.
pub fn bracket_number(n: usize, v: usize) -> Result<Complex64, RepError> {
    if n == 0 {
        return Err(RepError::InvalidN);
    }
    if v > n + 1 {
        return Err(RepError::OutOfRange { value: v, max: n + 1 });
    }
    let period = (n + 1) as i64;
    Ok((0..v as i64).map(|j| root_of_unity(j, period)).sum())
}

/// The phase `q = e^{i2π/(n+1)}`.
pub fn phase(n: usize) -> Complex64 {
    root_of_unity(1, (n + 1) as i64)
}

#[derive(Clone, Debug)]
pub struct GentileRep {
    pub n: usize,
    pub theta: f64,
    pub q: Complex64,
    /// `⟨0⟩ … ⟨n+1⟩`.
    pub bracket_numbers: Vec<Complex64>,
    pub a_dag: CMatrix,
    pub b: CMatrix,
    pub a: CMatrix,
    pub b_dag: CMatrix,
    pub num: CMatrix,
}

impl GentileRep {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim())
    }
}

/// Build the representation: `a†|ν⟩ = √⟨ν+1⟩|ν+1⟩`, `b|ν⟩ = √⟨ν⟩|ν−1⟩`
/// with principal square roots; `a`, `b†` are the conjugate transposes.
pub fn build_rep(n: usize) -> Result<GentileRep, RepError> {
    if n == 0 {
        return Err(RepError::InvalidN);
    }
    let bracket_numbers = (0..=n + 1)
        .map(|v| bracket_number(n, v))
        .collect::<Result<Vec<_>, _>>()?;
    let dim = n + 1;
    let mut a_dag = CMatrix::zeros(dim);
    let mut b = CMatrix::zeros(dim);
    for v in 0..n {
        let amp = bracket_numbers[v + 1].sqrt();
        a_dag[(v + 1, v)] = amp;
        b[(v, v + 1)] = amp;
    }
    let a = a_dag.adjoint();
    let b_dag = b.adjoint();
    let num = CMatrix::from_real_diag((0..dim).map(|v| v as f64));
    Ok(GentileRep {
        n,
        theta: 2.0 * PI / dim as f64,
        q: phase(n),
        bracket_numbers,
        a_dag,
        b,
        a,
        b_dag,
        num,
    })
}

/// `uv − e^{i2π/(n+1)} vu`.
pub fn gentile_bracket(u: &CMatrix, v: &CMatrix, n: usize) -> Result<CMatrix, DimensionMismatch> {
    let uv = u.try_mul(v)?;
    let vu = v.try_mul(u)?;
    uv.try_sub(&vu.scale(phase(n)))
}

/// `diag(f(0), …, f(n))`.
pub fn diag_of_num(rep: &GentileRep, f: impl Fn(usize) -> Complex64) -> CMatrix {
    CMatrix::from_diag((0..rep.dim()).map(f))
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcsinRow {
    pub nu: usize,
    /// Eigenvalue of the argument matrix on `|ν⟩`.
    pub argument: F17,
    pub reconstructed: F17,
    pub expected: usize,
    pub agrees: bool,
    /// `((n+1)/2π)·arcsin(sin(2πν/(n+1)))` from scalar trigonometry.
    pub predicted: F17,
    pub matches_prediction: bool,
    /// Another state shares this argument eigenvalue.
    pub collision: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcsinAudit {
    pub n: usize,
    #[serde(skip)]
    pub operator: CMatrix,
    pub rows: Vec<ArcsinRow>,
    /// Pairs `(ν, ν′)`, `ν < ν′`, with equal argument eigenvalues.
    pub collisions: Vec<(usize, usize)>,
    pub all_agree: bool,
    pub all_match_prediction: bool,
}

const ARCSIN_TOL: f64 = 1e-12;
/// Absolute agreement tolerance for the reconstructed values.
pub const ARCSIN_MATCH_TOL: f64 = 1e-9;
/// Bound on the rounding error of an argument eigenvalue.
const ARGUMENT_ROUNDING: f64 = 1e-13;

/// Spread of `arcsin` over `[x − δ, x + δ] ∩ [−1, 1]`.
fn arcsin_spread(x: f64, delta: f64) -> f64 {
    let hi = (x + delta).clamp(-1.0, 1.0).asin();
    let lo = (x - delta).clamp(-1.0, 1.0).asin();
    hi - lo
}

/// Apply `((n+1)/2π)·arcsin` (principal branch) to
/// `M = (i/2)(a†b − b†a + ab† − ba†)` and compare with `N` state by state.
pub fn number_from_arcsin(rep: &GentileRep) -> Result<ArcsinAudit, RepError> {
    let half_i = Complex64::new(0.0, 0.5);
    let m = &(&(&rep.a_dag * &rep.b) - &(&rep.b_dag * &rep.a)) + &(&(&rep.a * &rep.b_dag) - &(&rep.b * &rep.a_dag));
    let m = m.scale(half_i);
    let defect = m.hermitian_defect();
    if defect > ARCSIN_TOL {
        return Err(EigenError::NotHermitian {
            defect,
            tol: ARCSIN_TOL,
        }
        .into());
    }
    let scale = rep.dim() as f64 / (2.0 * PI);
    let operator = matrix_arcsin(&m, ARCSIN_TOL)?.scale_real(scale);

    let args: Vec<f64> = (0..rep.dim()).map(|v| m[(v, v)].re).collect();
    let mut collisions = Vec::new();
    for i in 0..args.len() {
        for j in i + 1..args.len() {
            if (args[i] - args[j]).abs() <= ARCSIN_TOL {
                collisions.push((i, j));
            }
        }
    }
    let rows: Vec<ArcsinRow> = (0..rep.dim())
        .map(|v| {
            let rec = operator[(v, v)].re;
            let exact_arg = (2.0 * PI * v as f64 / rep.dim() as f64).sin();
            let predicted = scale * exact_arg.asin();
            ArcsinRow {
                nu: v,
                argument: F17(args[v]),
                reconstructed: F17(rec),
                expected: v,
                agrees: (rec - v as f64).abs() <= 1e-9,
                predicted: F17(predicted),
                // near ±1 arcsin has a square-root cusp, so argument rounding is amplified
                matches_prediction: (args[v] - exact_arg).abs() <= ARGUMENT_ROUNDING
                    && (rec - predicted).abs() <= ARCSIN_MATCH_TOL + scale * arcsin_spread(exact_arg, ARGUMENT_ROUNDING),
                collision: collisions.iter().any(|&(i, j)| i == v || j == v),
            }
        })
        .collect();
    let all_agree = rows.iter().all(|r| r.agrees);
    let all_match_prediction = rows.iter().all(|r| r.matches_prediction);
    Ok(ArcsinAudit {
        n: rep.n,
        operator,
        rows,
        collisions,
        all_agree,
        all_match_prediction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_abs_diff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bracket_number_examples() {
        assert_eq!(bracket_number(5, 0).unwrap(), c(0.0, 0.0));
        assert_eq!(bracket_number(1, 1).unwrap(), c(1.0, 0.0));
        assert_eq!(bracket_number(3, 2).unwrap(), c(1.0, 1.0));
        assert!(bracket_number(3, 4).unwrap().norm() < 1e-15);
        assert_eq!(
            bracket_number(3, 5).unwrap_err(),
            RepError::OutOfRange { value: 5, max: 4 }
        );
    }

    #[test]
    fn bracket_numbers_match_ratio_formula() {
        for n in 1..=20 {
            let q = phase(n);
            for v in 1..=n {
                let ratio = (c(1.0, 0.0) - q.powu(v as u32)) / (c(1.0, 0.0) - q);
                assert!((bracket_number(n, v).unwrap() - ratio).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn n1_matrices() {
        let r = build_rep(1).unwrap();
        let expect_adag = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        assert_eq!(r.a_dag, expect_adag);
        assert_eq!(r.b, expect_adag.transpose());
        let anti = &(&r.b * &r.a_dag) + &(&r.a_dag * &r.b);
        assert_eq!(max_abs_diff(&anti, &r.identity()).unwrap(), 0.0);
        assert_eq!(max_abs_diff(&r.a, &r.b).unwrap(), 0.0);
    }

    #[test]
    fn defining_relation_and_invariants() {
        for n in 1..=24 {
            let r = build_rep(n).unwrap();
            let id = r.identity();
            let br = gentile_bracket(&r.b, &r.a_dag, n).unwrap();
            assert!(max_abs_diff(&br, &id).unwrap() <= 1e-12, "n={n}");
            assert!(r.bracket_numbers[0] == c(0.0, 0.0));
            assert!(r.bracket_numbers[n + 1].norm() <= 1e-14);
            for v in 0..=n {
                let rec = c(1.0, 0.0) + r.q * r.bracket_numbers[v];
                assert!((rec - r.bracket_numbers[v + 1]).norm() <= 1e-14);
            }
            let e_top: Vec<Complex64> = (0..=n).map(|i| if i == n { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
            assert!(r.a_dag.mul_vec(&e_top).iter().all(|z| z.norm() == 0.0));
            let e0: Vec<Complex64> = (0..=n).map(|i| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
            assert!(r.b.mul_vec(&e0).iter().all(|z| z.norm() == 0.0));
            let na = r.num.commutator(&r.a_dag);
            assert!(max_abs_diff(&na, &r.a_dag).unwrap() <= 1e-14);
            let nb = r.num.commutator(&r.b);
            assert!(max_abs_diff(&nb, &-&r.b).unwrap() <= 1e-14);
        }
    }

    #[test]
    fn diagonal_products() {
        for n in 1..=12 {
            let r = build_rep(n).unwrap();
            let ab = &r.a_dag * &r.b;
            let ba = &r.b * &r.a_dag;
            let want_ab = CMatrix::from_diag((0..=n).map(|v| r.bracket_numbers[v]));
            let want_ba = CMatrix::from_diag((0..=n).map(|v| r.bracket_numbers[v + 1]));
            assert!(max_abs_diff(&ab, &want_ab).unwrap() <= 1e-12);
            assert!(max_abs_diff(&ba, &want_ba).unwrap() <= 1e-12);
            let bda = &r.b_dag * &r.a;
            assert!(max_abs_diff(&bda, &ab.adjoint()).unwrap() <= 1e-12);
            assert!(max_abs_diff(&(&r.a_dag * &r.a), &(&r.b_dag * &r.b)).unwrap() <= 1e-12);
            assert!(max_abs_diff(&(&r.a * &r.a_dag), &(&r.b * &r.b_dag)).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn bracket_of_self_and_identity() {
        let u = CMatrix::from_fn(3, |i, j| c(i as f64 - 0.5 * j as f64, 0.25 * (i * j) as f64));
        let lhs = gentile_bracket(&u, &u, 4).unwrap();
        let rhs = (&u * &u).scale(c(1.0, 0.0) - phase(4));
        assert!(max_abs_diff(&lhs, &rhs).unwrap() < 1e-14);
        let two = gentile_bracket(&CMatrix::identity(2), &CMatrix::identity(2), 1).unwrap();
        assert_eq!(two, CMatrix::identity(2).scale_real(2.0));
        assert!(gentile_bracket(&CMatrix::identity(2), &CMatrix::identity(3), 1).is_err());
    }

    #[test]
    fn diag_functions() {
        let r = build_rep(3).unwrap();
        assert_eq!(diag_of_num(&r, |_| c(1.0, 0.0)), r.identity());
        assert_eq!(diag_of_num(&r, |v| c(v as f64, 0.0)), r.num);
        let cosd = diag_of_num(&r, |v| c((2.0 * PI * v as f64 / 4.0).cos(), 0.0));
        let want = CMatrix::from_real_diag([1.0, 0.0, -1.0, 0.0]);
        assert!(max_abs_diff(&cosd, &want).unwrap() < 1e-15);
    }

    #[test]
    fn arcsin_examples() {
        let a1 = number_from_arcsin(&build_rep(1).unwrap()).unwrap();
        assert!(a1.operator.max_abs() < 1e-15);
        assert!(!a1.rows[1].agrees);
        assert!(a1.rows[1].collision);
        assert_eq!(a1.collisions, vec![(0, 1)]);

        let a4 = number_from_arcsin(&build_rep(4).unwrap()).unwrap();
        assert!(a4.rows[1].agrees);

        let a3 = number_from_arcsin(&build_rep(3).unwrap()).unwrap();
        let args: Vec<f64> = a3.rows.iter().map(|r| r.argument.0).collect();
        for (x, want) in args.iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert!((x - want).abs() < 1e-15);
        }
        assert!(a3.collisions.contains(&(0, 2)));
        assert!(!a3.all_agree);
    }
}
