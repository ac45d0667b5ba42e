//! Angular momentum from a single set of Gentile operators:
//! `J_z = N − n/2`, `J₊ = Σ_l λ_l* A^l a†`, `J₋ = J₊†`, with `A` diagonal in the Fock basis.
//!
//! The coefficients come from the linear interpolation problem
//! `Σ_l λ_l* x_{ν+1}^l √⟨ν+1⟩ = c₊(ν)` where `x_μ` is the eigenvalue of `A` on
//! `|μ⟩`, solved in double-double arithmetic.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dd::{Dd, DdComplex};
use crate::json::{C17, F17};
use crate::matrix::CMatrix;
use crate::rep::{build_rep, GentileRep, RepError};

/// Minimum node separation accepted by the interpolation.
pub const NODE_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Su2Error {
    #[error("n must be at least 1")]
    InvalidN,
    #[error("eigenvalues of A on |{nu}⟩ and |{nu_prime}⟩ coincide (separation {separation:e})")]
    DegenerateNodes { nu: usize, nu_prime: usize, separation: f64 },
    #[error("the double-sum identity applies to A = a†b only, got {0}")]
    WrongChoice(&'static str),
    #[error("weight {0} outside [0, 1]")]
    InvalidWeight(f64),
}

impl From<RepError> for Su2Error {
    fn from(_: RepError) -> Self {
        Su2Error::InvalidN
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagonalChoice {
    /// `A = N`
    Num,
    /// `A = a†b`
    AdagB,
    /// `A = b†a`
    BdagA,
    /// `A = a†a`
    AdagA,
    /// `A = aa†`
    AAdag,
}

impl DiagonalChoice {
    pub const ALL: [DiagonalChoice; 5] = [
        DiagonalChoice::Num,
        DiagonalChoice::AdagB,
        DiagonalChoice::BdagA,
        DiagonalChoice::AdagA,
        DiagonalChoice::AAdag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DiagonalChoice::Num => "NUM",
            DiagonalChoice::AdagB => "ADAG_B",
            DiagonalChoice::BdagA => "BDAG_A",
            DiagonalChoice::AdagA => "ADAG_A",
            DiagonalChoice::AAdag => "A_ADAG",
        }
    }

    /// Accepts the CLI spellings `num`, `adagb`, `bdaga`, `adaga`, `aadag` as well as [`Self::name`].
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.to_ascii_lowercase().replace('_', "");
        Some(match t.as_str() {
            "num" | "n" => DiagonalChoice::Num,
            "adagb" => DiagonalChoice::AdagB,
            "bdaga" => DiagonalChoice::BdagA,
            "adaga" => DiagonalChoice::AdagA,
            "aadag" => DiagonalChoice::AAdag,
            _ => return None,
        })
    }

    /// The operator as a dense matrix.
    pub fn matrix(self, rep: &GentileRep) -> CMatrix {
        match self {
            DiagonalChoice::Num => rep.num.clone(),
            DiagonalChoice::AdagB => &rep.a_dag * &rep.b,
            DiagonalChoice::BdagA => &rep.b_dag * &rep.a,
            DiagonalChoice::AdagA => &rep.a_dag * &rep.a,
            DiagonalChoice::AAdag => &rep.a * &rep.a_dag,
        }
    }

    /// Eigenvalue of the operator on `|μ⟩`, in double-double precision.
    pub fn node(self, n: usize, mu: usize) -> DdComplex {
        match self {
            DiagonalChoice::Num => DdComplex::new(Dd::new(mu as f64), Dd::ZERO),
            DiagonalChoice::AdagB => dd_bracket(n, mu),
            DiagonalChoice::BdagA => dd_bracket(n, mu).conj(),
            DiagonalChoice::AdagA => DdComplex::new(dd_bracket(n, mu).norm(), Dd::ZERO),
            DiagonalChoice::AAdag => DdComplex::new(dd_bracket(n, mu + 1).norm(), Dd::ZERO),
        }
    }
}

/// `⟨ν⟩_n` in double-double precision.
pub fn dd_bracket(n: usize, v: usize) -> DdComplex {
    let period = (n + 1) as i64;
    (0..v as i64).fold(DdComplex::ZERO, |acc, j| acc + DdComplex::root_of_unity(j, period))
}

fn dd_int(x: i64) -> Dd {
    Dd::new(x as f64)
}

/// `c₊(ν) = √((n−ν)(ν+1))` for `ν = 0 … n`.
pub fn ladder_targets(n: usize) -> Result<Vec<f64>, Su2Error> {
    if n == 0 {
        return Err(Su2Error::InvalidN);
    }
    Ok((0..=n).map(|v| (((n - v) * (v + 1)) as f64).sqrt()).collect())
}

fn dd_target(n: usize, v: usize) -> Dd {
    dd_int(((n - v) * (v + 1)) as i64).sqrt()
}

/// The second interpolation branch `Σ_l μ_l* B^l b†`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedBranch {
    pub choice: DiagonalChoice,
    pub weight_a: f64,
    pub lambdas: Vec<Complex64>,
    lambdas_dd: Vec<DdComplex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Su2Rep {
    pub n: usize,
    pub j: f64,
    pub choice: DiagonalChoice,
    /// `λ_0 … λ_{n−1}` (the operator uses their conjugates).
    pub lambdas: Vec<Complex64>,
    pub extended: Option<ExtendedBranch>,
    pub j_plus: CMatrix,
    pub j_minus: CMatrix,
    pub j_z: CMatrix,
    lambdas_dd: Vec<DdComplex>,
}

fn check_nodes(n: usize, choice: DiagonalChoice) -> Result<Vec<DdComplex>, Su2Error> {
    let nodes: Vec<DdComplex> = (1..=n).map(|mu| choice.node(n, mu)).collect();
    for i in 0..nodes.len() {
        for k in i + 1..nodes.len() {
            let sep = (nodes[i] - nodes[k]).norm().to_f64();
            if sep <= NODE_SEPARATION {
                return Err(Su2Error::DegenerateNodes {
                    nu: i + 1,
                    nu_prime: k + 1,
                    separation: sep,
                });
            }
        }
    }
    Ok(nodes)
}

/// Monomial coefficients of the polynomial through `(x_i, y_i)`, via Newton divided differences.
fn interpolate(xs: &[DdComplex], ys: &[DdComplex]) -> Vec<DdComplex> {
    let m = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut poly = vec![DdComplex::ZERO; m];
    for k in (0..m).rev() {
        // poly ← poly·(x − x_k) + dd[k]
        let mut next = vec![DdComplex::ZERO; m];
        for l in 0..m {
            if l + 1 < m {
                next[l + 1] = next[l + 1] + poly[l];
            }
            next[l] = next[l] - poly[l] * xs[k];
        }
        next[0] = next[0] + dd[k];
        poly = next;
    }
    poly
}

fn horner(coeffs: &[DdComplex], x: DdComplex) -> DdComplex {
    coeffs.iter().rev().fold(DdComplex::ZERO, |acc, c| acc * x + *c)
}

/// `λ*` coefficients for one branch: `P(x_{ν+1}) · s(ν+1) = w · c₊(ν)`.
fn solve_branch(
    n: usize,
    choice: DiagonalChoice,
    weight: Dd,
    step: impl Fn(usize) -> DdComplex,
) -> Result<Vec<DdComplex>, Su2Error> {
    let nodes = check_nodes(n, choice)?;
    let ys: Vec<DdComplex> = (0..n)
        .map(|v| DdComplex::new(dd_target(n, v) * weight, Dd::ZERO) / step(v + 1))
        .collect();
    Ok(interpolate(&nodes, &ys))
}

fn sqrt_bracket(n: usize, mu: usize) -> DdComplex {
    dd_bracket(n, mu).sqrt()
}

fn assemble(
    n: usize,
    choice: DiagonalChoice,
    lambda_star: Vec<DdComplex>,
    extended: Option<(DiagonalChoice, f64, Vec<DdComplex>)>,
) -> Su2Rep {
    let mut j_plus = CMatrix::zeros(n + 1);
    for v in 0..n {
        let mut amp = horner(&lambda_star, choice.node(n, v + 1)) * sqrt_bracket(n, v + 1);
        if let Some((bc, _, mu)) = &extended {
            if !mu.is_empty() {
                amp = amp + horner(mu, bc.node(n, v + 1)) * sqrt_bracket(n, v + 1).conj();
            }
        }
        j_plus[(v + 1, v)] = amp.to_c64();
    }
    let j_minus = j_plus.adjoint();
    let j_z = CMatrix::from_real_diag((0..=n).map(|v| v as f64 - n as f64 / 2.0));
    let conj_all = |v: &[DdComplex]| v.iter().map(|c| c.conj()).collect::<Vec<_>>();
    let lambdas_dd = conj_all(&lambda_star);
    Su2Rep {
        n,
        j: n as f64 / 2.0,
        choice,
        lambdas: lambdas_dd.iter().map(|c| c.to_c64()).collect(),
        extended: extended.map(|(bc, w, mu)| {
            let mu_dd = conj_all(&mu);
            ExtendedBranch {
                choice: bc,
                weight_a: w,
                lambdas: mu_dd.iter().map(|c| c.to_c64()).collect(),
                lambdas_dd: mu_dd,
            }
        }),
        j_plus,
        j_minus,
        j_z,
        lambdas_dd,
    }
}

pub fn solve_representation(n: usize, choice: DiagonalChoice) -> Result<Su2Rep, Su2Error> {
    if n == 0 {
        return Err(Su2Error::InvalidN);
    }
    let lambda_star = solve_branch(n, choice, Dd::ONE, |mu| sqrt_bracket(n, mu))?;
    Ok(assemble(n, choice, lambda_star, None))
}

/// `J₊ = Σ_l λ_l* A^l a† + Σ_l μ_l* B^l b†`, with weight `w` of each `c₊(ν)`
/// carried by the `A` branch and `1 − w` by the `B` branch. A branch with zero
/// weight is dropped, so its nodes are not required to be distinct.
pub fn solve_extended(n: usize, choice_a: DiagonalChoice, choice_b: DiagonalChoice, weight: f64) -> Result<Su2Rep, Su2Error> {
    if n == 0 {
        return Err(Su2Error::InvalidN);
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(Su2Error::InvalidWeight(weight));
    }
    let wa = Dd::new(weight);
    let wb = Dd::ONE - wa;
    let lambda_star = if weight > 0.0 {
        solve_branch(n, choice_a, wa, |mu| sqrt_bracket(n, mu))?
    } else {
        Vec::new()
    };
    let mu_star = if weight < 1.0 {
        solve_branch(n, choice_b, wb, |mu| sqrt_bracket(n, mu).conj())?
    } else {
        Vec::new()
    };
    Ok(assemble(n, choice_a, lambda_star, Some((choice_b, weight, mu_star))))
}

impl Su2Rep {
    /// The same construction with `λ_index` shifted by `delta`.
    pub fn perturbed(&self, index: usize, delta: Complex64) -> Su2Rep {
        let mut lam = self.lambdas_dd.clone();
        lam[index] = lam[index] + DdComplex::from_c64(delta);
        let star = lam.iter().map(|c| c.conj()).collect();
        let ext = self.extended.as_ref().map(|e| {
            (
                e.choice,
                e.weight_a,
                e.lambdas_dd.iter().map(|c| c.conj()).collect(),
            )
        });
        assemble(self.n, self.choice, star, ext)
    }

    /// `max_ν |Σ_l λ_l* x_{ν+1}^l √⟨ν+1⟩ − c₊(ν)|` for a pure `A`-branch representation.
    pub fn interpolation_residual(&self) -> f64 {
        let star: Vec<DdComplex> = self.lambdas_dd.iter().map(|c| c.conj()).collect();
        (0..self.n)
            .map(|v| {
                let got = horner(&star, self.choice.node(self.n, v + 1)) * sqrt_bracket(self.n, v + 1);
                (got - DdComplex::new(dd_target(self.n, v), Dd::ZERO)).norm().to_f64()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Su2Residuals {
    /// `[J₊, J₋] − 2J_z`
    pub raise_lower: F17,
    /// `[J_z, J₊] − J₊`
    pub z_plus: F17,
    /// `[J_z, J₋] + J₋`
    pub z_minus: F17,
    /// `J_z² + (J₊J₋ + J₋J₊)/2 − j(j+1)`
    pub casimir: F17,
    pub double_sum: Option<F17>,
    pub pass: bool,
}

pub fn verify_representation(rep: &Su2Rep, tol: f64) -> Su2Residuals {
    let (jp, jm, jz) = (&rep.j_plus, &rep.j_minus, &rep.j_z);
    let raise_lower = (&jp.commutator(jm) - &jz.scale_real(2.0)).max_abs();
    let z_plus = (&jz.commutator(jp) - jp).max_abs();
    let z_minus = (&jz.commutator(jm) + jm).max_abs();
    let cas = &(jz * jz) + &(&(jp * jm) + &(jm * jp)).scale_real(0.5);
    let casimir = (&cas - &CMatrix::identity(rep.n + 1).scale_real(rep.j * (rep.j + 1.0))).max_abs();
    let double_sum = double_sum_residual(rep).ok();
    let pass = [raise_lower, z_plus, z_minus, casimir].iter().all(|r| *r <= tol) && double_sum.is_none_or(|r| r <= tol);
    Su2Residuals {
        raise_lower: F17(raise_lower),
        z_plus: F17(z_plus),
        z_minus: F17(z_minus),
        casimir: F17(casimir),
        double_sum: double_sum.map(F17),
        pass,
    }
}

/// Worst `|Σ_{l,q} λ_l* λ_q [|⟨ν⟩|(⟨ν⟩*)^q ⟨ν⟩^l − |⟨ν+1⟩|(⟨ν+1⟩*)^q ⟨ν+1⟩^l] − (2ν − n)|`
/// over `ν = 0 … n`, summed term by term.
pub fn double_sum_residual(rep: &Su2Rep) -> Result<f64, Su2Error> {
    if rep.choice != DiagonalChoice::AdagB || rep.extended.is_some() {
        return Err(Su2Error::WrongChoice(rep.choice.name()));
    }
    let n = rep.n;
    let lam = &rep.lambdas_dd;
    let term = |x: DdComplex, l: usize, q: usize| x.conj().powu(q as u32) * x.powu(l as u32);
    let mut worst: f64 = 0.0;
    for v in 0..=n {
        let x0 = dd_bracket(n, v);
        let x1 = dd_bracket(n, v + 1);
        let (m0, m1) = (x0.norm(), x1.norm());
        let mut sum = DdComplex::ZERO;
        for (l, ll) in lam.iter().enumerate() {
            for (q, lq) in lam.iter().enumerate() {
                let inner = term(x0, l, q).scale(m0) - term(x1, l, q).scale(m1);
                sum = sum + ll.conj() * *lq * inner;
            }
        }
        let target = DdComplex::new(dd_int(2 * v as i64 - n as i64), Dd::ZERO);
        worst = worst.max((sum - target).norm().to_f64());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct Su2Json {
    pub n: usize,
    pub j: F17,
    pub choice: DiagonalChoice,
    pub lambdas: Vec<C17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended: Option<ExtendedJson>,
    pub residuals: Su2Residuals,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendedJson {
    pub choice: DiagonalChoice,
    pub weight: F17,
    pub lambdas: Vec<C17>,
}

impl Su2Rep {
    pub fn to_json_value(&self, tol: f64) -> Su2Json {
        Su2Json {
            n: self.n,
            j: F17(self.j),
            choice: self.choice,
            lambdas: self.lambdas.iter().map(|z| C17(*z)).collect(),
            extended: self.extended.as_ref().map(|e| ExtendedJson {
                choice: e.choice,
                weight: F17(e.weight_a),
                lambdas: e.lambdas.iter().map(|z| C17(*z)).collect(),
            }),
            residuals: verify_representation(self, tol),
        }
    }
}

/// `[A, N]` and `[A†, N]` for the realized matrix.
pub fn commutes_with_num(choice: DiagonalChoice, n: usize) -> Result<f64, Su2Error> {
    let rep = build_rep(n)?;
    let a = choice.matrix(&rep);
    Ok(a.commutator(&rep.num).max_abs().max(a.adjoint().commutator(&rep.num).max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!(ladder_targets(1).unwrap(), vec![1.0, 0.0]);
        let t2 = ladder_targets(2).unwrap();
        assert!((t2[0] - 2f64.sqrt()).abs() < 1e-15 && (t2[1] - 2f64.sqrt()).abs() < 1e-15 && t2[2] == 0.0);
        for n in 1..=20 {
            let c = ladder_targets(n).unwrap();
            for v in 0..=n {
                let prev = if v == 0 { 0.0 } else { c[v - 1] * c[v - 1] };
                assert!((prev - c[v] * c[v] - (2.0 * v as f64 - n as f64)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spin_half() {
        for choice in DiagonalChoice::ALL {
            let r = solve_representation(1, choice).unwrap();
            let expected = CMatrix::from_rows(&[
                vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ]);
            assert!((&r.j_plus - &expected).max_abs() < 1e-15);
            assert_eq!(r.j_z.diag(), vec![Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)]);
            let v = verify_representation(&r, 1e-14);
            assert!(v.pass, "{v:?}");
        }
        let r = solve_representation(1, DiagonalChoice::AdagB).unwrap();
        assert!(double_sum_residual(&r).unwrap() < 1e-14);
    }

    #[test]
    fn n3_adag_b_nodes_distinct() {
        let r = solve_representation(3, DiagonalChoice::AdagB).unwrap();
        assert!(verify_representation(&r, 1e-12).pass);
        let nodes: Vec<Complex64> = (1..=3).map(|m| DiagonalChoice::AdagB.node(3, m).to_c64()).collect();
        let expected = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 1.0)];
        for (a, b) in nodes.iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn adag_a_collides_at_two() {
        match solve_representation(2, DiagonalChoice::AdagA) {
            Err(Su2Error::DegenerateNodes { nu, nu_prime, .. }) => assert_eq!((nu, nu_prime), (1, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_sum_needs_adag_b() {
        let r = solve_representation(3, DiagonalChoice::Num).unwrap();
        assert_eq!(double_sum_residual(&r), Err(Su2Error::WrongChoice("NUM")));
    }

    #[test]
    fn perturbation_is_detected() {
        let r = solve_representation(4, DiagonalChoice::Num).unwrap();
        let p = r.perturbed(0, Complex64::new(0.1, 0.0));
        let v = verify_representation(&p, 1e-9);
        assert!(!v.pass);
        assert!(v.raise_lower.0 >= 0.01);
    }

    #[test]
    fn extended_limits() {
        let a = solve_representation(3, DiagonalChoice::AdagB).unwrap();
        let e = solve_extended(3, DiagonalChoice::AdagB, DiagonalChoice::AdagA, 1.0).unwrap();
        assert!((&a.j_plus - &e.j_plus).max_abs() <= 1e-12);
        let b = solve_extended(3, DiagonalChoice::AdagA, DiagonalChoice::Num, 0.0).unwrap();
        assert!(verify_representation(&b, 1e-12).pass);
        let h = solve_extended(2, DiagonalChoice::Num, DiagonalChoice::Num, 0.5).unwrap();
        assert!(verify_representation(&h, 1e-10).pass);
        assert!(matches!(solve_extended(2, DiagonalChoice::Num, DiagonalChoice::Num, 1.5), Err(Su2Error::InvalidWeight(_))));
    }

    #[test]
    fn choices_commute_with_num() {
        for c in DiagonalChoice::ALL {
            for n in 1..=8 {
                assert!(commutes_with_num(c, n).unwrap() <= 1e-12);
            }
        }
    }
}
