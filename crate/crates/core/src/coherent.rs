//! Coherent states over the generalized Grassmann module `|ν⟩ ψ^k`, with
//! `ψ^{n+1} = 0` and `ψ |ν⟩ = λ(ν, n) |ν⟩ ψ`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::json::{C17, F17};
use crate::laurent::root_of_unity;
use crate::matrix::CMatrix;
use crate::rep::{bracket_number, build_rep, RepError};

/// Tolerance for the eigenstate and move-relation contracts.
pub const COHERENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoherentError {
    #[error("n must be at least 1")]
    InvalidN,
    #[error("index {value} is outside 0..={max}")]
    OutOfRange { value: usize, max: usize },
    #[error("invalid λ table: {0}")]
    InvalidLambda(String),
    #[error("no printed closed form for a custom λ table")]
    NoClosedForm,
}

impl From<RepError> for CoherentError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::OutOfRange { value, max } => CoherentError::OutOfRange { value, max },
            _ => CoherentError::InvalidN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaChoice {
    RootOfUnityPlus,
    RootOfUnityMinus,
    Alternating,
    /// `λ(0,n) … λ(n,n)`.
    Custom(Vec<Complex64>),
}

impl LambdaChoice {
    pub fn name(&self) -> &'static str {
        match self {
            LambdaChoice::RootOfUnityPlus => "ROOT_OF_UNITY_PLUS",
            LambdaChoice::RootOfUnityMinus => "ROOT_OF_UNITY_MINUS",
            LambdaChoice::Alternating => "ALTERNATING",
            LambdaChoice::Custom(_) => "CUSTOM",
        }
    }

    pub fn from_name(s: &str) -> Option<LambdaChoice> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "ROOT_OF_UNITY_PLUS" | "PLUS" => Some(LambdaChoice::RootOfUnityPlus),
            "ROOT_OF_UNITY_MINUS" | "MINUS" => Some(LambdaChoice::RootOfUnityMinus),
            "ALTERNATING" => Some(LambdaChoice::Alternating),
            _ => None,
        }
    }

    fn validate(&self, n: usize) -> Result<(), CoherentError> {
        if let LambdaChoice::Custom(t) = self {
            if t.len() != n + 1 {
                return Err(CoherentError::InvalidLambda(format!("expected {} values, got {}", n + 1, t.len())));
            }
            if t[0] == Complex64::new(0.0, 0.0) {
                return Err(CoherentError::InvalidLambda("λ(0, n) must be nonzero".into()));
            }
            if t.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(CoherentError::InvalidLambda("non-finite entry".into()));
            }
        }
        Ok(())
    }
}

pub fn lambda_value(choice: &LambdaChoice, v: usize, n: usize) -> Result<Complex64, CoherentError> {
    if n == 0 {
        return Err(CoherentError::InvalidN);
    }
    if v > n {
        return Err(CoherentError::OutOfRange { value: v, max: n });
    }
    choice.validate(n)?;
    let period = (n + 1) as i64;
    Ok(match choice {
        LambdaChoice::RootOfUnityPlus => root_of_unity(v as i64, period),
        LambdaChoice::RootOfUnityMinus => root_of_unity(-(v as i64), period),
        LambdaChoice::Alternating => Complex64::new(if v % 2 == 0 { 1.0 } else { -1.0 }, 0.0),
        LambdaChoice::Custom(t) => t[v],
    })
}

/// Element `Σ c(ν, k) |ν⟩ ψ^k`; `coeffs[(ν, k)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement {
    pub n: usize,
    pub coeffs: CMatrix,
}

impl GrassmannElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: CMatrix::zeros(n + 1),
        }
    }

    pub fn basis(n: usize, nu: usize, k: usize) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[(nu, k)] = Complex64::new(1.0, 0.0);
        e
    }

    /// An operator acting on the ket index.
    pub fn apply(&self, op: &CMatrix) -> Self {
        Self {
            n: self.n,
            coeffs: op * &self.coeffs,
        }
    }

    /// Left multiplication by `ψ`; `ψ^{n+1}` terms are dropped.
    pub fn psi(&self, lambda: &[Complex64]) -> Self {
        let mut out = Self::zero(self.n);
        for nu in 0..=self.n {
            for k in 0..self.n {
                out.coeffs[(nu, k + 1)] = lambda[nu] * self.coeffs[(nu, k)];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.coeffs - &other.coeffs).max_abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentState {
    pub n: usize,
    pub lambda: LambdaChoice,
    pub lambda_values: Vec<Complex64>,
    /// `δ(0,n) … δ(n,n)`.
    pub delta: Vec<Complex64>,
    pub element: GrassmannElement,
}

fn lambda_table(n: usize, choice: &LambdaChoice) -> Result<Vec<Complex64>, CoherentError> {
    (0..=n).map(|v| lambda_value(choice, v, n)).collect()
}

/// `δ(ν+1) = δ(ν) λ(ν) / √⟨ν+1⟩`, `δ(0) = 1`.
pub fn build_coherent(n: usize, choice: LambdaChoice) -> Result<CoherentState, CoherentError> {
    let lambda_values = lambda_table(n, &choice)?;
    let mut delta = vec![Complex64::new(1.0, 0.0)];
    for v in 0..n {
        let root = bracket_number(n, v + 1)?.sqrt();
        delta.push(delta[v] * lambda_values[v] / root);
    }
    let mut element = GrassmannElement::zero(n);
    for (v, d) in delta.iter().enumerate() {
        element.coeffs[(v, v)] = *d;
    }
    Ok(CoherentState {
        n,
        lambda: choice,
        lambda_values,
        delta,
        element,
    })
}

/// `max |b|ψ⟩ − ψ|ψ⟩|` over module coefficients.
pub fn eigenstate_residual(state: &CoherentState) -> f64 {
    let n = state.n;
    let mut lowered = GrassmannElement::zero(n);
    for v in 1..=n {
        let root = bracket_number(n, v).expect("ν ≤ n").sqrt();
        for k in 0..=n {
            lowered.coeffs[(v - 1, k)] = root * state.element.coeffs[(v, k)];
        }
    }
    lowered.max_abs_diff(&state.element.psi(&state.lambda_values))
}

/// The printed closed form for `δ(ν, n)`, principal square roots throughout.
pub fn closed_form_delta(n: usize, choice: &LambdaChoice, v: usize) -> Result<Complex64, CoherentError> {
    if n == 0 {
        return Err(CoherentError::InvalidN);
    }
    if v > n {
        return Err(CoherentError::OutOfRange { value: v, max: n });
    }
    let period = (n + 1) as i64;
    let vv = v as i64;
    // e^{±iπν(ν−1)/(n+1)} = q^{±ν(ν−1)/2}, and ν(ν−1) is even
    let prefactor = match choice {
        LambdaChoice::RootOfUnityPlus => root_of_unity(vv * (vv - 1) / 2, period),
        LambdaChoice::RootOfUnityMinus => root_of_unity(-vv * (vv - 1) / 2, period),
        LambdaChoice::Alternating => Complex64::new(if (vv * (vv - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 }, 0.0),
        LambdaChoice::Custom(_) => return Err(CoherentError::NoClosedForm),
    };
    let one = Complex64::new(1.0, 0.0);
    let base = one - root_of_unity(1, period);
    let numerator = (base.ln() * (v as f64 / 2.0)).exp();
    let denominator: Complex64 = (1..=vv).map(|j| (one - root_of_unity(j, period)).sqrt()).product();
    Ok(prefactor * numerator / denominator)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DeltaRelation {
    Equal,
    Negated,
    Different,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaComparison {
    pub nu: usize,
    pub recursion: C17,
    pub closed_form: C17,
    pub relation: DeltaRelation,
}

/// Recursion value of `δ(ν)` against the printed closed form, per `ν`.
pub fn compare_delta(state: &CoherentState) -> Result<Vec<DeltaComparison>, CoherentError> {
    (0..=state.n)
        .map(|v| {
            let r = state.delta[v];
            let c = closed_form_delta(state.n, &state.lambda, v)?;
            let relation = if (r - c).norm() <= COHERENT_TOL {
                DeltaRelation::Equal
            } else if (r + c).norm() <= COHERENT_TOL {
                DeltaRelation::Negated
            } else {
                DeltaRelation::Different
            };
            Ok(DeltaComparison {
                nu: v,
                recursion: C17(r),
                closed_form: C17(c),
                relation,
            })
        })
        .collect()
}

/// Coefficients of `(ψ̄ψ)^m` inside the normalization bracket: `[1, |δ(1)|², …, |δ(n)|²]`.
pub fn normalization_poly(state: &CoherentState) -> Vec<f64> {
    state.delta.iter().map(|d| d.norm_sqr()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MoveResidual {
    pub relation: String,
    pub residual: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct MoveRelationReport {
    pub n: usize,
    pub lambda_variant: &'static str,
    pub power: usize,
    pub residuals: Vec<MoveResidual>,
    pub pass: bool,
}

/// The four relations moving `ψ` past `(b†)^p`, `(a†)^p`, `b^p`, `a^p`,
/// checked on every basis element of the module.
pub fn move_relation_check(n: usize, choice: LambdaChoice, power: usize) -> Result<MoveRelationReport, CoherentError> {
    let lam = lambda_table(n, &choice)?;
    if power > n {
        return Err(CoherentError::OutOfRange { value: power, max: n });
    }
    let rep = build_rep(n)?;
    let ratio = lam[power] / lam[0];
    let ops = [
        ("psi bdag^p", rep.b_dag.pow(power as u32), true),
        ("psi adag^p", rep.a_dag.pow(power as u32), true),
        ("b^p psi", rep.b.pow(power as u32), false),
        ("a^p psi", rep.a.pow(power as u32), false),
    ];
    let mut residuals = Vec::new();
    for (name, op, psi_first_on_left) in ops {
        let mut worst: f64 = 0.0;
        for nu in 0..=n {
            for k in 0..=n {
                let e = GrassmannElement::basis(n, nu, k);
                let (lhs, rhs) = if psi_first_on_left {
                    // ψ X  vs  ratio · X ψ
                    (e.apply(&op).psi(&lam), e.psi(&lam).apply(&op.scale(ratio)))
                } else {
                    // X ψ  vs  ratio · ψ X
                    (e.psi(&lam).apply(&op), e.apply(&op.scale(ratio)).psi(&lam))
                };
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
        residuals.push(MoveResidual {
            relation: name.to_string(),
            residual: F17(worst),
        });
    }
    let pass = residuals.iter().all(|r| r.residual.0 <= COHERENT_TOL);
    Ok(MoveRelationReport {
        n,
        lambda_variant: choice.name(),
        power,
        residuals,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherentJson {
    pub n: usize,
    pub lambda_variant: &'static str,
    pub lambda: Vec<C17>,
    pub delta: Vec<C17>,
    pub normalization_poly: Vec<F17>,
    pub eigenstate_residual: F17,
}

impl CoherentState {
    pub fn to_json_value(&self) -> CoherentJson {
        CoherentJson {
            n: self.n,
            lambda_variant: self.lambda.name(),
            lambda: self.lambda_values.iter().map(|z| C17(*z)).collect(),
            delta: self.delta.iter().map(|z| C17(*z)).collect(),
            normalization_poly: normalization_poly(self).into_iter().map(F17).collect(),
            eigenstate_residual: F17(eigenstate_residual(self)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_value(&LambdaChoice::Alternating, 1, 1).unwrap(), c(-1.0, 0.0));
        assert_eq!(lambda_value(&LambdaChoice::RootOfUnityPlus, 1, 3).unwrap(), c(0.0, 1.0));
        assert_eq!(lambda_value(&LambdaChoice::RootOfUnityMinus, 1, 3).unwrap(), c(0.0, -1.0));
        for ch in [LambdaChoice::RootOfUnityPlus, LambdaChoice::RootOfUnityMinus, LambdaChoice::Alternating] {
            assert_eq!(lambda_value(&ch, 0, 4).unwrap(), c(1.0, 0.0));
        }
        assert_eq!(
            lambda_value(&LambdaChoice::Alternating, 3, 2),
            Err(CoherentError::OutOfRange { value: 3, max: 2 })
        );
        let bad = LambdaChoice::Custom(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(build_coherent(1, bad), Err(CoherentError::InvalidLambda(_))));
    }

    #[test]
    fn fermi_case() {
        let s = build_coherent(1, LambdaChoice::Alternating).unwrap();
        assert_eq!(s.delta, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(eigenstate_residual(&s), 0.0);
        assert_eq!(normalization_poly(&s), vec![1.0, 1.0]);
    }

    #[test]
    fn n3_plus_second_delta() {
        let s = build_coherent(3, LambdaChoice::RootOfUnityPlus).unwrap();
        let expected = c(0.0, 1.0) / c(1.0, 1.0).sqrt();
        assert!((s.delta[2] - expected).norm() < 1e-14);
        let poly = normalization_poly(&s);
        assert_eq!(poly[0], 1.0);
        assert!((poly[1] - 1.0).abs() < 1e-15);
        assert!((poly[2] - 1.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_small_cases() {
        for n in 1..=6 {
            for ch in [LambdaChoice::RootOfUnityPlus, LambdaChoice::Alternating] {
                assert_eq!(closed_form_delta(n, &ch, 0).unwrap(), c(1.0, 0.0));
                assert!((closed_form_delta(n, &ch, 1).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
            }
        }
        let s = build_coherent(3, LambdaChoice::RootOfUnityPlus).unwrap();
        let cmp = compare_delta(&s).unwrap();
        assert_ne!(cmp[2].relation, DeltaRelation::Different);
        assert_eq!(closed_form_delta(3, &LambdaChoice::Custom(vec![]), 1), Err(CoherentError::NoClosedForm));
    }

    #[test]
    fn move_relations() {
        let r = move_relation_check(1, LambdaChoice::Alternating, 1).unwrap();
        assert!(r.pass, "{r:?}");
        let r = move_relation_check(4, LambdaChoice::RootOfUnityPlus, 0).unwrap();
        assert!(r.residuals.iter().all(|x| x.residual.0 == 0.0));
        assert!(move_relation_check(2, LambdaChoice::Alternating, 3).is_err());
    }

    #[test]
    fn truncation_at_top() {
        let n = 3;
        let top = GrassmannElement::basis(n, n, n);
        let lam = lambda_table(n, &LambdaChoice::RootOfUnityPlus).unwrap();
        assert_eq!(top.psi(&lam).coeffs.max_abs(), 0.0);
    }
}
