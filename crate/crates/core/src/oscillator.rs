//! The intermediate-statistics oscillator `H = ¼[α a†b + β b a† + h.c.]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::eigen::{hermitian_eigen, EigenError};
use crate::json::{C17, F17};
use crate::laurent::root_of_unity;
use crate::matrix::CMatrix;
use crate::rep::{build_rep, diag_of_num, GentileRep, RepError};

/// Energies closer than this belong to the same level.
pub const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    #[error("n must be at least 1")]
    InvalidN,
    #[error("ν = {value} is outside 0..={max}")]
    OutOfRange { value: usize, max: usize },
    #[error("ν_max = {v_max} is not small against n = {n} (need ν_max ≤ n/100)")]
    PreconditionViolation { v_max: usize, n: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

impl From<RepError> for OscillatorError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::OutOfRange { value, max } => OscillatorError::OutOfRange { value, max },
            RepError::Eigen(e) => OscillatorError::Eigen(e),
            _ => OscillatorError::InvalidN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorSpec {
    pub n: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl OscillatorSpec {
    /// `α = 1`, `β = e^{−i2π/(n+1)}`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            alpha: Complex64::new(1.0, 0.0),
            beta: root_of_unity(-1, (n + 1) as i64),
        }
    }

    pub fn with_coefficients(n: usize, alpha: Complex64, beta: Complex64) -> Self {
        Self { n, alpha, beta }
    }

    pub fn is_default(&self) -> bool {
        let d = Self::new(self.n);
        self.alpha == d.alpha && self.beta == d.beta
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub value: F17,
    pub required: F17,
    pub holds: bool,
}

/// The limit constraints on the default coefficients: `Re α(∞) = Re β(∞) = Re α(1) = 1`, `Re β(1) = −1`.
pub fn default_constraints() -> Vec<ConstraintCheck> {
    // β(∞) = lim e^{−i2π/(n+1)} = 1
    let rows = [
        ("Re alpha(inf)", 1.0, 1.0),
        ("Re beta(inf)", 1.0, 1.0),
        ("Re alpha(1)", OscillatorSpec::new(1).alpha.re, 1.0),
        ("Re beta(1)", OscillatorSpec::new(1).beta.re, -1.0),
    ];
    rows.into_iter()
        .map(|(name, value, required)| ConstraintCheck {
            name,
            value: F17(value),
            required: F17(required),
            holds: value == required,
        })
        .collect()
}

pub fn build_hamiltonian(spec: &OscillatorSpec) -> Result<CMatrix, OscillatorError> {
    let rep = build_rep(spec.n)?;
    Ok(hamiltonian_in(&rep, spec.alpha, spec.beta))
}

fn hamiltonian_in(rep: &GentileRep, alpha: Complex64, beta: Complex64) -> CMatrix {
    let ab = &rep.a_dag * &rep.b;
    let ba = &rep.b * &rep.a_dag;
    let bda = &rep.b_dag * &rep.a;
    let abd = &rep.a * &rep.b_dag;
    let sum = &(&ab.scale(alpha) + &ba.scale(beta)) + &(&bda.scale(alpha.conj()) + &abd.scale(beta.conj()));
    sum.scale_real(0.25)
}

/// `E(ν) = ½ csc(π/(n+1)) [sin((2ν−1)π/(n+1)) + sin(2π/(n+1)) cos(π/(n+1))]`.
pub fn per_state_energy(n: usize, v: usize) -> Result<f64, OscillatorError> {
    if n == 0 {
        return Err(OscillatorError::InvalidN);
    }
    if v > n {
        return Err(OscillatorError::OutOfRange { value: v, max: n });
    }
    Ok(energy_formula(n as f64, v as f64))
}

fn energy_formula(n: f64, v: f64) -> f64 {
    let x = PI / (n + 1.0);
    0.5 / x.sin() * (((2.0 * v - 1.0) * x).sin() + (2.0 * x).sin() * x.cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseClass {
    #[serde(rename = "4t+1")]
    C1,
    #[serde(rename = "4t+2")]
    C2,
    #[serde(rename = "4t+3")]
    C3,
    #[serde(rename = "4t+4")]
    C4,
}

impl CaseClass {
    pub fn of(n: usize) -> (CaseClass, usize) {
        match n % 4 {
            1 => (CaseClass::C1, (n - 1) / 4),
            2 => (CaseClass::C2, (n - 2) / 4),
            3 => (CaseClass::C3, (n - 3) / 4),
            _ => (CaseClass::C4, (n - 4) / 4),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseClass::C1 => "4t+1",
            CaseClass::C2 => "4t+2",
            CaseClass::C3 => "4t+3",
            CaseClass::C4 => "4t+4",
        }
    }

    /// Number of levels stated for the case.
    pub fn stated_level_count(self, n: usize) -> usize {
        match self {
            CaseClass::C1 => (n + 3) / 2,
            CaseClass::C2 | CaseClass::C4 => n + 1,
            CaseClass::C3 => (n + 1) / 2,
        }
    }

    /// Multiplicity stated for level `k` of `count`.
    fn prose_multiplicity(self, k: usize, count: usize) -> usize {
        match self {
            CaseClass::C1 if k + 1 == count => 1,
            CaseClass::C1 | CaseClass::C3 => 2,
            CaseClass::C2 | CaseClass::C4 => 1,
        }
    }
}

/// `(k, E_k)` from the case formula for `n`.
pub fn case_formula_levels(n: usize) -> Vec<(usize, f64)> {
    let (case, _) = CaseClass::of(n);
    let nf = n as f64;
    let x = PI / (nf + 1.0);
    let base = x.cos().powi(2);
    let amp = 0.5 / x.sin();
    let (kmax, arg): (usize, Box<dyn Fn(f64) -> f64>) = match case {
        CaseClass::C1 => ((n + 1) / 2, Box::new(move |k| (4.0 * k - nf - 1.0) * PI / (2.0 * (nf + 1.0)))),
        CaseClass::C2 | CaseClass::C4 => (n, Box::new(move |k| (2.0 * k - nf) * PI / (2.0 * (nf + 1.0)))),
        CaseClass::C3 => ((n - 1) / 2, Box::new(move |k| (4.0 * k - nf + 1.0) * PI / (2.0 * (nf + 1.0)))),
    };
    (0..=kmax).map(|k| (k, base + amp * arg(k as f64).sin())).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Level {
    pub energy: F17,
    /// Number of Fock states whose energy lies within [`LEVEL_TOL`].
    pub multiplicity: usize,
    /// Case-formula indices producing this level.
    pub k: Vec<usize>,
    pub states: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub case_class: CaseClass,
    pub t: usize,
    pub levels: Vec<Level>,
    pub ground: F17,
    pub highest: F17,
    pub per_state_energies: Vec<F17>,
    pub level_count: usize,
    pub stated_level_count: usize,
    /// Fock states whose energy matches no case-formula level.
    pub unmatched_states: Vec<usize>,
    /// Differences between the computed multiplicities and the stated ones.
    pub discrepancies: Vec<String>,
}

impl SpectrumReport {
    pub fn multiplicity_sum(&self) -> usize {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    /// Level index of each state, `None` for unmatched states.
    pub fn level_of_state(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n + 1];
        for (i, l) in self.levels.iter().enumerate() {
            for &s in &l.states {
                out[s] = Some(i);
            }
        }
        out
    }

    /// `nu,energy,level_index,multiplicity` rows.
    pub fn csv_rows(&self) -> Vec<(usize, f64, Option<usize>, usize)> {
        let idx = self.level_of_state();
        (0..=self.n)
            .map(|v| {
                let mult = idx[v].map(|i| self.levels[i].multiplicity).unwrap_or(0);
                (v, self.per_state_energies[v].0, idx[v], mult)
            })
            .collect()
    }
}

/// Levels from the case formula with multiplicities counted from the per-state energies.
pub fn closed_form_spectrum(n: usize) -> Result<SpectrumReport, OscillatorError> {
    if n == 0 {
        return Err(OscillatorError::InvalidN);
    }
    let (case, t) = CaseClass::of(n);
    let per_state: Vec<f64> = (0..=n).map(|v| energy_formula(n as f64, v as f64)).collect();

    let mut raw = case_formula_levels(n);
    raw.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut levels: Vec<Level> = Vec::new();
    for (k, e) in raw {
        match levels.last_mut() {
            Some(l) if (e - l.energy.0).abs() <= LEVEL_TOL => l.k.push(k),
            _ => levels.push(Level {
                energy: F17(e),
                multiplicity: 0,
                k: vec![k],
                states: Vec::new(),
            }),
        }
    }
    let mut unmatched_states = Vec::new();
    for (v, &e) in per_state.iter().enumerate() {
        match levels.iter_mut().find(|l| (l.energy.0 - e).abs() <= LEVEL_TOL) {
            Some(l) => {
                l.multiplicity += 1;
                l.states.push(v);
            }
            None => unmatched_states.push(v),
        }
    }

    let mut discrepancies = Vec::new();
    let stated_level_count = case.stated_level_count(n);
    let level_count = levels.iter().filter(|l| l.multiplicity > 0).count();
    if level_count != stated_level_count {
        discrepancies.push(format!(
            "{level_count} populated levels, stated count is {stated_level_count}"
        ));
    }
    let prose_total: usize = (0..levels.len()).map(|k| case.prose_multiplicity(k, levels.len())).sum();
    for (k, l) in levels.iter().enumerate() {
        let stated = case.prose_multiplicity(k, levels.len());
        if l.multiplicity != stated {
            discrepancies.push(format!(
                "level {k} (E = {:.12}) has multiplicity {}, stated {stated}",
                l.energy.0, l.multiplicity
            ));
        }
    }
    if prose_total != n + 1 {
        discrepancies.push(format!("stated multiplicities sum to {prose_total}, there are {} states", n + 1));
    }
    if !unmatched_states.is_empty() {
        discrepancies.push(format!("states {unmatched_states:?} match no case-formula level"));
    }

    let populated = levels.iter().filter(|l| l.multiplicity > 0);
    let ground = populated.clone().map(|l| l.energy.0).fold(f64::INFINITY, f64::min);
    let highest = populated.map(|l| l.energy.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectrumReport {
        n,
        case_class: case,
        t,
        levels,
        ground: F17(ground),
        highest: F17(highest),
        per_state_energies: per_state.into_iter().map(F17).collect(),
        level_count,
        stated_level_count,
        unmatched_states,
        discrepancies,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumCrosscheck {
    pub n: usize,
    pub pass: bool,
    pub max_deviation: F17,
    pub eigenvalues: Vec<F17>,
}

/// Eigenvalues of `H` against the case-formula levels repeated by multiplicity.
pub fn spectrum_crosscheck(n: usize, tol: f64) -> Result<SpectrumCrosscheck, OscillatorError> {
    let h = build_hamiltonian(&OscillatorSpec::new(n))?;
    let eig = hermitian_eigen(&h, tol.max(1e-12))?;
    let report = closed_form_spectrum(n)?;
    let mut expected: Vec<f64> = report
        .levels
        .iter()
        .flat_map(|l| std::iter::repeat(l.energy.0).take(l.multiplicity))
        .collect();
    expected.sort_by(f64::total_cmp);
    let max_deviation = if expected.len() == eig.values.len() {
        expected
            .iter()
            .zip(&eig.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(SpectrumCrosscheck {
        n,
        pass: max_deviation <= tol,
        max_deviation: F17(max_deviation),
        eigenvalues: eig.values.into_iter().map(F17).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderResidual {
    pub relation: &'static str,
    pub residual: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub n: usize,
    pub residuals: Vec<LadderResidual>,
    pub pass: bool,
}

/// `[H, x]` against both printed orderings of the cosine factor for `x ∈ {a†, a, b†, b}`.
pub fn ladder_commutation_check(n: usize, tol: f64) -> Result<LadderReport, OscillatorError> {
    let rep = build_rep(n)?;
    let spec = OscillatorSpec::new(n);
    let h = hamiltonian_in(&rep, spec.alpha, spec.beta);
    let period = (n + 1) as i64;
    let cos_n = diag_of_num(&rep, |v| Complex64::new(root_of_unity(v as i64, period).re, 0.0));
    let cos_nm1 = diag_of_num(&rep, |v| Complex64::new(root_of_unity(v as i64 - 1, period).re, 0.0));
    let mut residuals = Vec::new();
    let mut push = |relation: &'static str, lhs: &CMatrix, rhs: CMatrix| {
        residuals.push(LadderResidual {
            relation,
            residual: F17((lhs - &rhs).max_abs()),
        });
    };
    let raising = [("adag", &rep.a_dag), ("bdag", &rep.b_dag)];
    for (name, x) in raising {
        let c = h.commutator(x);
        let (l, r) = match name {
            "adag" => ("[H,adag] = cos(2(N-1)pi/(n+1)) adag", "[H,adag] = adag cos(2N pi/(n+1))"),
            _ => ("[H,bdag] = cos(2(N-1)pi/(n+1)) bdag", "[H,bdag] = bdag cos(2N pi/(n+1))"),
        };
        push(l, &c, &cos_nm1 * x);
        push(r, &c, x * &cos_n);
    }
    let lowering = [("a", &rep.a), ("b", &rep.b)];
    for (name, x) in lowering {
        let c = h.commutator(x);
        let (l, r) = match name {
            "a" => ("[H,a] = -cos(2N pi/(n+1)) a", "[H,a] = -a cos(2(N-1)pi/(n+1))"),
            _ => ("[H,b] = -cos(2N pi/(n+1)) b", "[H,b] = -b cos(2(N-1)pi/(n+1))"),
        };
        push(l, &c, -&(&cos_n * x));
        push(r, &c, -&(x * &cos_nm1));
    }
    let pass = residuals.iter().all(|r| r.residual.0 <= tol);
    Ok(LadderReport { n, residuals, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoseLimit {
    pub n: usize,
    pub v_max: usize,
    /// `max_ν |E(ν) − (ν + ½)|`.
    pub deviation: F17,
    /// `max_ν |E(ν) − [πν/(n+1) cot(π/(n+1)) + ½ cos(2π/(n+1))]|`.
    pub approximation_deviation: F17,
}

pub fn bose_limit_check(n: usize, v_max: usize) -> Result<BoseLimit, OscillatorError> {
    if n == 0 {
        return Err(OscillatorError::InvalidN);
    }
    if v_max * 100 > n {
        return Err(OscillatorError::PreconditionViolation { v_max, n });
    }
    let x = PI / (n as f64 + 1.0);
    let mut dev: f64 = 0.0;
    let mut approx_dev: f64 = 0.0;
    for v in 0..=v_max {
        let e = energy_formula(n as f64, v as f64);
        let approx = v as f64 * x / x.tan() + 0.5 * (2.0 * x).cos();
        dev = dev.max((e - (v as f64 + 0.5)).abs());
        approx_dev = approx_dev.max((e - approx).abs());
    }
    Ok(BoseLimit {
        n,
        v_max,
        deviation: F17(dev),
        approximation_deviation: F17(approx_dev),
    })
}

/// Eigenvalues of `H` for arbitrary coefficients.
pub fn numeric_spectrum(spec: &OscillatorSpec, tol: f64) -> Result<Vec<f64>, OscillatorError> {
    let h = build_hamiltonian(spec)?;
    Ok(hermitian_eigen(&h, tol)?.values)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecJson {
    pub n: usize,
    pub alpha: C17,
    pub beta: C17,
}

impl From<&OscillatorSpec> for SpecJson {
    fn from(s: &OscillatorSpec) -> Self {
        SpecJson {
            n: s.n,
            alpha: C17(s.alpha),
            beta: C17(s.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_re(m: &CMatrix) -> Vec<f64> {
        m.diag().iter().map(|z| z.re).collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn hamiltonian_examples() {
        let h1 = build_hamiltonian(&OscillatorSpec::new(1)).unwrap();
        assert_eq!(diag_re(&h1), vec![-0.5, 0.5]);
        assert_eq!(h1.off_diagonal_max(), 0.0);
        let h2 = build_hamiltonian(&OscillatorSpec::new(2)).unwrap();
        assert!(close(&diag_re(&h2), &[-0.25, 0.75, 0.25], 1e-14));
        let h3 = build_hamiltonian(&OscillatorSpec::new(3)).unwrap();
        assert!(close(&diag_re(&h3), &[0.0, 1.0, 1.0, 0.0], 1e-14));
        for n in 1..=20 {
            let h = build_hamiltonian(&OscillatorSpec::new(n)).unwrap();
            assert!(h.hermitian_defect() <= 1e-14);
            assert!(h.off_diagonal_max() <= 1e-14);
        }
    }

    #[test]
    fn energy_examples() {
        assert!((per_state_energy(1, 0).unwrap() + 0.5).abs() < 1e-15);
        assert!((per_state_energy(5, 2).unwrap() - 1.75).abs() < 1e-14);
        assert!(per_state_energy(3, 0).unwrap().abs() < 1e-15);
        assert_eq!(per_state_energy(3, 4), Err(OscillatorError::OutOfRange { value: 4, max: 3 }));
    }

    #[test]
    fn spectrum_examples() {
        let s1 = closed_form_spectrum(1).unwrap();
        let got: Vec<(f64, usize)> = s1.levels.iter().map(|l| (l.energy.0, l.multiplicity)).collect();
        assert!((got[0].0 + 0.5).abs() < 1e-15 && got[0].1 == 1);
        assert!((got[1].0 - 0.5).abs() < 1e-15 && got[1].1 == 1);

        let s3 = closed_form_spectrum(3).unwrap();
        assert_eq!(s3.case_class, CaseClass::C3);
        let m: Vec<usize> = s3.levels.iter().map(|l| l.multiplicity).collect();
        assert_eq!(m, vec![2, 2]);
        assert_eq!(s3.stated_level_count, 2);

        let s5 = closed_form_spectrum(5).unwrap();
        let e: Vec<f64> = s5.levels.iter().map(|l| l.energy.0).collect();
        assert!(close(&e, &[-0.25, 0.25, 1.25, 1.75], 1e-13));
        let m: Vec<usize> = s5.levels.iter().map(|l| l.multiplicity).collect();
        assert_eq!(m, vec![1, 2, 2, 1]);
        assert!(!s5.discrepancies.is_empty());
        assert_eq!(s5.multiplicity_sum(), 6);

        let s4 = closed_form_spectrum(4).unwrap();
        assert_eq!(s4.case_class, CaseClass::C4);
        assert!(s4.discrepancies.is_empty(), "{:?}", s4.discrepancies);
    }

    #[test]
    fn crosscheck_examples() {
        assert!(spectrum_crosscheck(2, 1e-12).unwrap().pass);
        assert!(spectrum_crosscheck(4, 1e-12).unwrap().pass);
        assert!(spectrum_crosscheck(24, 1e-10).unwrap().pass);
    }

    #[test]
    fn ladder_examples() {
        for n in [1, 2, 7] {
            let r = ladder_commutation_check(n, 1e-12).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.residuals.len(), 8);
        }
    }

    #[test]
    fn bose_limit_examples() {
        let b = bose_limit_check(10_000, 10).unwrap();
        assert!(b.deviation.0 <= 1e-3);
        let b = bose_limit_check(1_000_000, 10).unwrap();
        assert!(b.deviation.0 <= 1e-5);
        assert!(matches!(bose_limit_check(500, 10), Err(OscillatorError::PreconditionViolation { .. })));
        let b = bose_limit_check(1_000_000, 0).unwrap();
        assert!((b.deviation.0) < 1e-10);
    }

    #[test]
    fn constraints_hold_for_defaults() {
        assert!(default_constraints().iter().all(|c| c.holds));
    }
}
