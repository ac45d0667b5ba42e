//! Identity audit: every catalog entry is checked symbolically where an exact
//! rewriting exists and numerically in matrix representations, and the two
//! verdicts are compared.

mod catalog;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{standard_catalog_text, Catalog, CatalogError, IdentityEntry, Specialization, Strategy};

use crate::json::F17;
use crate::matrix::{max_abs_diff, CMatrix};
use crate::rep::{build_rep, GentileRep, RepError};
use crate::symbolic::{expand_free, ket_eval, matrix_eval, quotient_check, EvalError, ExpandError, MatrixEnv, QuotientPoly};

/// Residual threshold used when none is given.
pub const DEFAULT_AUDIT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0;
/// Dimension of the random matrices substituted for free generators.
pub const SPOT_CHECK_DIM: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("identity `{id}`: {source}")]
    Expand {
        id: String,
        #[source]
        source: ExpandError,
    },
    #[error("identity `{id}`: {source}")]
    Eval {
        id: String,
        #[source]
        source: EvalError,
    },
    #[error("identity `{0}`: symbolic and numeric verdicts disagree")]
    InconsistentVerdict(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// No symbolic check applies and no numeric instance was run.
    Untested,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Untested => "UNTESTED",
        }
    }
}

/// One numeric evaluation of `lhs − rhs` at a given `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericCheck {
    pub n: usize,
    /// Largest entry of the residual over all trials.
    pub residual: F17,
    /// Gap between the residual and an independent evaluation of it: the
    /// ket-by-ket evaluator for MATRIX entries, the representation of the
    /// symbolic residual for QUOTIENT entries.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_gap: Option<F17>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub identity_id: String,
    pub strategy: Strategy,
    pub specialization: Specialization,
    pub denominator_cleared: bool,
    pub degenerate_at: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub symbolic_verdict: Option<Verdict>,
    /// Largest numeric residual (zero when no numeric instance ran).
    pub residual: F17,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual_digest: Option<String>,
    pub n_tested: Vec<usize>,
    pub checks: Vec<NumericCheck>,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub tol: F17,
    pub trials: usize,
    pub n_values: Vec<usize>,
    pub entries: Vec<EntryReport>,
}

impl AuditReport {
    pub fn get(&self, id: &str) -> Option<&EntryReport> {
        self.entries.iter().find(|e| e.identity_id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryReport> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit report serializes")
    }

    /// Fixed-width text table, one row per identity.
    pub fn to_table(&self) -> String {
        let w = self.entries.iter().map(|e| e.identity_id.len()).max().unwrap_or(2).max(2);
        let mut s = format!("{:<w$}  {:<8}  {:<12}  {:<8}  {:>11}  n\n", "id", "strategy", "q", "verdict", "residual");
        for e in &self.entries {
            let ns: Vec<String> = e.n_tested.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(
                s,
                "{:<w$}  {:<8}  {:<12}  {:<8}  {:>11.3e}  {}",
                e.identity_id,
                strategy_name(e.strategy),
                specialization_name(e.specialization),
                e.verdict.as_str(),
                e.residual.0,
                ns.join(",")
            );
        }
        s
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Free => "FREE",
        Strategy::Quotient => "QUOTIENT",
        Strategy::Matrix => "MATRIX",
    }
}

pub fn specialization_name(s: Specialization) -> &'static str {
    match s {
        Specialization::FormalQ => "FORMAL_Q",
        Specialization::QAtN => "Q_AT_N",
        Specialization::QEq1 => "Q_EQ_1",
        Specialization::QEqMinus1 => "Q_EQ_MINUS_1",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConfig {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            n_values: vec![1, 2, 3, 5, 8],
            trials: 3,
            tol: DEFAULT_AUDIT_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the random matrices of one identity at one `n`.
pub fn entry_seed(seed: u64, id: &str, n: usize) -> u64 {
    splitmix(seed ^ splitmix(fnv1a(id) ^ splitmix(n as u64)))
}

/// Matrix with independent entries uniform on the complex unit disk.
pub fn random_unit_disk_matrix(dim: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| {
        let r = rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        Complex64::from_polar(r, t)
    })
}

struct Symbolic {
    verdict: Verdict,
    digest: String,
    quotient: Option<QuotientPoly>,
}

fn symbolic(entry: &IdentityEntry) -> Result<Option<Symbolic>, AuditError> {
    let expand = |source| AuditError::Expand {
        id: entry.id.clone(),
        source,
    };
    match entry.strategy {
        Strategy::Free => {
            let mut p = expand_free(&entry.residual_expr()).map_err(expand)?;
            if let Some(v) = entry.specialization.value() {
                p = p.specialize(&v);
            }
            Ok(Some(Symbolic {
                verdict: Verdict::from_bool(p.is_zero()),
                digest: p.digest(),
                quotient: None,
            }))
        }
        Strategy::Quotient => {
            let c = quotient_check(&entry.lhs, &entry.rhs).map_err(expand)?;
            Ok(Some(Symbolic {
                verdict: Verdict::from_bool(c.holds),
                digest: c.residual.digest(),
                quotient: Some(c.residual),
            }))
        }
        Strategy::Matrix => Ok(None),
    }
}

fn spot_q(entry: &IdentityEntry, rep: &GentileRep) -> Complex64 {
    match entry.specialization {
        Specialization::QEq1 => Complex64::new(1.0, 0.0),
        Specialization::QEqMinus1 => Complex64::new(-1.0, 0.0),
        _ => rep.q,
    }
}

fn numeric(
    entry: &IdentityEntry,
    rep: &GentileRep,
    trials: usize,
    seed: u64,
    quotient: Option<&QuotientPoly>,
) -> Result<NumericCheck, AuditError> {
    let ev = |source| AuditError::Eval {
        id: entry.id.clone(),
        source,
    };
    let residual_expr = entry.residual_expr();
    let n = rep.n;
    match entry.strategy {
        Strategy::Free => {
            let mut rng = ChaCha8Rng::seed_from_u64(entry_seed(seed, &entry.id, n));
            let gens: Vec<_> = residual_expr.generators().into_iter().collect();
            let q = spot_q(entry, rep);
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let mats: BTreeMap<_, _> = gens
                    .iter()
                    .map(|g| (*g, random_unit_disk_matrix(SPOT_CHECK_DIM, &mut rng)))
                    .collect();
                let env = MatrixEnv::new(SPOT_CHECK_DIM, q, mats);
                let r = matrix_eval(&residual_expr, &env).map_err(ev)?;
                worst = worst.max(r.max_abs());
            }
            Ok(NumericCheck {
                n,
                residual: F17(worst),
                oracle_gap: None,
            })
        }
        Strategy::Quotient | Strategy::Matrix => {
            let env = MatrixEnv::from_rep(rep);
            let r = matrix_eval(&residual_expr, &env).map_err(ev)?;
            let other = match quotient {
                Some(p) => p.eval(rep),
                None => ket_eval(&residual_expr, n).map_err(ev)?,
            };
            let gap = max_abs_diff(&r, &other).expect("same dimension");
            Ok(NumericCheck {
                n,
                residual: F17(r.max_abs()),
                oracle_gap: Some(F17(gap)),
            })
        }
    }
}

fn audit_entry(
    entry: &IdentityEntry,
    reps: &[GentileRep],
    cfg: &AuditConfig,
    with_symbolic: bool,
) -> Result<EntryReport, AuditError> {
    let start = Instant::now();
    let sym = if with_symbolic { symbolic(entry)? } else { None };
    let mut checks = Vec::new();
    for rep in reps {
        checks.push(numeric(entry, rep, cfg.trials, cfg.seed, sym.as_ref().and_then(|s| s.quotient.as_ref()))?);
    }
    let residual = checks.iter().map(|c| c.residual.0).fold(0.0, f64::max);
    let numeric_verdict = (!checks.is_empty()).then(|| Verdict::from_bool(checks.iter().all(|c| c.residual.0 <= cfg.tol)));
    let symbolic_verdict = sym.as_ref().map(|s| s.verdict);
    let verdict = symbolic_verdict.or(numeric_verdict).unwrap_or(Verdict::Untested);
    Ok(EntryReport {
        identity_id: entry.id.clone(),
        strategy: entry.strategy,
        specialization: entry.specialization,
        denominator_cleared: entry.denominator_cleared(),
        degenerate_at: entry.degenerate_at(),
        verdict,
        symbolic_verdict,
        residual: F17(residual),
        residual_digest: sym.map(|s| s.digest),
        n_tested: checks.iter().map(|c| c.n).collect(),
        checks,
        seed: cfg.seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn build_reps(n_values: &[usize]) -> Result<Vec<GentileRep>, AuditError> {
    n_values.iter().map(|&n| build_rep(n).map_err(AuditError::from)).collect()
}

fn run_filtered(
    catalog: &Catalog,
    cfg: &AuditConfig,
    with_symbolic: bool,
    keep: impl Fn(&IdentityEntry) -> bool,
) -> Result<AuditReport, AuditError> {
    let reps = build_reps(&cfg.n_values)?;
    let entries = catalog
        .entries
        .iter()
        .filter(|e| keep(e))
        .map(|e| audit_entry(e, &reps, cfg, with_symbolic))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AuditReport {
        seed: cfg.seed,
        tol: F17(cfg.tol),
        trials: cfg.trials,
        n_values: cfg.n_values.clone(),
        entries,
    })
}

fn symbolic_only() -> AuditConfig {
    AuditConfig {
        n_values: Vec::new(),
        trials: 0,
        ..AuditConfig::default()
    }
}

/// Free identities over formal `q`.
pub fn run_free_suite(catalog: &Catalog) -> AuditReport {
    run_filtered(catalog, &symbolic_only(), true, |e| {
        e.strategy == Strategy::Free && e.specialization == Specialization::FormalQ
    })
    .expect("symbolic expansion of catalog entries cannot fail")
}

/// Free identities specialized at `q = 1` and `q = −1`.
pub fn run_limit_suite(catalog: &Catalog) -> AuditReport {
    run_filtered(catalog, &symbolic_only(), true, |e| {
        matches!(e.specialization, Specialization::QEq1 | Specialization::QEqMinus1)
    })
    .expect("symbolic expansion of catalog entries cannot fail")
}

/// Numeric evaluation of every entry; ladder identities in the representation
/// at each `n`, free identities with random matrices.
pub fn run_matrix_suite(
    catalog: &Catalog,
    n_values: &[usize],
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<AuditReport, AuditError> {
    let cfg = AuditConfig {
        n_values: n_values.to_vec(),
        trials,
        tol,
        seed,
    };
    run_filtered(catalog, &cfg, false, |_| true)
}

/// Symbolic and numeric checks together, one report row per catalog entry.
pub fn run_audit(catalog: &Catalog, cfg: &AuditConfig) -> Result<AuditReport, AuditError> {
    run_filtered(catalog, cfg, true, |_| true)
}

/// Symbolic verdicts must agree with every numeric check: a PASS needs every
/// residual within `tol`, a FAIL needs some residual above `10·tol`. Oracle
/// gaps above `tol` are disagreements as well.
pub fn audit_crosscheck(report: &AuditReport) -> Result<bool, AuditError> {
    let tol = report.tol.0;
    for e in &report.entries {
        let bad = || AuditError::InconsistentVerdict(e.identity_id.clone());
        if e.checks.iter().any(|c| c.oracle_gap.is_some_and(|g| !(g.0 <= tol))) {
            return Err(bad());
        }
        if e.checks.is_empty() {
            continue;
        }
        match e.symbolic_verdict {
            Some(Verdict::Pass) if e.checks.iter().any(|c| !(c.residual.0 <= tol)) => return Err(bad()),
            Some(Verdict::Fail) if !e.checks.iter().any(|c| c.residual.0 > 10.0 * tol) => return Err(bad()),
            _ => {}
        }
    }
    Ok(true)
}

/// Convenience for residual-expression evaluation in the representation at `n`.
pub fn residual_matrix(entry: &IdentityEntry, n: usize) -> Result<CMatrix, AuditError> {
    let rep = build_rep(n)?;
    let env = MatrixEnv::from_rep(&rep);
    matrix_eval(&entry.residual_expr(), &env).map_err(|source| AuditError::Eval {
        id: entry.id.clone(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_suite_verdicts() {
        let cat = Catalog::standard();
        let r = run_free_suite(&cat);
        let fails: Vec<&str> = r.failures().map(|e| e.identity_id.as_str()).collect();
        assert_eq!(fails, vec!["A.uvwo.1"]);
        for id in ["II.self", "II.twofold.jacobi", "II.perm.3.1", "II.perm.3.2", "II.perm.4.2"] {
            assert_eq!(r.get(id).unwrap().verdict, Verdict::Pass, "{id}");
        }
    }

    #[test]
    fn limit_suite_all_pass() {
        let r = run_limit_suite(&Catalog::standard());
        assert!(!r.entries.is_empty());
        assert_eq!(r.failures().count(), 0);
    }

    #[test]
    fn empty_n_values_is_vacuous() {
        let cat = Catalog::parse("B.x : [b, adag]_n == 1\nM.x : narcsin() == N").unwrap();
        let r = run_audit(
            &cat,
            &AuditConfig {
                n_values: vec![],
                ..AuditConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.get("M.x").unwrap().verdict, Verdict::Untested);
        assert!(audit_crosscheck(&r).unwrap());
    }

    #[test]
    fn seeds_differ_per_entry_and_n() {
        assert_ne!(entry_seed(1, "a", 2), entry_seed(1, "a", 3));
        assert_ne!(entry_seed(1, "a", 2), entry_seed(1, "b", 2));
        assert_eq!(entry_seed(1, "a", 2), entry_seed(1, "a", 2));
    }

    #[test]
    fn unit_disk_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_unit_disk_matrix(5, &mut rng);
        assert!(m.max_abs() <= 1.0);
    }
}
