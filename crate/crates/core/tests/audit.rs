use gentile_core::audit::{
    audit_crosscheck, run_audit, run_matrix_suite, AuditConfig, AuditError, Catalog, Strategy, Verdict,
    DEFAULT_AUDIT_TOL, DEFAULT_SEED,
};
use gentile_core::rep::build_rep;

fn full() -> gentile_core::audit::AuditReport {
    run_audit(&Catalog::standard(), &AuditConfig::default()).unwrap()
}

#[test]
fn full_catalog_crosschecks() {
    let r = full();
    assert_eq!(r.entries.len(), Catalog::standard().len());
    assert!(audit_crosscheck(&r).unwrap());
    let fails: Vec<&str> = r.failures().map(|e| e.identity_id.as_str()).collect();
    assert_eq!(
        fails,
        vec!["A.uvwo.1", "B.phase.left", "B.sq.1", "B.sq.2", "B.arcsin", "B.arcsin.adag", "B.arcsin.b"],
        "{}",
        r.to_table()
    );
}

#[test]
fn free_spot_checks_pass_to_tolerance() {
    let r = full();
    for e in r.entries.iter().filter(|e| e.strategy == Strategy::Free && e.identity_id != "A.uvwo.1") {
        assert_eq!(e.n_tested, vec![1, 2, 3, 5, 8]);
        assert!(e.residual.0 <= 1e-9, "{} {}", e.identity_id, e.residual.0);
    }
}

#[test]
fn failing_ladder_relations_fail_at_every_n_from_two() {
    let r = run_matrix_suite(&Catalog::standard(), &[1, 2, 3, 4, 5, 6, 7, 8], 1, DEFAULT_AUDIT_TOL, DEFAULT_SEED).unwrap();
    for id in ["B.phase.left", "B.sq.1", "B.sq.2"] {
        let e = r.get(id).unwrap();
        for c in &e.checks {
            assert_eq!(c.residual.0 > 10.0 * DEFAULT_AUDIT_TOL, c.n >= 2, "{id} n={}", c.n);
        }
    }
    for id in ["B.phase.right", "B.nbr.1", "B.nbr.2", "B.nbr.3", "B.nbr.4", "B.adagk.1.3", "B.bk.1.3"] {
        assert_eq!(r.get(id).unwrap().verdict, Verdict::Pass, "{id}");
    }
}

#[test]
fn phase_left_residual_matches_dense_oracle() {
    // at n = 2 the residual of the left ordering is diagonal-shifted:
    // entry (ν−1, ν) = (ν−1) √⟨ν⟩ (q^{ν−1} − q^{ν−2})
    let cat = Catalog::standard();
    let r = gentile_core::audit::residual_matrix(cat.get("B.phase.left").unwrap(), 2).unwrap();
    let rep = build_rep(2).unwrap();
    let q = rep.q;
    let nu = 2usize;
    let expected = (nu as f64 - 1.0) * rep.bracket_numbers[nu].sqrt() * (q.powi(nu as i32 - 1) - q.powi(nu as i32 - 2));
    assert!((r[(nu - 1, nu)] - expected).norm() < 1e-12);
}

#[test]
fn sq_residual_is_large_at_two() {
    let r = full();
    let e = r.get("B.sq.1").unwrap();
    let at2 = e.checks.iter().find(|c| c.n == 2).unwrap();
    assert!(at2.residual.0 > 0.5);
    assert_eq!(e.residual_digest.as_deref(), Some("1 terms; lowest (-q + q^2) adag^2 b^2"));
}

#[test]
fn deterministic_json() {
    assert_eq!(full().to_json(), full().to_json());
}

#[test]
fn mutated_identity_never_passes_both_ways() {
    let text = Catalog::standard().to_text().replace(
        "II.self : [u, u]_n == (1 - q) u^2",
        "II.self : [u, u]_n == -(1 - q) u^2",
    );
    assert_ne!(text, Catalog::standard().to_text());
    let cat = Catalog::parse(&text).unwrap();
    let r = run_audit(&cat, &AuditConfig::default()).unwrap();
    let e = r.get("II.self").unwrap();
    let numeric_pass = e.checks.iter().all(|c| c.residual.0 <= DEFAULT_AUDIT_TOL);
    assert!(!(e.verdict == Verdict::Pass && numeric_pass));
    match audit_crosscheck(&r) {
        Ok(true) => assert_eq!(e.verdict, Verdict::Fail),
        Ok(false) => unreachable!(),
        Err(AuditError::InconsistentVerdict(id)) => assert_eq!(id, "II.self"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn mismatched_pipelines_are_reported() {
    let mut r = full();
    let e = r.entries.iter_mut().find(|e| e.identity_id == "B.def").unwrap();
    e.checks[0].residual.0 = 1.0;
    assert_eq!(
        audit_crosscheck(&r).unwrap_err(),
        AuditError::InconsistentVerdict("B.def".into())
    );
}
