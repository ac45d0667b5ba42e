use gentile_core::rep::bracket_number;
use gentile_core::su2::{
    double_sum_residual, solve_extended, solve_representation, verify_representation, DiagonalChoice, Su2Error,
};

#[test]
fn solvable_choices_up_to_sixteen() {
    for n in 1..=16 {
        for choice in [DiagonalChoice::Num, DiagonalChoice::AdagB, DiagonalChoice::BdagA] {
            let r = solve_representation(n, choice).unwrap();
            let v = verify_representation(&r, 1e-9);
            assert!(v.pass, "n={n} {choice:?} {v:?}");
            assert!(r.interpolation_residual() <= 1e-10);
            let jz: Vec<f64> = r.j_z.diag().iter().map(|z| z.re).collect();
            let expected: Vec<f64> = (0..=n).map(|m| m as f64 - n as f64 / 2.0).collect();
            assert_eq!(jz, expected);
            assert_eq!((&r.j_minus - &r.j_plus.adjoint()).max_abs(), 0.0);
        }
        let r = solve_representation(n, DiagonalChoice::AdagB).unwrap();
        assert!(double_sum_residual(&r).unwrap() <= 1e-9, "n={n}");
    }
}

#[test]
fn adag_a_collides_symmetrically() {
    for n in 2..=16 {
        for v in 1..=n {
            let a = bracket_number(n, v).unwrap().norm();
            let b = bracket_number(n, n + 1 - v).unwrap().norm();
            assert!((a - b).abs() <= 1e-12);
        }
        match solve_representation(n, DiagonalChoice::AdagA) {
            Err(Su2Error::DegenerateNodes { nu, nu_prime, .. }) => assert_eq!(nu_prime, n + 1 - nu),
            other => panic!("n={n}: {other:?}"),
        }
    }
}

#[test]
fn a_adag_nodes_are_shifted_by_one() {
    // aa†|μ⟩ = |⟨μ+1⟩| |μ⟩, so the nodes on |1⟩…|n⟩ are |⟨2⟩| … |⟨n+1⟩| = 0:
    // distinct for n ≤ 3, colliding in pairs (μ, n−1−μ) from n = 4 on
    for n in 2..=3 {
        assert!(solve_representation(n, DiagonalChoice::AAdag).is_ok());
    }
    for n in 4..=16 {
        match solve_representation(n, DiagonalChoice::AAdag) {
            Err(Su2Error::DegenerateNodes { nu, nu_prime, .. }) => assert_eq!(nu + nu_prime, n - 1),
            other => panic!("n={n}: {other:?}"),
        }
    }
}

#[test]
fn extended_splits_verify() {
    for n in 1..=10 {
        for w in [0.0, 0.25, 0.5, 1.0] {
            let r = solve_extended(n, DiagonalChoice::Num, DiagonalChoice::AdagB, w).unwrap();
            assert!(verify_representation(&r, 1e-9).pass, "n={n} w={w}");
        }
    }
}
