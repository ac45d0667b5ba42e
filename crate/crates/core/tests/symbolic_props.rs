use std::collections::BTreeMap;

use gentile_core::matrix::max_abs_diff;
use gentile_core::rep::build_rep;
use gentile_core::symbolic::{
    expand_free, matrix_eval, normal_order, parse, Expr, Gen, MatrixEnv,
};
use gentile_core::LaurentScalar;
use num_complex::Complex64;
use proptest::prelude::*;

fn free_gen() -> impl Strategy<Value = Expr> {
    prop_oneof![Just(Gen::Free(0)), Just(Gen::Free(1)), Just(Gen::Free(2))].prop_map(Expr::gen)
}

fn free_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        free_gen(),
        (-3i64..4).prop_map(Expr::int),
        (-2i32..3).prop_map(|k| Expr::scalar(LaurentScalar::q_pow(k))),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::product(vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::bracket(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::comm(a, b)),
            (inner, 0u32..3).prop_map(|(a, e)| a.pow(e)),
        ]
    })
}

fn quotient_word() -> impl Strategy<Value = Vec<Gen>> {
    prop::collection::vec(prop_oneof![Just(Gen::Adag), Just(Gen::B), Just(Gen::N)], 0..=8)
}

fn word_expr(w: &[Gen]) -> Expr {
    if w.is_empty() {
        Expr::int(1)
    } else {
        Expr::product(w.iter().map(|g| Expr::gen(*g)).collect())
    }
}

fn random_env(seed: u64) -> MatrixEnv {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gens: BTreeMap<Gen, _> = (0..3)
        .map(|i| {
            let m = gentile_core::CMatrix::from_fn(3, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            (Gen::Free(i), m)
        })
        .collect();
    MatrixEnv::new(3, Complex64::from_polar(1.0, 0.7), gens)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn expansion_is_a_ring_homomorphism(a in free_expr(), b in free_expr()) {
        let (pa, pb) = (expand_free(&a).unwrap(), expand_free(&b).unwrap());
        prop_assert_eq!(expand_free(&Expr::product(vec![a.clone(), b.clone()])).unwrap(), pa.mul(&pb));
        prop_assert_eq!(expand_free(&Expr::add(a.clone(), b.clone())).unwrap(), pa.add(&pb));
        prop_assert_eq!(expand_free(&Expr::sub(a, b)).unwrap(), pa.sub(&pb));
    }

    #[test]
    fn expansion_agrees_with_direct_evaluation(a in free_expr(), seed in 0u64..1000) {
        let env = random_env(seed);
        let direct = matrix_eval(&a, &env).unwrap();
        let p = expand_free(&a).unwrap();
        let via = p.eval(3, env.q(), &|g| matrix_eval(&Expr::gen(g), &env).unwrap());
        let scale = direct.max_abs().max(1.0);
        prop_assert!(max_abs_diff(&direct, &via).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn display_round_trips(a in free_expr()) {
        let back = parse(&a.to_string()).unwrap();
        prop_assert_eq!(expand_free(&back).unwrap(), expand_free(&a).unwrap());
    }

    #[test]
    fn normal_form_is_confluent(u in quotient_word(), v in quotient_word()) {
        // reducing the halves first and multiplying normal forms must land on
        // the same normal form as reducing the concatenation
        let mut uv = u.clone();
        uv.extend(v.iter().copied());
        let whole = normal_order(&word_expr(&uv)).unwrap();
        let split = normal_order(&word_expr(&u)).unwrap().mul(&normal_order(&word_expr(&v)).unwrap());
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn normal_form_matches_representation(w in quotient_word(), n in 1usize..=8) {
        let rep = build_rep(n).unwrap();
        let env = MatrixEnv::from_rep(&rep);
        let dense = matrix_eval(&word_expr(&w), &env).unwrap();
        let nf = normal_order(&word_expr(&w)).unwrap().eval(&rep);
        let scale = dense.max_abs().max(1.0);
        prop_assert!(max_abs_diff(&dense, &nf).unwrap() <= 1e-9 * scale);
    }
}
