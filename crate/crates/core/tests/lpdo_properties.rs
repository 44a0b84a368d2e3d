mod common;

use cascade_core::lpdo::{
    commutator, factor_symbol, principal_symbol, product_symbol, solve_first_order_heuristic,
    CharacteristicsConfig, FirstOrderOperator, FirstOrderOutcome,
};
use cascade_core::Expr;
use common::*;

#[test]
fn composition_matches_application() {
    let vars = names(&["x", "y"]);
    for seed in 0..200 {
        let mut g = gen(seed);
        let a = operator(&mut g, &vars, 2);
        let b = operator(&mut g, &vars, 2);
        let u = mixed(&mut g, &vars);
        let lhs = a.compose(&b).apply(&u);
        let rhs = a.apply(&b.apply(&u));
        assert!((&lhs - &rhs).is_zero(), "seed {seed}");
    }
}

#[test]
fn composition_is_associative() {
    let vars = names(&["x", "y", "z"]);
    for seed in 0..100 {
        let mut g = gen(seed);
        let a = operator(&mut g, &vars, 2);
        let b = operator(&mut g, &vars, 2);
        let c = operator(&mut g, &vars, 2);
        assert_eq!(a.compose(&b.compose(&c)), a.compose(&b).compose(&c), "seed {seed}");
    }
}

#[test]
fn commutators_are_antisymmetric_and_symbols_multiply() {
    let vars = names(&["x", "y", "z"]);
    for seed in 0..200 {
        let mut g = gen(seed);
        let a = first_order(&mut g, &vars, false);
        let b = first_order(&mut g, &vars, false);
        assert!(commutator(&a, &b).add(&commutator(&b, &a)).is_zero(), "seed {seed}");
        let (pa, pb) = (a.vector_part(), b.vector_part());
        let ab = pa.to_operator().compose(&pb.to_operator());
        if ab.order() == 2 {
            let s = principal_symbol(&ab).unwrap();
            assert!(s.sub(&product_symbol(&pa, &pb)).is_zero(), "seed {seed}");
        }
    }
}

#[test]
fn symbol_factorization_round_trips() {
    let vars = names(&["x", "y", "z"]);
    let mut factored = 0;
    for seed in 0..200 {
        let mut g = gen(seed);
        let a = first_order(&mut g, &vars, true);
        let b = first_order(&mut g, &vars, true);
        let ab = a.to_operator().compose(&b.to_operator());
        if ab.order() != 2 {
            continue;
        }
        let s = principal_symbol(&ab).unwrap();
        if let Ok((s1, s2)) = factor_symbol(&s) {
            factored += 1;
            assert!(product_symbol(&s1, &s2).sub(&s).is_zero(), "seed {seed}");
        }
    }
    assert!(factored > 100, "only {factored} factored");
}

#[test]
fn first_order_solutions_round_trip() {
    let vars = names(&["x", "y"]);
    let cfg = CharacteristicsConfig::default();
    let mut solved = 0;
    for seed in 0..100 {
        let mut g = gen(seed);
        let field: Vec<Expr> = (0..2).map(|_| poly(&mut g, &vars, 1)).collect();
        let zeroth = if seed % 2 == 0 { Expr::zero() } else { poly(&mut g, &vars, 1) };
        let w = FirstOrderOperator::new(vars.clone(), field, zeroth);
        if !w.has_vector_part() {
            continue;
        }
        let rhs = if seed % 3 == 0 { poly(&mut g, &vars, 2) } else { Expr::zero() };
        if let FirstOrderOutcome::Solved(s) = solve_first_order_heuristic(&w, &rhs, &cfg) {
            solved += 1;
            let r = &w.apply(&s.general) - &rhs;
            assert!(r.is_zero(), "seed {seed}: {w} u = {rhs}, u = {}", s.general);
        }
    }
    assert!(solved > 20, "only {solved} solved");
}
