mod common;

use cascade_core::laplace::{
    form_with, gauge_transform, laplace_invariants, partial_factorization_residuals, run_chain,
    x1_transform, x2_transform, CharacteristicForm,
};
use cascade_core::lpdo::{FirstOrderOperator, LinearOperator};
use cascade_core::Expr;
use common::{gen, names, nonzero_poly, rational, Gen};

fn random_form(g: &mut Gen) -> CharacteristicForm {
    let vars = names(&["x", "y"]);
    let dx = FirstOrderOperator::coordinate(vars.clone(), 0);
    let dy = FirstOrderOperator::coordinate(vars.clone(), 1);
    let lower = FirstOrderOperator::new(
        vars.clone(),
        vec![rational(g, &vars, 2), rational(g, &vars, 2)],
        rational(g, &vars, 2),
    );
    let l = dx.to_operator().compose(&dy.to_operator()).add(&lower.to_operator());
    form_with(&l, &dx, &dy).unwrap()
}

fn example_one(n: i64) -> LinearOperator {
    let vars = names(&["x", "y"]);
    let s = &Expr::var("x") + &Expr::var("y");
    let c = Expr::int(-n * (n + 1)).checked_div(&(&s * &s)).unwrap();
    LinearOperator::derivation(vars.clone(), 0)
        .compose(&LinearOperator::derivation(vars, 1))
        .add_scalar(&c)
}

#[test]
fn partial_factorizations_and_transform_identities() {
    for seed in 0..50 {
        let f = random_form(&mut gen(seed));
        let (r1, r2) = partial_factorization_residuals(&f);
        assert!(r1.is_zero() && r2.is_zero(), "seed {seed}");
        let inv = laplace_invariants(&f);
        if !inv.h.is_zero() {
            let up = x1_transform(&f).unwrap();
            assert_eq!(laplace_invariants(&up).k, inv.h, "seed {seed}");
        }
        if !inv.k.is_zero() {
            let down = x2_transform(&f).unwrap();
            assert_eq!(laplace_invariants(&down).h, inv.k, "seed {seed}");
        }
    }
}

#[test]
fn reverse_transform_restores_invariants() {
    let mut checked = 0;
    for seed in 100..200 {
        let f = random_form(&mut gen(seed));
        let inv = laplace_invariants(&f);
        if inv.h.is_zero() {
            continue;
        }
        let back = x2_transform(&x1_transform(&f).unwrap()).unwrap();
        assert_eq!(laplace_invariants(&back), inv, "seed {seed}");
        checked += 1;
        if checked == 20 {
            break;
        }
    }
    assert_eq!(checked, 20);
}

#[test]
fn transformed_h_matches_closed_formula() {
    let mut checked = 0;
    for seed in 200..300 {
        let f = random_form(&mut gen(seed));
        let inv = laplace_invariants(&f);
        if inv.h.is_zero() {
            continue;
        }
        let h1 = laplace_invariants(&x1_transform(&f).unwrap()).h;
        let hy = inv.h.diff("y").checked_div(&inv.h).unwrap();
        let formula = &(&(&inv.h * &Expr::int(2)) - &inv.k) - &hy.diff("x");
        assert_eq!(h1, formula, "seed {seed}");
        checked += 1;
        if checked == 20 {
            break;
        }
    }
    assert_eq!(checked, 20);
}

#[test]
fn invariants_are_gauge_invariant() {
    let vars = names(&["x", "y"]);
    for seed in 300..320 {
        let mut g = gen(seed);
        let f = random_form(&mut g);
        let lambda = nonzero_poly(&mut g, &vars, 2);
        let gauged = gauge_transform(&f.operator, &lambda).unwrap();
        let gf = form_with(&gauged, &f.x1, &f.x2).unwrap();
        assert_eq!(laplace_invariants(&gf), laplace_invariants(&f), "seed {seed}");
    }
}

#[test]
fn example_one_chain_is_symmetric() {
    for n in 1..=4i64 {
        let r = run_chain(&example_one(n), 10).unwrap();
        assert_eq!((r.n, r.k), (Some(n as usize), Some(n as usize)));
        for i in 0..n {
            assert_eq!(r.h_at(i), r.h_at(-i - 1), "n {n}, i {i}");
        }
    }
}
