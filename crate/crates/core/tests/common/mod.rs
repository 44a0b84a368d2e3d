//! Seeded generators shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cascade_core::lpdo::{FirstOrderOperator, LinearOperator};
use cascade_core::poly::rat2;
use cascade_core::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub fn gen(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn coeff(g: &mut Gen) -> Expr {
    let n = g.gen_range(-4..=4);
    let d = g.gen_range(1..=3);
    Expr::rational(rat2(n, d))
}

/// Random polynomial in `vars` of total degree at most `degree`.
pub fn poly(g: &mut Gen, vars: &[String], degree: u32) -> Expr {
    let mut p = Expr::zero();
    let terms = g.gen_range(1..=4);
    for _ in 0..terms {
        let mut m = coeff(g);
        let d = g.gen_range(0..=degree);
        for _ in 0..d {
            m = &m * &Expr::var(&vars[g.gen_range(0..vars.len())]);
        }
        p = &p + &m;
    }
    p
}

pub fn nonzero_poly(g: &mut Gen, vars: &[String], degree: u32) -> Expr {
    loop {
        let p = poly(g, vars, degree);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Quotient of random polynomials with numerator and denominator of
/// degree at most `degree`.
pub fn rational(g: &mut Gen, vars: &[String], degree: u32) -> Expr {
    let n = poly(g, vars, degree);
    if g.gen_bool(0.4) {
        return n;
    }
    let d = nonzero_poly(g, vars, degree);
    n.checked_div(&d).expect("nonzero denominator")
}

/// Rational expressions mixed with applications of `f`, `g` and
/// exponentials of linear forms.
pub fn mixed(g: &mut Gen, vars: &[String]) -> Expr {
    let mut e = rational(g, vars, 2);
    if g.gen_bool(0.5) {
        let arg = poly(g, vars, 2);
        let app = Expr::app("f", vec![arg]);
        e = &e + &(&poly(g, vars, 1) * &app);
    }
    if g.gen_bool(0.3) {
        let args = vec![poly(g, vars, 1), poly(g, vars, 1)];
        e = &e * &Expr::app("g", args);
    }
    if g.gen_bool(0.3) {
        e = &e + &Expr::exp(&poly(g, vars, 1));
    }
    e
}

/// Integrands of the kinds the antiderivative heuristic targets, plus
/// some it must leave unevaluated.
pub fn integrand(g: &mut Gen, vars: &[String]) -> Expr {
    let x = Expr::var(&vars[0]);
    match g.gen_range(0..5) {
        0 => poly(g, vars, 3),
        1 => {
            let lin = &(&x * &coeff(g)) + &poly(g, &vars[1..], 1);
            &poly(g, vars, 2) * &Expr::exp(&lin)
        }
        2 => {
            let r1 = poly(g, &vars[1..], 1);
            let r2 = poly(g, &vars[1..], 1);
            let den = &(&x - &r1) * &(&x - &r2);
            if den.is_zero() {
                return x;
            }
            poly(g, vars, 2).checked_div(&den).expect("nonzero")
        }
        3 => {
            let r = poly(g, &vars[1..], 1);
            let k = g.gen_range(1..=3);
            poly(g, vars, 1)
                .checked_div(&(&x - &r).pow(k).expect("power"))
                .unwrap_or_else(|_| x.clone())
        }
        _ => &poly(g, vars, 1) * &Expr::app("f", vec![poly(g, vars, 2)]),
    }
}

/// Operator of order at most `order` with polynomial coefficients.
pub fn operator(g: &mut Gen, vars: &[String], order: u32) -> LinearOperator {
    let n = vars.len();
    let mut terms = BTreeMap::new();
    for _ in 0..g.gen_range(1..=4) {
        let mut idx = vec![0u32; n];
        let o = g.gen_range(0..=order);
        for _ in 0..o {
            idx[g.gen_range(0..n)] += 1;
        }
        terms.insert(idx, poly(g, vars, 2));
    }
    LinearOperator::from_terms(vars.to_vec(), terms)
}

pub fn first_order(g: &mut Gen, vars: &[String], pure: bool) -> FirstOrderOperator {
    let field = vars.iter().map(|_| if g.gen_bool(0.7) { poly(g, vars, 1) } else { Expr::zero() }).collect();
    let zeroth = if pure { Expr::zero() } else { poly(g, vars, 1) };
    FirstOrderOperator::new(vars.to_vec(), field, zeroth)
}
