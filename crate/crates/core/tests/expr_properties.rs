mod common;

use cascade_core::integrate::integrate_heuristic;
use cascade_core::zero::{samples_vanish, zero_test, SampleConfig, ZeroStatus};
use cascade_core::Expr;
use common::*;
use rand::Rng;

#[test]
fn closed_antiderivatives_differentiate_back() {
    let vars = names(&["x", "y", "z"]);
    let mut closed = 0;
    for seed in 0..1000 {
        let mut g = gen(seed);
        let e = integrand(&mut g, &vars);
        let r = integrate_heuristic(&e, "x");
        if !r.has_quadrature() || e.has_quadrature() {
            closed += 1;
        }
        assert!((&r.diff("x") - &e).is_zero(), "seed {seed}: {e}");
    }
    assert!(closed > 600, "only {closed} closed forms");
}

#[test]
fn products_commute_and_sampling_agrees() {
    let vars = names(&["x", "y"]);
    let cfg = SampleConfig::default();
    for seed in 0..1000 {
        let mut g = gen(seed);
        let a = rational(&mut g, &vars, 2);
        let b = rational(&mut g, &vars, 2);
        assert!((&(&a * &b) - &(&b * &a)).is_zero(), "seed {seed}");
        let c = rational(&mut g, &vars, 2);
        let mut e = &(&a * &(&b + &c)) - &(&(&a * &b) + &(&a * &c));
        if g.gen_bool(0.5) {
            e = &e + &rational(&mut g, &vars, 1);
        }
        let symbolic = matches!(zero_test(&e, cfg), ZeroStatus::Zero);
        assert_eq!(samples_vanish(&e, cfg), symbolic, "seed {seed}: {e}");
    }
}

#[test]
fn mixed_partials_commute() {
    let vars = names(&["x", "y"]);
    for seed in 0..500 {
        let mut g = gen(seed);
        let e: Expr = mixed(&mut g, &vars);
        let xy = e.diff("x").diff("y");
        let yx = e.diff("y").diff("x");
        assert_eq!(xy, yx, "seed {seed}: {e}");
    }
}
