mod common;

use cascade_core::dini::{
    dini_frame, dini_transform, planted_instance, solve_alpha, solve_beta, Ordering,
};
use cascade_core::lpdo::{FirstOrderOperator, LinearOperator};
use cascade_core::syntax::{parse_operator, var_list};
use cascade_core::Expr;
use common::{gen, names, poly, Gen};
use rand::Rng;

fn unit_field(g: &mut Gen, vars: &[String], lead: usize) -> FirstOrderOperator {
    let field = (0..3)
        .map(|i| match i.cmp(&lead) {
            std::cmp::Ordering::Less => Expr::zero(),
            std::cmp::Ordering::Equal => Expr::one(),
            std::cmp::Ordering::Greater => poly(g, vars, 1),
        })
        .collect();
    FirstOrderOperator::pure(vars.to_vec(), field)
}

fn random_operator(g: &mut Gen) -> LinearOperator {
    let vars = names(&["x", "y", "z"]);
    let (l1, l2) = (g.gen_range(0..2), 2 - g.gen_range(0..2));
    let s1 = unit_field(g, &vars, l1);
    let s2 = unit_field(g, &vars, l2);
    let t = FirstOrderOperator::new(
        vars.clone(),
        (0..3).map(|_| poly(g, &vars, 1)).collect(),
        poly(g, &vars, 1),
    );
    s1.to_operator().compose(&s2.to_operator()).add(&t.to_operator())
}

#[test]
fn frames_reconstruct_and_expand_commutators() {
    let mut frames = 0;
    for seed in 0..60 {
        let l = random_operator(&mut gen(seed));
        for ordering in [Ordering::Forward, Ordering::Swapped] {
            let Ok(f) = dini_frame(&l, ordering) else { continue };
            assert_eq!(f.reconstruct(), l, "seed {seed}");
            let (c1, c2) = f.commutator_residuals();
            assert!(c1.is_zero() && c2.is_zero(), "seed {seed}");
            frames += 1;
        }
    }
    assert!(frames > 40, "only {frames} generic frames");
}

#[test]
fn planted_steps_close_and_intertwine() {
    for seed in 10..20 {
        let p = planted_instance(seed);
        let f = p.frame().expect("planted frame");
        assert!(f.system_holds(&p.alpha, &p.beta), "seed {seed}");
        let planted = dini_transform(&f, &p.alpha, &p.beta).unwrap();
        assert!(planted.closure_residual(&f).is_zero(), "seed {seed}");
        assert!(planted.intertwining_residual(&f).is_zero(), "seed {seed}");
        let beta = solve_beta(&f, 2).into_iter().next().expect("beta");
        assert!(f.riccati_residual(&beta).is_zero());
        let alpha = solve_alpha(&f, &beta, 2).expect("alpha");
        let step = dini_transform(&f, &alpha, &beta).unwrap();
        assert!(step.intertwining_residual(&f).is_zero(), "seed {seed}");
    }
}

#[test]
fn example_operator_commutes_into_product() {
    let vars = var_list(&["x", "y", "z"]);
    let l = parse_operator("Dx*Dy + x*Dx*Dz - Dz", &vars).unwrap();
    let x2 = parse_operator("Dy + x*Dz", &vars).unwrap();
    let x1 = parse_operator("Dx", &vars).unwrap();
    let x3 = parse_operator("Dz", &vars).unwrap();
    assert_eq!(l, x2.compose(&x1).sub(&x3));
    assert_eq!(l, x1.compose(&x2).sub(&x3.scale(&Expr::int(2))));
    assert_eq!(x1.compose(&x2).sub(&x3), x2.compose(&x1));
}
