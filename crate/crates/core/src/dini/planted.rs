//! Operators built backward from a chosen transformation, so that an
//! admissible `β` is known in advance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::linalg::monomials_up_to;
use crate::lpdo::{frame_determinant, FirstOrderOperator, LinearOperator};

use super::frame::{dini_frame, DiniFrame, Ordering};

#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub operator: LinearOperator,
    pub s1: FirstOrderOperator,
    pub s2: FirstOrderOperator,
    /// Gauge potential; the planted `β` is `S₂(φ)`.
    pub phi: Expr,
    pub beta: Expr,
    pub alpha: Expr,
}

impl PlantedInstance {
    /// The frame whose factors are the planted `S₁`, `S₂`.
    pub fn frame(&self) -> Option<DiniFrame> {
        [Ordering::Forward, Ordering::Swapped]
            .into_iter()
            .filter_map(|o| dini_frame(&self.operator, o).ok())
            .find(|f| f.s1 == self.s1 && f.s2 == self.s2)
    }
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &[String], degree: u32, density: f64) -> Expr {
    let mut p = Expr::zero();
    for m in monomials_up_to(vars, degree) {
        if rng.gen_bool(density) {
            let c: i64 = rng.gen_range(-3..=3);
            p = &p + &(&m * &Expr::int(c));
        }
    }
    p
}

/// `S₂ = D_j`, `S₁ = D_k + s·D_m` with `s` depending on `x_j`,
/// `S₂ + β = e^{−φ}∘D_j∘e^{φ}` and `V + b = e^{−φ}∘(V₀ + c)∘e^{φ}` with
/// `V₀`, `c` free of `x_j`; then `T = V + βS₁ + αS₂` and
/// `a = b + αβ + S₁(β)`.
pub fn planted_instance(seed: u64) -> PlantedInstance {
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let j = rng.gen_range(0..3);
        let others: Vec<usize> = (0..3).filter(|&i| i != j).collect();
        let (k, m) = (others[0], others[1]);
        let xj = Expr::var(&vars[j]);
        let rest: Vec<String> = others.iter().map(|&i| vars[i].clone()).collect();
        let s = &(&xj * &Expr::int(rng.gen_range(1..=2))) + &random_poly(&mut rng, &rest, 1, 0.5);
        let mut field = vec![Expr::zero(); 3];
        field[k] = Expr::one();
        field[m] = s;
        let s1 = FirstOrderOperator::pure(vars.clone(), field);
        let s2 = FirstOrderOperator::coordinate(vars.clone(), j);
        let phi = &(&xj * &random_poly(&mut rng, &vars, 2, 0.4)) + &random_poly(&mut rng, &rest, 2, 0.4);
        let beta = s2.derive(&phi);
        let alpha = random_poly(&mut rng, &vars, 2, 0.3);
        let v0 = FirstOrderOperator::pure(
            vars.clone(),
            (0..3).map(|_| random_poly(&mut rng, &rest, 1, 0.6)).collect(),
        );
        let c = random_poly(&mut rng, &rest, 1, 0.5);
        if beta.is_zero() {
            continue;
        }
        let b = &v0.derive(&phi) + &c;
        let t = v0.add(&s1.scale(&beta)).add(&s2.scale(&alpha));
        if frame_determinant(&[s1.clone(), s2.clone(), t.clone()]).is_zero() {
            continue;
        }
        let a = &(&b + &(&alpha * &beta)) + &s1.derive(&beta);
        let operator = s1
            .to_operator()
            .compose(&s2.to_operator())
            .add(&t.with_zeroth(a).to_operator());
        let inst = PlantedInstance {
            operator,
            s1,
            s2,
            phi,
            beta,
            alpha,
        };
        if inst.frame().is_some() {
            return inst;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_pair_satisfies_the_system() {
        for seed in 0..5 {
            let p = planted_instance(seed);
            let f = p.frame().unwrap();
            assert!(f.riccati_residual(&p.beta).is_zero(), "seed {seed}");
            assert!(f.system_holds(&p.alpha, &p.beta), "seed {seed}");
        }
    }

    #[test]
    fn search_finds_an_admissible_pair() {
        use crate::dini::{dini_transform, solve_alpha, solve_beta};
        for seed in 0..10 {
            let p = planted_instance(seed);
            let f = p.frame().unwrap();
            let betas = solve_beta(&f, 2);
            assert!(!betas.is_empty(), "seed {seed}: {}", p.operator);
            let beta = &betas[0];
            let alpha = solve_alpha(&f, beta, 2).unwrap_or_else(|| panic!("seed {seed}"));
            let step = dini_transform(&f, &alpha, beta).unwrap();
            assert!(step.intertwining_residual(&f).is_zero());
            assert!(betas.contains(&p.beta), "seed {seed}");
        }
    }
}
