//! General solutions of first-order equations `Σ b_i D_i u + b_0 u = f` by
//! straightening the vector field along polynomial or monomial-denominator
//! rational invariants.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::expr::Expr;
use crate::integrate::integrate_heuristic;
use crate::linalg::{collect_linear, generic_poly, instantiate, monomials_up_to, nullspace, rank_expr};
use crate::lpdo::FirstOrderOperator;
use crate::poly::Atom;

#[derive(Clone, Debug)]
pub struct CharacteristicsConfig {
    /// Largest total degree tried for polynomial invariants.
    pub degree_bound: u32,
    /// Also look for invariants `P/m` with `m` a monomial.
    pub rational_invariants: bool,
    /// Name of the arbitrary function in the homogeneous solution.
    pub function_name: String,
}

impl Default for CharacteristicsConfig {
    fn default() -> Self {
        CharacteristicsConfig {
            degree_bound: 3,
            rational_invariants: true,
            function_name: "F".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FirstOrderSolution {
    /// Functionally independent first integrals of the vector field.
    pub invariants: Vec<Expr>,
    /// Integrating factor `μ`; the homogeneous solution is `F(invariants)/μ`.
    pub integrating_factor: Expr,
    pub homogeneous: Expr,
    pub particular: Expr,
    pub general: Expr,
}

/// Characteristic system `dx_i/dt = b_i`, `du/dt = f − b_0 u`, reported
/// when the field cannot be straightened.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedSystem {
    pub rates: Vec<(String, String)>,
    pub source: String,
    pub damping: String,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub enum FirstOrderOutcome {
    Solved(FirstOrderSolution),
    Unsupported(ReducedSystem),
}

impl FirstOrderOutcome {
    pub fn solution(&self) -> Option<&FirstOrderSolution> {
        match self {
            FirstOrderOutcome::Solved(s) => Some(s),
            FirstOrderOutcome::Unsupported(_) => None,
        }
    }
}

fn gradient(e: &Expr, vars: &[String]) -> Vec<Expr> {
    vars.iter().map(|v| e.diff(v)).collect()
}

fn normalize_invariant(e: &Expr) -> Expr {
    let lc = e.leading_coeff();
    e.scale(&(crate::poly::rat(1) / lc))
}

/// Adds candidates that are functionally independent of those chosen.
fn select_independent(chosen: &mut Vec<Expr>, candidates: Vec<Expr>, vars: &[String], want: usize) {
    for c in candidates {
        if chosen.len() == want {
            return;
        }
        let mut rows: Vec<Vec<Expr>> = chosen.iter().map(|e| gradient(e, vars)).collect();
        rows.push(gradient(&c, vars));
        if rank_expr(rows) == chosen.len() + 1 {
            chosen.push(normalize_invariant(&c));
        }
    }
}

/// Candidates `P` of exact degree `d` (no constant term) with `W(P) = 0`.
fn polynomial_candidates(w: &FirstOrderOperator, d: u32) -> Vec<Expr> {
    let monos: Vec<Expr> = monomials_up_to(&w.vars, d).into_iter().skip(1).collect();
    let (p, names) = generic_poly(&monos, "_c");
    let eq = w.derive(&p);
    let Some((rows, _)) = collect_linear(&[eq], &names) else {
        return vec![];
    };
    let mut ns = nullspace(&rows, names.len());
    // Prefer candidates with few terms.
    ns.sort_by_key(|v| v.iter().filter(|c| !num_traits::Zero::is_zero(*c)).count());
    ns.into_iter().map(|v| instantiate(&p, &names, &v)).collect()
}

/// Candidates `P/m` with `m` a single variable power.
fn rational_candidates(w: &FirstOrderOperator, d: u32) -> Vec<Expr> {
    let mut out = Vec::new();
    let monos: Vec<Expr> = monomials_up_to(&w.vars, d).into_iter().skip(1).collect();
    for v in &w.vars {
        for k in 1..=d {
            let q = Expr::var(v).pow(k as i32).expect("positive power");
            let (p, names) = generic_poly(&monos, "_c");
            let eq = &(&w.derive(&p) * &q) - &(&p * &w.derive(&q));
            let Some((rows, _)) = collect_linear(&[eq], &names) else {
                continue;
            };
            for sol in nullspace(&rows, names.len()) {
                let cand = instantiate(&p, &names, &sol).checked_div(&q).expect("nonzero");
                if !cand.is_polynomial() {
                    out.push(cand);
                }
            }
        }
    }
    out
}

/// Up to `n − 1` independent invariants of the vector field of `w`.
pub fn find_invariants(w: &FirstOrderOperator, cfg: &CharacteristicsConfig) -> Vec<Expr> {
    let vars = &w.vars;
    let want = vars.len() - 1;
    let nonzero: Vec<usize> = (0..vars.len()).filter(|&i| !w.field[i].is_zero()).collect();
    if nonzero.len() == 1 {
        return (0..vars.len())
            .filter(|&i| i != nonzero[0])
            .map(|i| Expr::var(&vars[i]))
            .collect();
    }
    let mut chosen = Vec::new();
    for d in 1..=cfg.degree_bound {
        select_independent(&mut chosen, polynomial_candidates(w, d), vars, want);
        if chosen.len() == want {
            return chosen;
        }
    }
    if cfg.rational_invariants {
        for d in 1..=cfg.degree_bound {
            select_independent(&mut chosen, rational_candidates(w, d), vars, want);
            if chosen.len() == want {
                return chosen;
            }
        }
    }
    chosen
}

fn param_name(m: usize) -> String {
    format!("_s{m}")
}

/// Expresses the variables other than `vars[j]` through the invariants.
/// Invariants that are plain variables keep their names; the others are
/// replaced by parameters `_s{m}`.
fn straighten(
    invariants: &[Expr],
    vars: &[String],
    j: usize,
) -> Option<(BTreeMap<String, Expr>, BTreeMap<String, Expr>)> {
    let mut solved: BTreeMap<String, Expr> = BTreeMap::new();
    let mut params: BTreeMap<String, Expr> = BTreeMap::new();
    let mut pending: Vec<Expr> = Vec::new();
    for (m, inv) in invariants.iter().enumerate() {
        let as_var = inv
            .atoms()
            .into_iter()
            .next()
            .filter(|_| inv.atoms().len() == 1 && inv.is_polynomial() && inv.num().len() == 1)
            .and_then(|a| a.as_var().map(str::to_string))
            .filter(|v| inv == &Expr::var(v));
        match as_var {
            Some(v) if v != vars[j] => {
                solved.insert(v.clone(), Expr::var(&v));
            }
            _ => {
                let p = param_name(m);
                params.insert(p.clone(), inv.clone());
                pending.push(inv - &Expr::var(&p));
            }
        }
    }
    let unknowns: BTreeSet<String> = vars
        .iter()
        .enumerate()
        .filter(|(i, v)| *i != j && !solved.contains_key(*v))
        .map(|(_, v)| v.clone())
        .collect();
    let mut unknowns: Vec<String> = unknowns.into_iter().collect();
    while !pending.is_empty() {
        let mut progress = false;
        for idx in 0..pending.len() {
            let eq = pending[idx].subst_vars(&solved).ok()?;
            let pick = unknowns.iter().position(|u| {
                let a = Atom::var(u);
                eq.depends_on(u)
                    && eq.num().degree_in(&a) == 1
                    && !eq.den().depends_on(u)
                    && eq.atoms().iter().all(|at| *at == a || !at.depends_on(u))
            });
            if let Some(k) = pick {
                let u = unknowns.remove(k);
                let (coeffs, rest) = eq.linear_coefficients(&[Atom::var(&u)])?;
                let value = (-&rest).checked_div(&coeffs[0]).ok()?;
                for s in solved.values_mut() {
                    *s = s.subst_var(&u, &value).ok()?;
                }
                solved.insert(u, value);
                pending.remove(idx);
                progress = true;
                break;
            }
        }
        if !progress {
            return None;
        }
    }
    if !unknowns.is_empty() {
        return None;
    }
    Some((solved, params))
}

fn reduced(w: &FirstOrderOperator, rhs: &Expr, reason: &str) -> FirstOrderOutcome {
    FirstOrderOutcome::Unsupported(ReducedSystem {
        rates: w
            .vars
            .iter()
            .zip(&w.field)
            .map(|(v, b)| (v.clone(), b.to_string()))
            .collect(),
        source: rhs.to_string(),
        damping: w.zeroth.to_string(),
        reason: reason.into(),
    })
}

/// General solution of `W u = rhs` when the characteristics of `W` can be
/// straightened; otherwise the reduced characteristic system.
pub fn solve_first_order_heuristic(
    w: &FirstOrderOperator,
    rhs: &Expr,
    cfg: &CharacteristicsConfig,
) -> FirstOrderOutcome {
    if !w.has_vector_part() {
        return reduced(w, rhs, "operator has no vector-field part");
    }
    let vars = &w.vars;
    let invariants = find_invariants(w, cfg);
    if invariants.len() + 1 != vars.len() {
        return reduced(w, rhs, "no complete set of invariants within the degree bound");
    }
    // Integrate along the variable with the simplest nonzero coefficient.
    let mut order: Vec<usize> = (0..vars.len()).filter(|&i| !w.field[i].is_zero()).collect();
    order.sort_by_key(|&i| (w.field[i].as_rational().is_none(), i));
    let Some((j, solved, params)) = order
        .iter()
        .find_map(|&j| straighten(&invariants, vars, j).map(|(s, p)| (j, s, p)))
    else {
        return reduced(w, rhs, "invariants cannot be solved for the characteristic coordinates");
    };
    let xj = &vars[j];
    let to_chart = |e: &Expr| e.subst_vars(&solved);
    let bj = &w.field[j];
    let (beta, source) = match (
        w.zeroth.checked_div(bj).and_then(|b| to_chart(&b)),
        rhs.checked_div(bj).and_then(|f| to_chart(&f)),
    ) {
        (Ok(b), Ok(f)) => (b, f),
        _ => return reduced(w, rhs, "coordinate change failed"),
    };
    let mu = Expr::exp(&integrate_heuristic(&beta, xj));
    let inner = integrate_heuristic(&(&mu * &source), xj);
    let particular = inner.checked_div(&mu).expect("exponential is nonzero");
    let back = |e: &Expr| e.subst_vars(&params).ok();
    let (Some(mu), Some(particular)) = (back(&mu), back(&particular)) else {
        return reduced(w, rhs, "could not return to the original coordinates");
    };
    let homogeneous = Expr::app(&cfg.function_name, invariants.clone())
        .checked_div(&mu)
        .expect("exponential is nonzero");
    let general = &particular + &homogeneous;
    FirstOrderOutcome::Solved(FirstOrderSolution {
        invariants,
        integrating_factor: mu,
        homogeneous,
        particular,
        general,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_operator, var_list};

    fn fo(s: &str) -> FirstOrderOperator {
        let op = parse_operator(s, &var_list(&["x", "y", "z"])).unwrap();
        FirstOrderOperator::from_operator(&op).unwrap()
    }

    fn solve(w: &str, rhs: &str, cfg: &CharacteristicsConfig) -> FirstOrderOutcome {
        let rhs = parse_expr(rhs, &var_list(&["x", "y", "z"])).unwrap();
        solve_first_order_heuristic(&fo(w), &rhs, cfg)
    }

    #[test]
    fn coordinate_field() {
        let out = solve("Dx", "0", &CharacteristicsConfig::default());
        let s = out.solution().unwrap();
        assert_eq!(s.general, Expr::app("F", vec![Expr::var("y"), Expr::var("z")]));
    }

    #[test]
    fn shear_field_invariants() {
        let w = fo("Dy + x*Dz");
        let out = solve_first_order_heuristic(&w, &Expr::zero(), &CharacteristicsConfig::default());
        let s = out.solution().unwrap();
        assert_eq!(s.invariants.len(), 2);
        assert!(s.invariants.contains(&Expr::var("x")));
        assert!(w.apply(&s.general).is_zero());
    }

    #[test]
    fn scaling_field_needs_rational_invariant() {
        let cfg = CharacteristicsConfig {
            degree_bound: 1,
            rational_invariants: false,
            function_name: "F".into(),
        };
        let xy = var_list(&["x", "y"]);
        let w = FirstOrderOperator::from_operator(&parse_operator("x*Dx + y*Dy", &xy).unwrap()).unwrap();
        assert!(matches!(
            solve_first_order_heuristic(&w, &Expr::zero(), &cfg),
            FirstOrderOutcome::Unsupported(_)
        ));
        let cfg = CharacteristicsConfig { rational_invariants: true, ..cfg };
        let out = solve_first_order_heuristic(&w, &Expr::zero(), &cfg);
        let s = out.solution().unwrap();
        assert!(w.apply(&s.general).is_zero());
        assert_eq!(s.invariants[0].den(), &parse_expr("x", &xy).unwrap().num().clone());
    }

    #[test]
    fn inhomogeneous_with_zeroth_order() {
        let w = fo("Dx + y");
        let rhs = parse_expr("x*z", &var_list(&["x", "y", "z"])).unwrap();
        let out = solve_first_order_heuristic(&w, &rhs, &CharacteristicsConfig::default());
        let s = out.solution().unwrap();
        assert!((&w.apply(&s.general) - &rhs).is_zero());
    }

    #[test]
    fn shear_field_with_source() {
        let w = fo("Dy + x*Dz");
        let rhs = parse_expr("x*y*z", &var_list(&["x", "y", "z"])).unwrap();
        let out = solve_first_order_heuristic(&w, &rhs, &CharacteristicsConfig::default());
        let s = out.solution().unwrap();
        assert!((&w.apply(&s.general) - &rhs).is_zero());
    }
}
