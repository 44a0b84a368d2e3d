use std::collections::BTreeMap;

use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::integrate::integrate_heuristic;
use crate::laplace::span_coefficients;
use crate::lpdo::{
    factor_symbol, principal_symbol, solve_first_order_heuristic, CharacteristicsConfig,
    FirstOrderOperator, FirstOrderOutcome, LinearOperator,
};

use super::frame::{dini_frame, solve_alpha, solve_beta, DiniFrame, Ordering};

/// One transformation `v = (S₂ + β)u`, `L₁v = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiniStep {
    pub alpha: Expr,
    pub beta: Expr,
    pub mu: Expr,
    pub nu: Expr,
    /// `V = T − βS₁ − αS₂`.
    pub v: FirstOrderOperator,
    /// `b = a − αβ − S₁(β)`.
    pub b: Expr,
    pub transformed: LinearOperator,
}

fn op(a: &FirstOrderOperator) -> LinearOperator {
    a.to_operator()
}

impl DiniStep {
    /// `S₂ + β`.
    pub fn lift(&self, f: &DiniFrame) -> FirstOrderOperator {
        f.s2.plus_scalar(&self.beta)
    }

    /// `V + b`.
    pub fn companion(&self) -> FirstOrderOperator {
        self.v.with_zeroth(self.b.clone())
    }

    /// `[(V+b), (S₂+β)] − μ(S₂+β) − ν(V+b)`.
    pub fn closure_residual(&self, f: &DiniFrame) -> LinearOperator {
        let a = op(&self.companion());
        let s = op(&self.lift(f));
        let lhs = a.compose(&s).sub(&s.compose(&a));
        let rhs = s.scale(&self.mu).add(&a.scale(&self.nu));
        lhs.sub(&rhs)
    }

    /// `L₁∘(S₂+β) − (S₂+β+ν)∘L`, zero whenever the closure holds.
    pub fn intertwining_residual(&self, f: &DiniFrame) -> LinearOperator {
        let s = self.lift(f);
        let left = self.transformed.compose(&op(&s));
        let right = op(&s.plus_scalar(&self.nu)).compose(&f.operator);
        left.sub(&right)
    }
}

pub fn dini_transform(f: &DiniFrame, alpha: &Expr, beta: &Expr) -> Result<DiniStep> {
    if !f.system_holds(alpha, beta) {
        return Err(ExprError::Inconsistent(
            "(alpha, beta) violate the closure system".into(),
        ));
    }
    let nu = f.nu(beta);
    let mu = f.mu(alpha, beta);
    let v = f.t.sub(&f.s1.scale(beta)).sub(&f.s2.scale(alpha));
    let b = &(&f.a - &(alpha * beta)) - &f.s1.derive(beta);
    let vars = f.vars().to_vec();
    let s1a = op(&f.s1.plus_scalar(alpha));
    let transformed = op(&f.s2.plus_scalar(beta))
        .compose(&s1a)
        .add(&op(&v.with_zeroth(b.clone())))
        .add(&s1a.scale(&nu))
        .sub(&LinearOperator::scalar(vars, mu.clone()));
    let step = DiniStep {
        alpha: alpha.clone(),
        beta: beta.clone(),
        mu,
        nu,
        v,
        b,
        transformed,
    };
    if !step.closure_residual(f).is_zero() {
        return Err(ExprError::Inconsistent("closure identity fails".into()));
    }
    Ok(step)
}

/// First-order `A`, `B` with `L = A∘B`, if the operator factors with
/// principal parts along its symbol factors.
pub fn factor_operator(l: &LinearOperator) -> Option<(FirstOrderOperator, FirstOrderOperator)> {
    if l.order() != 2 {
        return None;
    }
    let (f1, f2) = factor_symbol(&principal_symbol(l).ok()?).ok()?;
    for (s1, s2) in [(&f1, &f2), (&f2, &f1)] {
        let rest = l.sub(&op(s1).compose(&op(s2)));
        let Ok(rest) = FirstOrderOperator::from_operator(&rest) else {
            continue;
        };
        let Some((beta, alpha)) = span_coefficients(&rest.field, s1, s2) else {
            continue;
        };
        let a = s1.plus_scalar(&alpha);
        let b = s2.plus_scalar(&beta);
        if op(&a).compose(&op(&b)) == *l {
            return Some((a, b));
        }
    }
    None
}

fn solve_with(w: &FirstOrderOperator, rhs: &Expr, name: &str) -> Result<Expr> {
    let cfg = CharacteristicsConfig {
        function_name: name.into(),
        ..CharacteristicsConfig::default()
    };
    match solve_first_order_heuristic(w, rhs, &cfg) {
        FirstOrderOutcome::Solved(s) => Ok(s.general),
        FirstOrderOutcome::Unsupported(r) => Err(ExprError::Unsupported(r.reason)),
    }
}

/// General solution of `A(Bv) = 0` with arbitrary functions `phi`, `psi`.
pub fn solve_factored(a: &FirstOrderOperator, b: &FirstOrderOperator) -> Result<Expr> {
    let w = solve_with(a, &Expr::zero(), "phi")?;
    solve_with(b, &w, "psi")
}

/// Reconstructs `u` from `(S₂+β)u = v`, `(V+b)u = −(S₁+α)v`, for frames
/// whose `S₂` is a multiple of a coordinate derivation. The integration
/// function is `theta`.
pub fn back_substitute(step: &DiniStep, v: &Expr, f: &DiniFrame) -> Result<Expr> {
    let vars = f.vars();
    let j = f.s2.leading_index().expect("nonzero S2");
    if f.s2.field.iter().enumerate().any(|(i, c)| i != j && !c.is_zero()) {
        return Err(ExprError::Unsupported(
            "back-substitution needs S2 along a coordinate direction".into(),
        ));
    }
    let xj = &vars[j];
    let lambda = &f.s2.field[j];
    let rate = step.beta.checked_div(lambda)?;
    let gauge_exp = integrate_heuristic(&rate, xj);
    let gauge = Expr::exp(&gauge_exp);
    let gauge_inv = Expr::exp(&-&gauge_exp);
    let u1 = &gauge_inv * &integrate_heuristic(&(&gauge * &v.checked_div(lambda)?), xj);
    let companion = step.companion();
    let source = &(-&f.s1.plus_scalar(&step.alpha).apply(v)) - &companion.apply(&u1);
    // (V + b)(θ/g) = source with θ free of x_j.
    let damping = &step.b - &step.v.derive(&gauge_exp);
    let target = &gauge * &source;
    let others: Vec<usize> = (0..vars.len()).filter(|&i| i != j).collect();
    let lead = others
        .iter()
        .copied()
        .filter(|&i| !step.v.field[i].is_zero())
        .min_by_key(|&i| (step.v.field[i].as_rational().is_none(), i));
    let unsupported = || {
        ExprError::Unsupported("integration function would depend on the S2 coordinate".into())
    };
    let theta = match lead {
        Some(k) => {
            let c = &step.v.field[k];
            let field: Vec<Expr> = others
                .iter()
                .map(|&i| step.v.field[i].checked_div(c))
                .collect::<Result<_>>()?;
            let zeroth = damping.checked_div(c)?;
            let rhs = target.checked_div(c)?;
            // The source is free of x_j for true solutions; with unevaluated
            // quadratures that cannot be shown syntactically.
            if field.iter().chain([&zeroth]).any(|e| e.depends_on(xj))
                || (rhs.depends_on(xj) && !rhs.has_quadrature())
            {
                return Err(unsupported());
            }
            let sub_vars: Vec<String> = others.iter().map(|&i| vars[i].clone()).collect();
            let w = FirstOrderOperator::new(sub_vars, field, zeroth);
            solve_with(&w, &rhs, "theta")?
        }
        None if !damping.is_zero() => {
            let t = target.checked_div(&damping)?;
            if t.depends_on(xj) {
                return Err(unsupported());
            }
            t
        }
        None if target.is_zero() => {
            let args = others.iter().map(|&i| Expr::var(&vars[i])).collect();
            Expr::app("theta", args)
        }
        None => return Err(unsupported()),
    };
    Ok(&u1 + &(&theta * &gauge_inv))
}

#[derive(Clone, Debug, PartialEq)]
pub enum LinkStatus {
    /// The link's operator is a product of two first-order operators.
    Factorable,
    Transformed,
    NoBeta,
    NoAlpha,
    Failed(String),
}

impl LinkStatus {
    pub fn label(&self) -> String {
        match self {
            LinkStatus::Factorable => "factorable".into(),
            LinkStatus::Transformed => "transformed".into(),
            LinkStatus::NoBeta => "no-beta-at-bound".into(),
            LinkStatus::NoAlpha => "no-alpha-at-bound".into(),
            LinkStatus::Failed(m) => format!("failed: {m}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiniLink {
    /// Positive for the forward ordering, negative for the swapped one.
    pub index: i64,
    pub ordering: Ordering,
    /// Operator of this link (the seed for index 0).
    pub operator: LinearOperator,
    /// Frame of the previous link from which this one was produced.
    pub frame: Option<DiniFrame>,
    pub step: Option<DiniStep>,
    pub status: LinkStatus,
    pub factors: Option<(FirstOrderOperator, FirstOrderOperator)>,
}

#[derive(Clone, Debug)]
pub struct DiniChainReport {
    pub links: Vec<DiniLink>,
    /// Index of the first factorable link, nearest to the seed.
    pub factorable: Option<i64>,
    pub max_steps: usize,
    pub degree_bound: u32,
}

impl DiniChainReport {
    pub fn link(&self, index: i64) -> Option<&DiniLink> {
        self.links.iter().find(|l| l.index == index)
    }
}

/// First admissible `(β, α)` pair and the transformation it defines.
pub fn first_step(f: &DiniFrame, degree_bound: u32) -> std::result::Result<DiniStep, LinkStatus> {
    let betas = solve_beta(f, degree_bound);
    if betas.is_empty() {
        return Err(LinkStatus::NoBeta);
    }
    for beta in &betas {
        if let Some(alpha) = solve_alpha(f, beta, degree_bound) {
            return dini_transform(f, &alpha, beta).map_err(|e| LinkStatus::Failed(e.to_string()));
        }
    }
    Err(LinkStatus::NoAlpha)
}

/// Transformations in both orderings until a factorable link, a search
/// failure or the step budget.
pub fn dini_chain(l: &LinearOperator, max_steps: usize, degree_bound: u32) -> Result<DiniChainReport> {
    dini_frame(l, Ordering::Forward)?;
    let seed_factors = factor_operator(l);
    let mut links = vec![DiniLink {
        index: 0,
        ordering: Ordering::Forward,
        operator: l.clone(),
        frame: None,
        step: None,
        status: if seed_factors.is_some() {
            LinkStatus::Factorable
        } else {
            LinkStatus::Transformed
        },
        factors: seed_factors.clone(),
    }];
    if seed_factors.is_some() {
        return Ok(DiniChainReport {
            links,
            factorable: Some(0),
            max_steps,
            degree_bound,
        });
    }
    let mut factorable: Option<i64> = None;
    for ordering in [Ordering::Forward, Ordering::Swapped] {
        let sign = if ordering == Ordering::Forward { 1 } else { -1 };
        let mut current = l.clone();
        for n in 1..=max_steps as i64 {
            let index = sign * n;
            let frame = match dini_frame(&current, ordering) {
                Ok(f) => f,
                Err(e) => {
                    links.push(failed_link(index, ordering, &current, LinkStatus::Failed(e.to_string())));
                    break;
                }
            };
            let step = match first_step(&frame, degree_bound) {
                Ok(s) => s,
                Err(status) => {
                    links.push(DiniLink {
                        frame: Some(frame),
                        ..failed_link(index, ordering, &current, status)
                    });
                    break;
                }
            };
            let next = step.transformed.clone();
            let factors = factor_operator(&next);
            let done = factors.is_some();
            links.push(DiniLink {
                index,
                ordering,
                operator: next.clone(),
                frame: Some(frame),
                step: Some(step),
                status: if done { LinkStatus::Factorable } else { LinkStatus::Transformed },
                factors,
            });
            if done {
                if factorable.is_none_or(|i| i.abs() > n) {
                    factorable = Some(index);
                }
                break;
            }
            current = next;
        }
    }
    links.sort_by_key(|l| l.index);
    Ok(DiniChainReport {
        links,
        factorable,
        max_steps,
        degree_bound,
    })
}

fn failed_link(index: i64, ordering: Ordering, l: &LinearOperator, status: LinkStatus) -> DiniLink {
    DiniLink {
        index,
        ordering,
        operator: l.clone(),
        frame: None,
        step: None,
        status,
        factors: None,
    }
}

/// General solution of the seed operator through the first factorable
/// link, climbing back one transformation at a time.
pub fn solve_through_chain(report: &DiniChainReport) -> Result<Expr> {
    let target = report
        .factorable
        .ok_or_else(|| ExprError::Undefined("no factorable link in the chain".into()))?;
    let link = report.link(target).expect("link present");
    let (a, b) = link.factors.clone().expect("factorable link");
    let mut u = solve_factored(&a, &b)?;
    let sign = target.signum();
    let mut index = target;
    while index != 0 {
        let l = report.link(index).expect("link present");
        let (Some(step), Some(frame)) = (&l.step, &l.frame) else {
            return Err(ExprError::Inconsistent("missing transformation data".into()));
        };
        let fresh = format!("theta{}", index.unsigned_abs());
        u = back_substitute(step, &u, frame)?.subst_functions(&|app| {
            Ok((&*app.name == "theta").then(|| Expr::app(&fresh, app.args.clone())))
        })?;
        index -= sign;
    }
    Ok(u)
}

/// Substitutes witnesses `name ↦ body(slots)` into an expression.
pub fn with_witnesses(e: &Expr, table: &[(&str, Vec<String>, Expr)]) -> Result<Expr> {
    let t: BTreeMap<String, (Vec<String>, Expr)> = table
        .iter()
        .map(|(n, s, b)| (n.to_string(), (s.clone(), b.clone())))
        .collect();
    crate::laplace::instantiate_functions(e, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_operator, var_list};

    fn xyz() -> Vec<String> {
        var_list(&["x", "y", "z"])
    }

    fn op(s: &str) -> LinearOperator {
        parse_operator(s, &xyz()).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse_expr(s, &xyz()).unwrap()
    }

    const DEX: &str = "Dx*Dy + x*Dx*Dz - Dz";

    #[test]
    fn example_transform_factors() {
        let f = dini_frame(&op(DEX), Ordering::Swapped).unwrap();
        let s = dini_transform(&f, &Expr::zero(), &Expr::zero()).unwrap();
        assert_eq!(s.transformed, op("Dx*Dy + x*Dx*Dz"));
        let x2x1 = op("Dy + x*Dz").compose(&op("Dx"));
        assert_eq!(s.transformed, x2x1);
        assert!(s.intertwining_residual(&f).is_zero());
        assert!(s.transformed.apply(&e("z")).is_zero());
        let (a, b) = factor_operator(&s.transformed).unwrap();
        assert_eq!(a.to_operator().compose(&b.to_operator()), x2x1);
        assert!(factor_operator(&op(DEX)).is_none());
    }

    #[test]
    fn example_back_substitution() {
        let f = dini_frame(&op(DEX), Ordering::Swapped).unwrap();
        let s = dini_transform(&f, &Expr::zero(), &Expr::zero()).unwrap();
        let u = back_substitute(&s, &e("x^2*y/2 - x*z"), &f).unwrap();
        assert_eq!(u, e("x^3*y/6 - x^2*z/2 + theta(y)"));
        assert!(op(DEX).apply(&u).is_zero());
        assert_eq!(back_substitute(&s, &Expr::zero(), &f).unwrap(), e("theta(y)"));
        let u = back_substitute(&s, &e("z"), &f).unwrap();
        assert!(op(DEX).apply(&u).is_zero());
    }

    #[test]
    fn example_chain_and_solution() {
        let r = dini_chain(&op(DEX), 3, 2).unwrap();
        assert_eq!(r.factorable, Some(-1));
        let u = solve_through_chain(&r).unwrap();
        assert!(u.has_function_symbols());
        let slots = var_list(&["s", "t"]);
        let w = with_witnesses(
            &u,
            &[
                ("phi", slots.clone(), Expr::var("t")),
                ("psi", slots.clone(), Expr::var("t")),
                ("theta1", var_list(&["s"]), Expr::zero()),
            ],
        )
        .unwrap();
        assert!(!w.has_quadrature());
        assert!(op(DEX).apply(&w).is_zero());
    }

    #[test]
    fn inconsistent_pair_is_rejected() {
        let f = dini_frame(&op(DEX), Ordering::Swapped).unwrap();
        assert!(dini_transform(&f, &Expr::zero(), &e("x")).is_err());
    }
}
