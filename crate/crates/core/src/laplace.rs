//! Laplace cascade for strictly hyperbolic second-order operators:
//! characteristic forms, invariants, X₁/X₂-transformations, chains and
//! closed-form solutions.

use std::collections::BTreeMap;

use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::integrate::close_quadratures;
use crate::lpdo::{
    commutator, factor_symbol, principal_symbol, solve_first_order_heuristic,
    CharacteristicsConfig, FirstOrderOperator, FirstOrderOutcome, LinearOperator,
};
use crate::poly::{Application, Atom};
use crate::zero::{zero_test, SampleConfig, ZeroStatus};

/// `L = X₁X₂ + α₁X₁ + α₂X₂ + α₃ = X₂X₁ + ᾱ₁X₁ + ᾱ₂X₂ + α₃`,
/// with `[X₁, X₂] = P·X₁ + Q·X₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicForm {
    pub operator: LinearOperator,
    pub x1: FirstOrderOperator,
    pub x2: FirstOrderOperator,
    pub alpha1: Expr,
    pub alpha2: Expr,
    pub alpha3: Expr,
    pub alphabar1: Expr,
    pub alphabar2: Expr,
    pub p: Expr,
    pub q: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplaceInvariants {
    pub h: Expr,
    pub k: Expr,
}

/// Coefficients `(a, b)` with `w = a·X₁ + b·X₂` as vector fields.
pub(crate) fn span_coefficients(
    w: &[Expr],
    x1: &FirstOrderOperator,
    x2: &FirstOrderOperator,
) -> Option<(Expr, Expr)> {
    let n = w.len();
    for i in 0..n {
        for j in i + 1..n {
            let det = &(&x1.field[i] * &x2.field[j]) - &(&x1.field[j] * &x2.field[i]);
            if det.is_zero() {
                continue;
            }
            let a = (&(&w[i] * &x2.field[j]) - &(&w[j] * &x2.field[i])).checked_div(&det).ok()?;
            let b = (&(&x1.field[i] * &w[j]) - &(&x1.field[j] * &w[i])).checked_div(&det).ok()?;
            let ok = (0..n).all(|r| {
                (&(&(&a * &x1.field[r]) + &(&b * &x2.field[r])) - &w[r]).is_zero()
            });
            return ok.then_some((a, b));
        }
    }
    if w.iter().all(Expr::is_zero) {
        return Some((Expr::zero(), Expr::zero()));
    }
    None
}

/// Characteristic form with prescribed characteristic operators.
pub fn form_with(
    l: &LinearOperator,
    x1: &FirstOrderOperator,
    x2: &FirstOrderOperator,
) -> Result<CharacteristicForm> {
    let rest = l.sub(&x1.to_operator().compose(&x2.to_operator()));
    if rest.order() > 1 {
        return Err(ExprError::NotHyperbolic(
            "principal part does not match the characteristic operators".into(),
        ));
    }
    let r = FirstOrderOperator::from_operator(&rest)?;
    let (alpha1, alpha2) = span_coefficients(&r.field, x1, x2).ok_or_else(|| {
        ExprError::NotHyperbolic("first-order part leaves the characteristic span".into())
    })?;
    let c = commutator(x1, x2);
    let (p, q) = span_coefficients(&c.field, x1, x2).ok_or_else(|| {
        ExprError::NotHyperbolic("characteristic operators are not in involution".into())
    })?;
    Ok(CharacteristicForm {
        operator: l.clone(),
        x1: x1.clone(),
        x2: x2.clone(),
        alphabar1: &alpha1 + &p,
        alphabar2: &alpha2 + &q,
        alpha1,
        alpha2,
        alpha3: r.zeroth,
        p,
        q,
    })
}

pub fn characteristic_form(l: &LinearOperator) -> Result<CharacteristicForm> {
    let sym = principal_symbol(l)?;
    let (x1, x2) = factor_symbol(&sym).map_err(|e| ExprError::NotHyperbolic(e.to_string()))?;
    form_with(l, &x1, &x2)
}

pub fn laplace_invariants(f: &CharacteristicForm) -> LaplaceInvariants {
    let h = &(&f.x1.derive(&f.alpha1) + &(&f.alpha1 * &f.alpha2)) - &f.alpha3;
    let k = &(&f.x2.derive(&f.alphabar2) + &(&f.alphabar1 * &f.alphabar2)) - &f.alpha3;
    LaplaceInvariants { h, k }
}

fn op(a: &FirstOrderOperator) -> LinearOperator {
    a.to_operator()
}

fn scalar(vars: &[String], c: &Expr) -> LinearOperator {
    LinearOperator::scalar(vars.to_vec(), c.clone())
}

/// `L − [(X₁+α₂)(X₂+α₁) − h]` and `L − [(X₂+ᾱ₁)(X₁+ᾱ₂) − k]`.
pub fn partial_factorization_residuals(f: &CharacteristicForm) -> (LinearOperator, LinearOperator) {
    let inv = laplace_invariants(f);
    let vars = f.operator.vars();
    let first = op(&f.x1.plus_scalar(&f.alpha2))
        .compose(&op(&f.x2.plus_scalar(&f.alpha1)))
        .sub(&scalar(vars, &inv.h));
    let second = op(&f.x2.plus_scalar(&f.alphabar1))
        .compose(&op(&f.x1.plus_scalar(&f.alphabar2)))
        .sub(&scalar(vars, &inv.k));
    (f.operator.sub(&first), f.operator.sub(&second))
}

/// Operator annihilating `v = (X₂ + α₁)u`:
/// `L₍₁₎ = h·(X₂ + α₁)∘h⁻¹∘(X₁ + α₂) − h`.
pub fn x1_transform(f: &CharacteristicForm) -> Result<CharacteristicForm> {
    let h = laplace_invariants(f).h;
    if h.is_zero() {
        return Err(ExprError::Undefined("h = 0: the operator already factors".into()));
    }
    let vars = f.operator.vars();
    // h∘(X₂ + α₁)∘h⁻¹ = X₂ + α₁ − X₂(h)/h
    let shift = &f.alpha1 - &f.x2.derive(&h).checked_div(&h)?;
    let l1 = op(&f.x2.plus_scalar(&shift))
        .compose(&op(&f.x1.plus_scalar(&f.alpha2)))
        .sub(&scalar(vars, &h));
    let g = form_with(&l1, &f.x1, &f.x2)?;
    if laplace_invariants(&g).k != h {
        return Err(ExprError::Inconsistent("k of the X1-transform differs from h".into()));
    }
    Ok(g)
}

/// Operator annihilating `w = (X₁ + ᾱ₂)u`:
/// `L₍₋₁₎ = k·(X₁ + ᾱ₂)∘k⁻¹∘(X₂ + ᾱ₁) − k`.
pub fn x2_transform(f: &CharacteristicForm) -> Result<CharacteristicForm> {
    let k = laplace_invariants(f).k;
    if k.is_zero() {
        return Err(ExprError::Undefined("k = 0: the operator already factors".into()));
    }
    let vars = f.operator.vars();
    let shift = &f.alphabar2 - &f.x1.derive(&k).checked_div(&k)?;
    let l1 = op(&f.x1.plus_scalar(&shift))
        .compose(&op(&f.x2.plus_scalar(&f.alphabar1)))
        .sub(&scalar(vars, &k));
    let g = form_with(&l1, &f.x1, &f.x2)?;
    if laplace_invariants(&g).h != k {
        return Err(ExprError::Inconsistent("h of the X2-transform differs from k".into()));
    }
    Ok(g)
}

/// `λ⁻¹ ∘ L ∘ λ`, the operator acting on `w` when `u = λw`.
pub fn gauge_transform(l: &LinearOperator, lambda: &Expr) -> Result<LinearOperator> {
    let vars = l.vars();
    Ok(scalar(vars, &lambda.recip()?)
        .compose(l)
        .compose(&scalar(vars, lambda)))
}

#[derive(Clone, Debug)]
pub struct ChainLink {
    /// Position in the chain: positive after X₁-steps, negative after X₂-steps.
    pub index: i64,
    pub form: CharacteristicForm,
    pub invariants: LaplaceInvariants,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    /// Links ordered by index, from `−K` to `N`.
    pub links: Vec<ChainLink>,
    /// Number of X₁-steps until `h` vanishes.
    pub n: Option<usize>,
    /// Number of X₂-steps until `k` vanishes.
    pub k: Option<usize>,
    pub max_steps: usize,
}

impl ChainReport {
    pub fn link(&self, index: i64) -> Option<&ChainLink> {
        self.links.iter().find(|l| l.index == index)
    }

    pub fn seed(&self) -> &ChainLink {
        self.link(0).expect("seed link present")
    }

    /// `h₍ᵢ₎`, using `h₍₋ᵢ₋₁₎ = k₍₋ᵢ₎` one step past the last negative link.
    pub fn h_at(&self, index: i64) -> Option<Expr> {
        if let Some(l) = self.link(index) {
            return Some(l.invariants.h.clone());
        }
        self.link(index + 1).filter(|_| index < 0).map(|l| l.invariants.k.clone())
    }

    pub fn terminated_both(&self) -> bool {
        self.n.is_some() && self.k.is_some()
    }
}

/// Extends the chain in both directions until an invariant vanishes or the
/// step budget is spent.
pub fn run_chain(l: &LinearOperator, max_steps: usize) -> Result<ChainReport> {
    let seed = characteristic_form(l)?;
    let link = |index: i64, form: CharacteristicForm| ChainLink {
        index,
        invariants: laplace_invariants(&form),
        form,
    };
    let mut forward = vec![link(0, seed.clone())];
    let mut n = None;
    loop {
        let last = forward.last().expect("nonempty");
        if last.invariants.h.is_zero() {
            n = Some(forward.len() - 1);
            break;
        }
        if forward.len() > max_steps {
            break;
        }
        let next = x1_transform(&last.form)?;
        forward.push(link(forward.len() as i64, next));
    }
    let mut backward: Vec<ChainLink> = Vec::new();
    let mut k = None;
    let mut current = forward[0].clone();
    loop {
        if current.invariants.k.is_zero() {
            k = Some(backward.len());
            break;
        }
        if backward.len() >= max_steps {
            break;
        }
        let next = x2_transform(&current.form)?;
        current = link(-(backward.len() as i64) - 1, next);
        backward.push(current.clone());
    }
    backward.reverse();
    backward.extend(forward);
    Ok(ChainReport {
        links: backward,
        n,
        k,
        max_steps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Verified,
    /// Residual vanished after closing quadratures on polynomial witnesses.
    VerifiedOnWitnesses,
    Failed { residual: String, witness: Option<String> },
    Inconclusive { residual: String },
    NotChecked,
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified | Verification::VerifiedOnWitnesses)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verification::Verified => "verified",
            Verification::VerifiedOnWitnesses => "verified-on-witnesses",
            Verification::Failed { .. } => "failed",
            Verification::Inconclusive { .. } => "inconclusive",
            Verification::NotChecked => "not-checked",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolutionCertificate {
    pub solution: Expr,
    /// Coefficients of `F, F′, …` (two-sided case), lowest order first.
    pub f_coefficients: Vec<Expr>,
    /// Coefficients of `G, G′, …`.
    pub g_coefficients: Vec<Expr>,
    pub f_argument: Option<Expr>,
    pub g_argument: Option<Expr>,
    pub provenance: String,
    pub has_quadrature: bool,
    pub verification: Verification,
}

fn solve_homogeneous(
    w: &FirstOrderOperator,
    name: &str,
    rhs: &Expr,
) -> Result<(Expr, Vec<Expr>)> {
    let cfg = CharacteristicsConfig {
        function_name: name.into(),
        ..CharacteristicsConfig::default()
    };
    match solve_first_order_heuristic(w, rhs, &cfg) {
        FirstOrderOutcome::Solved(s) => Ok((s.general, s.invariants)),
        FirstOrderOutcome::Unsupported(r) => Err(ExprError::Unsupported(format!(
            "unsupported characteristic coordinates: {}",
            r.reason
        ))),
    }
}

/// Coefficients of `name^{(i)}(arg)` for `i = 0..`, when `u` is linear in
/// them.
fn derivative_coefficients(u: &Expr, name: &str, arg: &Expr) -> Option<Vec<Expr>> {
    let mut max = 0;
    for a in u.atoms() {
        if let Atom::App(app) = &a {
            if &*app.name == name {
                max = max.max(app.derivs[0]);
            }
        }
    }
    let atoms: Vec<Atom> = (0..=max)
        .map(|i| {
            let e = Expr::app_deriv(name, vec![i], vec![arg.clone()]);
            e.atoms().into_iter().next().expect("application atom")
        })
        .collect();
    u.linear_coefficients(&atoms).map(|(c, _)| c)
}

fn normalize_top(part: &Expr, coeffs: &[Expr]) -> (Expr, Vec<Expr>) {
    let Some(top) = coeffs.iter().rev().find(|c| !c.is_zero()) else {
        return (part.clone(), coeffs.to_vec());
    };
    let s = crate::poly::rat(1) / top.leading_coeff();
    (part.scale(&s), coeffs.iter().map(|c| c.scale(&s)).collect())
}

/// Climbs from a solution of `L₍ₑ₎` at the end of the forward chain back to
/// the seed: `u₍ᵢ₎ = (X₁ + α₂⁽ⁱ⁾)u₍ᵢ₊₁₎ / h₍ᵢ₎`.
fn climb_forward(r: &ChainReport, end: usize, mut v: Expr) -> Result<Expr> {
    for i in (0..end).rev() {
        let l = r.link(i as i64).expect("link present");
        let x = l.form.x1.plus_scalar(&l.form.alpha2);
        v = x.apply(&v).checked_div(&l.invariants.h)?;
    }
    Ok(v)
}

/// `u₍₋ᵢ₎ = (X₂ + ᾱ₁⁽⁻ⁱ⁾)u₍₋ᵢ₋₁₎ / k₍₋ᵢ₎`.
fn climb_backward(r: &ChainReport, end: usize, mut w: Expr) -> Result<Expr> {
    for i in (0..end).rev() {
        let l = r.link(-(i as i64)).expect("link present");
        let x = l.form.x2.plus_scalar(&l.form.alphabar1);
        w = x.apply(&w).checked_div(&l.invariants.k)?;
    }
    Ok(w)
}

fn single_invariant(invs: &[Expr]) -> Result<Expr> {
    match invs {
        [a] => Ok(a.clone()),
        _ => Err(ExprError::Unsupported(
            "closed-form solutions need two independent variables".into(),
        )),
    }
}

/// Closed-form general solution from a terminated chain.
pub fn build_solution(r: &ChainReport) -> Result<SolutionCertificate> {
    match (r.n, r.k) {
        (Some(n), Some(k)) => {
            let end = &r.link(n as i64).expect("end link").form;
            let (v, inv_f) =
                solve_homogeneous(&end.x2.plus_scalar(&end.alpha1), "F", &Expr::zero())?;
            let f_arg = single_invariant(&inv_f)?;
            let f_part = climb_forward(r, n, v)?;
            let start = &r.link(-(k as i64)).expect("end link").form;
            let (w, inv_g) =
                solve_homogeneous(&start.x1.plus_scalar(&start.alphabar2), "G", &Expr::zero())?;
            let g_arg = single_invariant(&inv_g)?;
            let g_part = climb_backward(r, k, w)?;
            let fc = derivative_coefficients(&f_part, "F", &f_arg).ok_or_else(|| {
                ExprError::Inconsistent("solution is not linear in F".into())
            })?;
            let gc = derivative_coefficients(&g_part, "G", &g_arg).ok_or_else(|| {
                ExprError::Inconsistent("solution is not linear in G".into())
            })?;
            let (f_part, fc) = normalize_top(&f_part, &fc);
            let (g_part, gc) = normalize_top(&g_part, &gc);
            Ok(SolutionCertificate {
                solution: &f_part + &g_part,
                f_coefficients: fc,
                g_coefficients: gc,
                f_argument: Some(f_arg),
                g_argument: Some(g_arg),
                provenance: format!(
                    "F from h({n}) = 0 through {n} X1-substitutions; G from k({}) = 0 through {k} X2-substitutions",
                    -(k as i64)
                ),
                has_quadrature: false,
                verification: Verification::NotChecked,
            })
        }
        (Some(n), None) => {
            // L₍ₙ₎ = (X₁ + α₂)(X₂ + α₁): (X₁ + α₂)w = 0, then (X₂ + α₁)v = w.
            let end = &r.link(n as i64).expect("end link").form;
            let (w, _) = solve_homogeneous(&end.x1.plus_scalar(&end.alpha2), "phi", &Expr::zero())?;
            let (v, _) = solve_homogeneous(&end.x2.plus_scalar(&end.alpha1), "psi", &w)?;
            let u = climb_forward(r, n, v)?;
            Ok(one_sided(u, format!("h({n}) = 0; one free function inside a quadrature")))
        }
        (None, Some(k)) => {
            let start = &r.link(-(k as i64)).expect("end link").form;
            let (w, _) =
                solve_homogeneous(&start.x2.plus_scalar(&start.alphabar1), "phi", &Expr::zero())?;
            let (v, _) = solve_homogeneous(&start.x1.plus_scalar(&start.alphabar2), "psi", &w)?;
            let u = climb_backward(r, k, v)?;
            Ok(one_sided(u, format!("k({}) = 0; one free function inside a quadrature", -(k as i64))))
        }
        (None, None) => Err(ExprError::Undefined(format!(
            "chain not terminated within {} steps",
            r.max_steps
        ))),
    }
}

fn one_sided(u: Expr, provenance: String) -> SolutionCertificate {
    SolutionCertificate {
        has_quadrature: u.has_quadrature(),
        solution: u,
        f_coefficients: vec![],
        g_coefficients: vec![],
        f_argument: None,
        g_argument: None,
        provenance,
        verification: Verification::NotChecked,
    }
}

/// Replaces every function symbol by a random polynomial of degree ≤ 3 in
/// its arguments.
pub fn polynomial_witness(e: &Expr, seed: u64) -> Result<Expr> {
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    collect_functions(e, &mut names);
    let mut table: BTreeMap<String, (Vec<String>, Expr)> = BTreeMap::new();
    for (i, (name, arity)) in names.iter().enumerate() {
        let slots: Vec<String> = (0..*arity).map(|j| format!("_w{j}")).collect();
        let monos = crate::linalg::monomials_up_to(&slots, 3);
        let coeffs = crate::zero::random_rationals(seed.wrapping_add(i as u64 * 7919), monos.len());
        let mut p = Expr::zero();
        for (m, c) in monos.iter().zip(coeffs) {
            p = &p + &m.scale(&c);
        }
        table.insert(name.clone(), (slots, p));
    }
    instantiate_functions(e, &table)
}

/// Instantiates function symbols `name(slots…) := body`, including
/// derivative-annotated applications.
pub fn instantiate_functions(
    e: &Expr,
    table: &BTreeMap<String, (Vec<String>, Expr)>,
) -> Result<Expr> {
    let f = |app: &Application| -> Result<Option<Expr>> {
        let Some((slots, body)) = table.get(&*app.name) else {
            return Ok(None);
        };
        let d = body.diff_multi(slots, &app.derivs);
        let map: BTreeMap<String, Expr> = slots.iter().cloned().zip(app.args.iter().cloned()).collect();
        Ok(Some(d.subst_vars(&map)?))
    };
    let inst = e.subst_functions(&f)?;
    Ok(close_quadratures(&inst))
}

fn collect_functions(e: &Expr, out: &mut BTreeMap<String, usize>) {
    for a in e.atoms() {
        match &a {
            Atom::App(app) => {
                out.insert(app.name.to_string(), app.args.len());
                app.args.iter().for_each(|x| collect_functions(x, out));
            }
            Atom::Exp(x) | Atom::Ln(x) => collect_functions(x, out),
            Atom::Int(q) => {
                collect_functions(&q.integrand, out);
                q.bindings.iter().for_each(|(_, x)| collect_functions(x, out));
            }
            Atom::Var(_) => {}
        }
    }
}

/// Substitutes `u` into `L` and decides whether the residual vanishes.
pub fn verify_expression(l: &LinearOperator, u: &Expr, seed: u64) -> Verification {
    let residual = l.apply(u);
    match zero_test(&residual, SampleConfig { points: 5, seed }) {
        ZeroStatus::Zero => Verification::Verified,
        ZeroStatus::NonZero { witness } => Verification::Failed {
            residual: residual.to_string(),
            witness,
        },
        ZeroStatus::Inconclusive => {
            if u.has_quadrature() || residual.has_quadrature() {
                for attempt in 0..3 {
                    let Ok(wu) = polynomial_witness(u, seed.wrapping_add(attempt)) else {
                        continue;
                    };
                    if wu.has_quadrature() {
                        continue;
                    }
                    let r = l.apply(&wu);
                    return match zero_test(&r, SampleConfig { points: 5, seed }) {
                        ZeroStatus::Zero => Verification::VerifiedOnWitnesses,
                        ZeroStatus::NonZero { witness } => Verification::Failed {
                            residual: r.to_string(),
                            witness,
                        },
                        ZeroStatus::Inconclusive => Verification::Inconclusive {
                            residual: r.to_string(),
                        },
                    };
                }
            }
            Verification::Inconclusive {
                residual: residual.to_string(),
            }
        }
    }
}

pub fn verify_solution(l: &LinearOperator, s: &SolutionCertificate) -> Verification {
    verify_expression(l, &s.solution, 0)
}
