use serde::Serialize;

use crate::algebraic::{coefficient_equations, solve_system, SystemLimits};
use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::linalg::{
    collect_linear, generic_poly, instantiate, monomials_up_to, nullspace, solve_affine,
};
use crate::zero::{samples_vanish, SampleConfig};
use crate::lpdo::{
    commutator, decompose_in_frame, factor_symbol, frame_determinant, principal_symbol,
    FirstOrderOperator, LinearOperator,
};

/// Which of the two partial factorizations `S₁S₂ + T + a` is used:
/// `Forward` takes the factors in the order returned by symbol
/// factorization, `Swapped` reverses them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    Forward,
    Swapped,
}

impl Ordering {
    pub fn label(self) -> &'static str {
        match self {
            Ordering::Forward => "forward",
            Ordering::Swapped => "swapped",
        }
    }
}

/// `L = S₁S₂ + T + a` with
/// `[S₂, T] = K·S₁ + M·S₂ + N·T` and `[S₁, S₂] = P·S₁ + Q·S₂ + R·T`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiniFrame {
    pub operator: LinearOperator,
    pub ordering: Ordering,
    pub s1: FirstOrderOperator,
    pub s2: FirstOrderOperator,
    pub t: FirstOrderOperator,
    pub a: Expr,
    pub k: Expr,
    pub m: Expr,
    pub n: Expr,
    pub p: Expr,
    pub q: Expr,
    pub r: Expr,
}

pub fn dini_frame(l: &LinearOperator, ordering: Ordering) -> Result<DiniFrame> {
    if l.vars().len() != 3 {
        return Err(ExprError::Unsupported(format!(
            "frames need three variables, got {}",
            l.vars().len()
        )));
    }
    if l.order() != 2 {
        return Err(ExprError::UnsupportedOrder(l.order() as usize));
    }
    let (f1, f2) = factor_symbol(&principal_symbol(l)?)?;
    match ordering {
        Ordering::Forward => frame_with(l, &f1, &f2, ordering),
        Ordering::Swapped => frame_with(l, &f2, &f1, ordering),
    }
}

pub fn frame_with(
    l: &LinearOperator,
    s1: &FirstOrderOperator,
    s2: &FirstOrderOperator,
    ordering: Ordering,
) -> Result<DiniFrame> {
    if s1.proportional_to(s2) {
        return Err(ExprError::NotGeneric("proportional symbol factors".into()));
    }
    let rest = l.sub(&s1.to_operator().compose(&s2.to_operator()));
    if rest.order() > 1 {
        return Err(ExprError::Inconsistent(
            "principal part differs from the product of the factors".into(),
        ));
    }
    let rest = FirstOrderOperator::from_operator(&rest)?;
    let t = rest.vector_part();
    let basis = [s1.clone(), s2.clone(), t.clone()];
    if frame_determinant(&basis).is_zero() {
        return Err(ExprError::NotGeneric(
            "S1, S2 and T do not span the tangent space".into(),
        ));
    }
    let [k, m, n] = decompose_in_frame(&commutator(s2, &t), &basis)?;
    let [p, q, r] = decompose_in_frame(&commutator(s1, s2), &basis)?;
    Ok(DiniFrame {
        operator: l.clone(),
        ordering,
        s1: s1.clone(),
        s2: s2.clone(),
        t,
        a: rest.zeroth,
        k,
        m,
        n,
        p,
        q,
        r,
    })
}

impl DiniFrame {
    pub fn vars(&self) -> &[String] {
        self.operator.vars()
    }

    /// `S₁S₂ + T + a`.
    pub fn reconstruct(&self) -> LinearOperator {
        self.s1
            .to_operator()
            .compose(&self.s2.to_operator())
            .add(&self.t.with_zeroth(self.a.clone()).to_operator())
    }

    /// Residual operators of the two commutator expansions.
    pub fn commutator_residuals(&self) -> (FirstOrderOperator, FirstOrderOperator) {
        let comb = |x: &Expr, y: &Expr, z: &Expr| {
            self.s1.scale(x).add(&self.s2.scale(y)).add(&self.t.scale(z))
        };
        (
            commutator(&self.s2, &self.t).sub(&comb(&self.k, &self.m, &self.n)),
            commutator(&self.s1, &self.s2).sub(&comb(&self.p, &self.q, &self.r)),
        )
    }

    /// `ν = −(N + βR)`.
    pub fn nu(&self, beta: &Expr) -> Expr {
        -&(&self.n + &(beta * &self.r))
    }

    /// `μ = να + S₂(α) − βQ − M`.
    pub fn mu(&self, alpha: &Expr, beta: &Expr) -> Expr {
        let nu = self.nu(beta);
        &(&(&(&nu * alpha) + &self.s2.derive(alpha)) - &(beta * &self.q)) - &self.m
    }

    /// `S₂(β) − β²R − (N + P)β − K`.
    pub fn riccati_residual(&self, beta: &Expr) -> Expr {
        let quad = &(beta * beta) * &self.r;
        let lin = &(&self.n + &self.p) * beta;
        &(&(&self.s2.derive(beta) - &quad) - &lin) - &self.k
    }

    /// Residuals of the four coefficient equations of the commutator
    /// closure, with `μ` and `ν` given by their defining formulas.
    pub fn system_residuals(&self, alpha: &Expr, beta: &Expr) -> [Expr; 4] {
        let nu = self.nu(beta);
        let mu = self.mu(alpha, beta);
        let s1b = self.s1.derive(beta);
        let s2a = self.s2.derive(alpha);
        let b = &(&self.a - &(alpha * beta)) - &s1b;
        let e1 = &(&(&self.k + &(beta * &self.p)) - &self.s2.derive(beta)) - &(&nu * beta);
        let e2 = &(&(&(&self.m - &s2a) + &(beta * &self.q)) - &(&nu * alpha)) + &mu;
        let e3 = &(&self.n + &(beta * &self.r)) + &nu;
        let lhs = &(&(&(&(beta * &s1b) - &self.t.derive(beta)) + &self.s2.derive(&self.a))
            - &(beta * &s2a))
            - &self.s2.derive(&s1b);
        let rhs = &(&(-&nu) * &b) - &(&mu * beta);
        [e1, e2, e3, &lhs - &rhs]
    }

    pub fn system_holds(&self, alpha: &Expr, beta: &Expr) -> bool {
        self.system_residuals(alpha, beta).iter().all(Expr::is_zero)
    }
}

fn ansatz_solutions(
    f: &DiniFrame,
    degree_bound: u32,
    with_closure: bool,
) -> Vec<Expr> {
    let monos = monomials_up_to(f.vars(), degree_bound);
    let (beta, names) = generic_poly(&monos, "_b");
    let mut residuals = vec![f.riccati_residual(&beta)];
    if with_closure {
        residuals.push(f.system_residuals(&Expr::zero(), &beta)[3].clone());
    }
    let mut eqs = Vec::new();
    for r in &residuals {
        match coefficient_equations(r, &names) {
            Some(e) => eqs.extend(e),
            None => return vec![],
        }
    }
    solve_system(&eqs, &names, SystemLimits::default())
        .iter()
        .map(|vals| instantiate(&beta, &names, vals))
        .collect()
}

/// `β = ∓S₂(γ)/(Rγ)` with `γ` a polynomial solution of the linearized
/// equation `R·S₂²γ − (S₂R + R(N+P))·S₂γ + KR²γ = 0`.
fn linearized_solutions(f: &DiniFrame, degree_bound: u32) -> Vec<Expr> {
    if f.r.is_zero() {
        return vec![];
    }
    let monos = monomials_up_to(f.vars(), degree_bound);
    let (gamma, names) = generic_poly(&monos, "_g");
    let s2g = f.s2.derive(&gamma);
    let s2s2g = f.s2.derive(&s2g);
    let damping = &f.s2.derive(&f.r) + &(&f.r * &(&f.n + &f.p));
    let lin = &(&(&f.r * &s2s2g) - &(&damping * &s2g)) + &(&(&f.k * &(&f.r * &f.r)) * &gamma);
    let Some((rows, _)) = collect_linear(&[lin], &names) else {
        return vec![];
    };
    let mut out = Vec::new();
    for v in nullspace(&rows, names.len()) {
        let g = instantiate(&gamma, &names, &v);
        let Ok(ratio) = f.s2.derive(&g).checked_div(&(&f.r * &g)) else {
            continue;
        };
        out.push(-&ratio);
        out.push(ratio);
    }
    out
}

/// Solutions `β` of the Riccati-type equation found by polynomial ansatz up
/// to `degree_bound` and by the linearizing substitution; `β = 0` first
/// when admissible. Members satisfying the zeroth-order closure equation
/// are listed before the others.
pub fn solve_beta(f: &DiniFrame, degree_bound: u32) -> Vec<Expr> {
    let mut candidates = vec![Expr::zero()];
    candidates.extend(ansatz_solutions(f, degree_bound, true));
    if candidates.len() == 1 {
        candidates.extend(ansatz_solutions(f, degree_bound, false));
    }
    if candidates.len() == 1 {
        candidates.extend(linearized_solutions(f, degree_bound));
    }
    let cfg = SampleConfig::default();
    let mut out: Vec<Expr> = Vec::new();
    for c in candidates {
        if out.contains(&c) {
            continue;
        }
        let r = f.riccati_residual(&c);
        if samples_vanish(&r, cfg) && r.is_zero() {
            out.push(c);
        }
    }
    let zero = Expr::zero();
    out.sort_by_key(|b| !f.system_residuals(&zero, b)[3].is_zero());
    out
}

/// An `α` of degree at most `degree_bound` for which all four equations
/// vanish, with free coefficients set to zero.
pub fn solve_alpha(f: &DiniFrame, beta: &Expr, degree_bound: u32) -> Option<Expr> {
    if !f.riccati_residual(beta).is_zero() {
        return None;
    }
    let monos = monomials_up_to(f.vars(), degree_bound);
    let (alpha, names) = generic_poly(&monos, "_a");
    let residuals = f.system_residuals(&alpha, beta);
    let (rows, rhs) = collect_linear(&residuals, &names)?;
    let (x, _) = solve_affine(&rows, &rhs, names.len())?;
    let a = instantiate(&alpha, &names, &x);
    f.system_holds(&a, beta).then_some(a)
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

    fn fo(s: &str) -> FirstOrderOperator {
        FirstOrderOperator::from_operator(&op(s)).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse_expr(s, &xyz()).unwrap()
    }

    const DEX: &str = "Dx*Dy + x*Dx*Dz - Dz";

    #[test]
    fn frames_of_the_example() {
        let f = dini_frame(&op(DEX), Ordering::Swapped).unwrap();
        assert_eq!(f.s1, fo("Dy + x*Dz"));
        assert_eq!(f.s2, fo("Dx"));
        assert_eq!(f.t, fo("-Dz"));
        assert!(f.a.is_zero());
        assert!([&f.k, &f.m, &f.n, &f.p, &f.q].iter().all(|c| c.is_zero()));
        assert!(f.r.is_one());
        let g = dini_frame(&op(DEX), Ordering::Forward).unwrap();
        assert_eq!(g.s1, fo("Dx"));
        assert_eq!(g.t, fo("-2*Dz"));
        for fr in [&f, &g] {
            assert_eq!(fr.reconstruct(), op(DEX));
            let (c1, c2) = fr.commutator_residuals();
            assert!(c1.is_zero() && c2.is_zero());
        }
    }

    #[test]
    fn constant_coefficient_frame() {
        let f = dini_frame(&op("Dx*Dy + Dz"), Ordering::Forward).unwrap();
        assert_eq!(f.t, fo("Dz"));
        assert!([&f.a, &f.k, &f.m, &f.n, &f.p, &f.q, &f.r].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn rejected_operators() {
        assert!(dini_frame(&op("Dx^2 + Dy^2 + Dz^2"), Ordering::Forward).is_err());
        assert!(matches!(
            dini_frame(&op("Dx*Dy"), Ordering::Forward),
            Err(ExprError::NotGeneric(_))
        ));
    }

    #[test]
    fn beta_and_alpha_for_the_example() {
        let f = dini_frame(&op(DEX), Ordering::Swapped).unwrap();
        let betas = solve_beta(&f, 2);
        assert!(betas[0].is_zero());
        assert!(betas.iter().all(|b| f.riccati_residual(b).is_zero()));
        let alpha = solve_alpha(&f, &Expr::zero(), 2).unwrap();
        assert!(alpha.is_zero());
        assert!(f.system_holds(&alpha, &Expr::zero()));
    }

    #[test]
    fn linearized_sign_is_fixed_by_the_residual() {
        let f = dini_frame(&op(DEX), Ordering::Swapped).unwrap();
        assert!(!f.riccati_residual(&e("1/(x+1)")).is_zero());
        assert!(f.riccati_residual(&e("-1/(x+1)")).is_zero());
        let betas = linearized_solutions(&f, 1);
        assert!(betas.contains(&e("-1/x")));
        assert!(solve_beta(&f, 1).iter().all(|b| *b != e("1/x")));
    }

    #[test]
    fn closure_equation_is_free_of_alpha() {
        let f = dini_frame(&op("Dx*Dy + x*Dx*Dz + y*Dz + x*z"), Ordering::Forward).unwrap();
        let b = e("x*y");
        let a = f.system_residuals(&Expr::zero(), &b)[3].clone();
        let c = f.system_residuals(&e("x^2 + y*z"), &b)[3].clone();
        assert_eq!(a, c);
    }
}
