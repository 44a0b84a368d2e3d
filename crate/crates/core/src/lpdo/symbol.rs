use std::collections::BTreeMap;
use std::fmt;

use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::lpdo::{FirstOrderOperator, LinearOperator};

/// Homogeneous quadratic form `Σ_{i≤j} s_ij ξ_i ξ_j` in commuting symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPolynomial {
    pub vars: Vec<String>,
    coeffs: BTreeMap<(usize, usize), Expr>,
}

impl SymbolPolynomial {
    pub fn new(vars: Vec<String>) -> Self {
        SymbolPolynomial {
            vars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> Expr {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key).cloned().unwrap_or_default()
    }

    pub fn add_coeff(&mut self, i: usize, j: usize, c: &Expr) {
        let key = if i <= j { (i, j) } else { (j, i) };
        let slot = self.coeffs.entry(key).or_default();
        *slot = &*slot + c;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), Expr> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sub(&self, o: &SymbolPolynomial) -> SymbolPolynomial {
        let mut out = self.clone();
        for (&(i, j), c) in &o.coeffs {
            out.add_coeff(i, j, &-c);
        }
        out
    }

    /// Product of two linear forms.
    pub fn product(vars: Vec<String>, p: &[Expr], q: &[Expr]) -> SymbolPolynomial {
        let mut s = SymbolPolynomial::new(vars);
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                s.add_coeff(i, j, &(pi * qj));
            }
        }
        s
    }

    /// `∂s/∂ξ_i` as a linear form.
    fn partial(&self, i: usize) -> Vec<Expr> {
        let n = self.vars.len();
        (0..n)
            .map(|j| {
                let c = self.coeff(i, j);
                if i == j {
                    &c * &Expr::int(2)
                } else {
                    c
                }
            })
            .collect()
    }
}

impl fmt::Display for SymbolPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| {
                let m = if i == j {
                    format!("xi{}^2", i + 1)
                } else {
                    format!("xi{}*xi{}", i + 1, j + 1)
                };
                if c.is_one() {
                    m
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

pub fn principal_symbol(l: &LinearOperator) -> Result<SymbolPolynomial> {
    if l.order() != 2 {
        return Err(ExprError::UnsupportedOrder(l.order() as usize));
    }
    let mut s = SymbolPolynomial::new(l.vars().to_vec());
    for (idx, c) in l.homogeneous_part(2).terms() {
        let ones: Vec<usize> = idx
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize))
            .collect();
        s.add_coeff(ones[0], ones[1], c);
    }
    Ok(s)
}

/// Symbol of a first-order operator's vector field.
pub fn linear_symbol(a: &FirstOrderOperator) -> Vec<Expr> {
    a.field.clone()
}

/// Square root within the coefficient field, when one is visible on the
/// canonical numerator and denominator.
pub fn expr_sqrt(e: &Expr) -> Option<Expr> {
    if e.is_zero() {
        return Some(Expr::zero());
    }
    let direct = || -> Option<Expr> {
        let n = e.num().sqrt()?;
        let d = e.den().sqrt()?;
        Expr::from_parts(n, d).ok()
    };
    if let Some(r) = direct() {
        return Some(r);
    }
    let nd = e.num().mul(e.den()).sqrt()?;
    Expr::from_parts(nd, e.den().clone()).ok()
}

/// Linear form `l` with `l² = q` for a quadratic form `q` over the indices
/// in `idx`.
fn sqrt_form(q: &SymbolPolynomial, idx: &[usize]) -> Option<Vec<Expr>> {
    let n = q.vars.len();
    let mut l = vec![Expr::zero(); n];
    let Some(&p) = idx.iter().find(|&&i| !q.coeff(i, i).is_zero()) else {
        return if q.is_zero() { Some(l) } else { None };
    };
    let lp = expr_sqrt(&q.coeff(p, p))?;
    let two_lp = &lp * &Expr::int(2);
    for &j in idx {
        l[j] = if j == p {
            lp.clone()
        } else {
            q.coeff(p, j).checked_div(&two_lp).ok()?
        };
    }
    let check = SymbolPolynomial::product(q.vars.clone(), &l, &l);
    check.sub(q).is_zero().then_some(l)
}

/// Linear form `p` with `p·q = s`, if one exists.
fn divide_form(s: &SymbolPolynomial, q: &[Expr]) -> Option<Vec<Expr>> {
    let n = q.len();
    let j = q.iter().position(|c| !c.is_zero())?;
    let mut p = vec![Expr::zero(); n];
    p[j] = s.coeff(j, j).checked_div(&q[j]).ok()?;
    for k in 0..n {
        if k != j {
            let num = &s.coeff(j, k) - &(&p[j] * &q[k]);
            p[k] = num.checked_div(&q[j]).ok()?;
        }
    }
    let check = SymbolPolynomial::product(s.vars.clone(), &p, q);
    check.sub(s).is_zero().then_some(p)
}

fn leading_normalize(form: &[Expr]) -> Option<(Expr, Vec<Expr>)> {
    let i = form.iter().position(|c| !c.is_zero())?;
    let lead = form[i].clone();
    let inv = lead.recip().ok()?;
    Some((lead, form.iter().map(|c| c * &inv).collect()))
}

fn split_quadratic(s: &SymbolPolynomial) -> Result<(Vec<Expr>, Vec<Expr>)> {
    let n = s.vars.len();
    if let Some(k) = (0..n).find(|&k| !s.coeff(k, k).is_zero()) {
        // s = a ξ_k² + B ξ_k + C with B linear and C quadratic in the rest.
        let a = s.coeff(k, k);
        let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        let b: Vec<Expr> = (0..n)
            .map(|j| if j == k { Expr::zero() } else { s.coeff(k, j) })
            .collect();
        let mut disc = SymbolPolynomial::product(s.vars.clone(), &b, &b);
        let four_a = &a * &Expr::int(4);
        for &i in &others {
            for &j in &others {
                if i <= j {
                    disc.add_coeff(i, j, &-(&four_a * &s.coeff(i, j)));
                }
            }
        }
        if disc.is_zero() {
            return Err(ExprError::RepeatedFactor);
        }
        let l = sqrt_form(&disc, &others).ok_or(ExprError::NotFactorable)?;
        let half = Expr::rational(crate::poly::rat2(1, 2));
        let two_a = &a * &Expr::int(2);
        let mut p = vec![Expr::zero(); n];
        let mut q = vec![Expr::zero(); n];
        p[k] = a.clone();
        q[k] = Expr::one();
        for &j in &others {
            p[j] = &(&b[j] - &l[j]) * &half;
            q[j] = (&b[j] + &l[j]).checked_div(&two_a)?;
        }
        return Ok((p, q));
    }
    for i in 0..n {
        let q = s.partial(i);
        if q.iter().all(Expr::is_zero) {
            continue;
        }
        if let Some(p) = divide_form(s, &q) {
            return Ok((p, q));
        }
    }
    Err(ExprError::NotFactorable)
}

/// Factors a quadratic symbol into two linear forms, returned as pure
/// first-order operators `(S₁, S₂)` with `symbol(S₁)·symbol(S₂) = s`.
/// Both factors are normalized to leading coefficient one and ordered;
/// the overall scale is carried by `S₁`.
pub fn factor_symbol(s: &SymbolPolynomial) -> Result<(FirstOrderOperator, FirstOrderOperator)> {
    if s.is_zero() {
        return Err(ExprError::NotFactorable);
    }
    let (p, q) = split_quadratic(s)?;
    let (lp, p) = leading_normalize(&p).ok_or(ExprError::NotFactorable)?;
    let (lq, q) = leading_normalize(&q).ok_or(ExprError::NotFactorable)?;
    if p == q {
        return Err(ExprError::RepeatedFactor);
    }
    let key = |f: &Vec<Expr>| (f.iter().position(|c| !c.is_zero()), f.clone());
    let (first, second) = if key(&p) <= key(&q) { (p, q) } else { (q, p) };
    let scale = &lp * &lq;
    let first: Vec<Expr> = first.iter().map(|c| c * &scale).collect();
    let check = SymbolPolynomial::product(s.vars.clone(), &first, &second);
    if !check.sub(s).is_zero() {
        return Err(ExprError::Inconsistent("symbol factorization does not multiply back".into()));
    }
    Ok((
        FirstOrderOperator::pure(s.vars.clone(), first),
        FirstOrderOperator::pure(s.vars.clone(), second),
    ))
}

/// Symbol of the composition of two first-order operators.
pub fn product_symbol(a: &FirstOrderOperator, b: &FirstOrderOperator) -> SymbolPolynomial {
    SymbolPolynomial::product(a.vars.clone(), &a.field, &b.field)
}
