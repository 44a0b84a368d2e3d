//! Heuristic antiderivatives: polynomials, `p(v)·exp(q·v + r)` and
//! rational functions whose denominators split into linear factors.
//! Everything else becomes an unevaluated antiderivative node.

use std::collections::BTreeMap;

use num_traits::One;

use crate::expr::Expr;
use crate::lpdo::expr_sqrt;
use crate::poly::{rat, Atom, Monomial, Poly, Rational};

/// Antiderivative of `e` with respect to `v`; always differentiates back to
/// `e`, falling back to an unevaluated node when no closed form is found.
pub fn integrate_heuristic(e: &Expr, v: &str) -> Expr {
    if e.is_zero() {
        return Expr::zero();
    }
    if !e.depends_on(v) {
        return e * &Expr::var(v);
    }
    let candidate = if e.den().depends_on(v) {
        rational_in(e, v)
    } else {
        by_groups(e, v)
    };
    match candidate {
        Some(r) if (&r.diff(v) - e).is_zero() => r,
        _ => Expr::integral(e, v, &[]),
    }
}

/// True when a closed antiderivative (no new node) was produced.
pub fn has_closed_form(e: &Expr, v: &str) -> bool {
    let r = integrate_heuristic(e, v);
    count_quadratures(&r) <= count_quadratures(e)
}

fn count_quadratures(e: &Expr) -> usize {
    e.atoms().iter().filter(|a| matches!(a, Atom::Int(_))).count()
}

/// Splits the numerator by its `v`-dependent non-polynomial factors.
fn by_groups(e: &Expr, v: &str) -> Option<Expr> {
    let x = Atom::var(v);
    let den = Expr::from_poly(e.den().clone());
    let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in e.num().terms() {
        let (dep, _) = m.partition(|a| a.depends_on(v) && *a != x);
        let rest = m.div(&dep).expect("partition divides");
        groups.entry(dep).or_default().add_term(rest, c.clone());
    }
    let mut total = Expr::zero();
    for (key, p) in groups {
        let poly_part = Expr::from_poly(p).checked_div(&den).ok()?;
        let piece = if key.is_one() {
            integrate_polynomial(&poly_part, v)
        } else if let [(Atom::Exp(arg), 1)] = key.factors() {
            integrate_poly_exp(&poly_part, arg, v).unwrap_or_else(|| {
                Expr::integral(&(&poly_part * &Expr::exp(arg)), v, &[])
            })
        } else {
            let f = &poly_part * &Expr::from_poly(Poly::term(Rational::one(), key));
            Expr::integral(&f, v, &[])
        };
        total = &total + &piece;
    }
    Some(total)
}

/// `∫ p dv` for `p` polynomial in `v` with `v`-free coefficients.
fn integrate_polynomial(p: &Expr, v: &str) -> Expr {
    let x = Atom::var(v);
    let den = Expr::from_poly(p.den().clone());
    let mut out = Poly::zero();
    for (m, c) in p.num().terms() {
        let (k, _) = m.split_atom(&x);
        let m2 = m.mul(&Monomial::atom(x.clone()));
        out.add_term(m2, c / rat(k as i64 + 1));
    }
    Expr::from_poly(out).checked_div(&den).expect("nonzero denominator")
}

/// `∫ p(v)·exp(g) dv` with `g' = q` free of `v`:
/// `exp(g)·Σ_k (−1)^k p^{(k)} / q^{k+1}`.
fn integrate_poly_exp(p: &Expr, g: &Expr, v: &str) -> Option<Expr> {
    let q = g.diff(v);
    if q.is_zero() || q.depends_on(v) {
        return None;
    }
    let mut total = Expr::zero();
    let mut deriv = p.clone();
    let mut qpow = q.clone();
    let mut sign = 1;
    while !deriv.is_zero() {
        let t = deriv.checked_div(&qpow).ok()?;
        total = if sign > 0 { &total + &t } else { &total - &t };
        deriv = deriv.diff(v);
        qpow = &qpow * &q;
        sign = -sign;
    }
    Some(&total * &Expr::exp(g))
}

fn only_polynomial_in(p: &Poly, v: &str) -> bool {
    let x = Atom::var(v);
    p.atoms().iter().all(|a| *a == x || !a.depends_on(v))
}

/// Roots in `v` of a polynomial factor of degree one or two.
fn roots_of(f: &Poly, v: &str) -> Option<Vec<Expr>> {
    let x = Atom::var(v);
    let cs: Vec<Expr> = f
        .to_univariate(&x)
        .into_iter()
        .map(Expr::from_poly)
        .collect();
    match cs.len() {
        2 => Some(vec![(-&cs[0]).checked_div(&cs[1]).ok()?]),
        3 => {
            let (c, b, a) = (&cs[0], &cs[1], &cs[2]);
            let disc = &(b * b) - &(&(a * c) * &Expr::int(4));
            let s = expr_sqrt(&disc)?;
            if s.is_zero() {
                return None;
            }
            let two_a = a * &Expr::int(2);
            let r1 = (&-b + &s).checked_div(&two_a).ok()?;
            let r2 = (&-b - &s).checked_div(&two_a).ok()?;
            Some(vec![r1, r2])
        }
        _ => None,
    }
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k))
}

/// Partial fractions over the roots of the denominator.
fn rational_in(e: &Expr, v: &str) -> Option<Expr> {
    if !only_polynomial_in(e.num(), v) || !only_polynomial_in(e.den(), v) {
        return None;
    }
    let x = Atom::var(v);
    let xv = Expr::var(v);
    // Split off the polynomial part.
    let den_u: Vec<Expr> = e.den().to_univariate(&x).into_iter().map(Expr::from_poly).collect();
    let mut rem: Vec<Expr> = e.num().to_univariate(&x).into_iter().map(Expr::from_poly).collect();
    let dd = den_u.len() - 1;
    let lead = den_u[dd].clone();
    let mut quotient = Expr::zero();
    while rem.len() > dd {
        let k = rem.len() - 1;
        let t = rem[k].checked_div(&lead).ok()?;
        let shift = (k - dd) as i32;
        quotient = &quotient + &(&t * &xv.pow(shift).ok()?);
        for (i, d) in den_u.iter().enumerate() {
            let idx = i + k - dd;
            rem[idx] = &rem[idx] - &(&t * d);
        }
        rem.pop();
        while rem.last().is_some_and(Expr::is_zero) && !rem.is_empty() {
            rem.pop();
        }
    }
    let mut remainder = Expr::zero();
    for (i, c) in rem.iter().enumerate() {
        remainder = &remainder + &(c * &xv.pow(i as i32).ok()?);
    }
    let mut total = integrate_polynomial(&quotient, v);
    if remainder.is_zero() {
        return Some(total);
    }
    let den_full = Expr::from_poly(e.den().clone());
    let (_, sqf) = e.den().square_free();
    for (f, mult) in sqf {
        if !f.depends_on(v) {
            continue;
        }
        for r in roots_of(&f, v)? {
            let lin = &xv - &r;
            let cofactor = den_full.checked_div(&lin.pow(mult as i32).ok()?).ok()?;
            let mut g = remainder.checked_div(&cofactor).ok()?;
            for s in 0..mult {
                let j = mult - s;
                let a_j = g
                    .subst_var(v, &r)
                    .ok()?
                    .scale(&(Rational::one() / factorial(s)));
                if !a_j.is_zero() {
                    let piece = if j == 1 {
                        let lnarg = Expr::from_poly(lin.num().monic());
                        &a_j * &Expr::ln(&lnarg).ok()?
                    } else {
                        let p = lin.pow(j as i32 - 1).ok()?;
                        (-&a_j).checked_div(&(&p * &Expr::int(j as i64 - 1))).ok()?
                    };
                    total = &total + &piece;
                }
                g = g.diff(v);
            }
        }
    }
    Some(total)
}

/// Replaces unevaluated antiderivatives by closed forms where possible.
pub fn close_quadratures(e: &Expr) -> Expr {
    if !e.has_quadrature() {
        return e.clone();
    }
    let mut f = |a: &Atom| -> crate::error::Result<Option<Expr>> {
        match a {
            Atom::Int(q) => {
                let integrand = close_quadratures(&q.integrand);
                let r = integrate_heuristic(&integrand, &q.var);
                let params: BTreeMap<String, Expr> = q
                    .bindings
                    .iter()
                    .map(|(p, b)| (p.to_string(), close_quadratures(b)))
                    .collect();
                if r.has_quadrature() && !params.is_empty() {
                    return Ok(Some(Expr::integral(
                        &integrand,
                        &q.var,
                        &params
                            .iter()
                            .map(|(p, b)| (std::sync::Arc::<str>::from(p.as_str()), b.clone()))
                            .collect::<Vec<_>>(),
                    )));
                }
                Ok(Some(r.subst_vars(&params)?))
            }
            _ => Ok(None),
        }
    };
    e.map_atoms(&mut f).unwrap_or_else(|_| e.clone())
}
