//! Exact linear algebra over the rationals and over the expression field,
//! plus coefficient collection for undetermined-coefficient ansätze.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::expr::Expr;
use crate::poly::{Atom, Monomial, Rational};

/// Row-reduces `m` in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{v : m v = 0}`.
pub fn nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solution set of `m v = b`: one particular solution and a nullspace basis.
pub fn solve_affine(
    m: &[Vec<Rational>],
    b: &[Rational],
    cols: usize,
) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Some((x, nullspace(m, cols)))
}

/// Solves a square system over the expression field; `None` if singular.
pub fn solve_expr(mut a: Vec<Vec<Expr>>, mut b: Vec<Expr>) -> Option<Vec<Expr>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = a[c][c].recip().ok()?;
        for j in c..n {
            a[c][j] = &a[c][j] * &inv;
        }
        b[c] = &b[c] * &inv;
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..n {
                    let d = &f * &a[c][j];
                    a[i][j] = &a[i][j] - &d;
                }
                let d = &f * &b[c];
                b[i] = &b[i] - &d;
            }
        }
    }
    Some(b)
}

/// Rank over the expression field.
pub fn rank_expr(mut a: Vec<Vec<Expr>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip().expect("pivot is nonzero");
        for i in r + 1..rows {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..cols {
                    let d = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &d;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn determinant3(m: &[[Expr; 3]; 3]) -> Expr {
    let t = |a: &Expr, b: &Expr, c: &Expr| &(a * b) * c;
    let p = &(&t(&m[0][0], &m[1][1], &m[2][2]) + &t(&m[0][1], &m[1][2], &m[2][0]))
        + &t(&m[0][2], &m[1][0], &m[2][1]);
    let n = &(&t(&m[0][2], &m[1][1], &m[2][0]) + &t(&m[0][0], &m[1][2], &m[2][1]))
        + &t(&m[0][1], &m[1][0], &m[2][2]);
    &p - &n
}

/// Names of undetermined coefficients used by ansätze.
pub fn unknown_names(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// Linear system whose solutions make every expression in `exprs` vanish
/// identically, where each expression is affine in the `unknowns`
/// (variables that appear only in numerators). `None` when some
/// expression is not affine in them.
pub fn collect_linear(
    exprs: &[Expr],
    unknowns: &[String],
) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let atoms: Vec<Atom> = unknowns.iter().map(|u| Atom::var(u)).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for e in exprs {
        if atoms.iter().any(|a| e.den().contains_atom(a)) {
            return None;
        }
        let mut groups: BTreeMap<Monomial, (Vec<Rational>, Rational)> = BTreeMap::new();
        for (m, c) in e.num().terms() {
            let mut hit = None;
            for (i, a) in atoms.iter().enumerate() {
                let k = m.exponent(a);
                if k > 1 || (k == 1 && hit.is_some()) {
                    return None;
                }
                if k == 1 {
                    hit = Some(i);
                }
            }
            let key = match hit {
                Some(i) => m.split_atom(&atoms[i]).1,
                None => m.clone(),
            };
            let entry = groups
                .entry(key)
                .or_insert_with(|| (vec![Rational::zero(); atoms.len()], Rational::zero()));
            match hit {
                Some(i) => entry.0[i] += c,
                None => entry.1 -= c,
            }
        }
        for (_, (row, b)) in groups {
            rows.push(row);
            rhs.push(b);
        }
    }
    Some((rows, rhs))
}

/// Substitutes rational values for the unknowns.
pub fn instantiate(e: &Expr, unknowns: &[String], values: &[Rational]) -> Expr {
    let map: BTreeMap<String, Expr> = unknowns
        .iter()
        .cloned()
        .zip(values.iter().map(|v| Expr::rational(v.clone())))
        .collect();
    e.subst_vars(&map).expect("rational substitution is total")
}

/// Monomials `Π vars^e` of total degree at most `degree`, constant first.
pub fn monomials_up_to(vars: &[String], degree: u32) -> Vec<Expr> {
    let mut out = vec![Expr::one()];
    let mut layer = vec![(Expr::one(), 0usize)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                next.push((m * &Expr::var(v), i));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out
}

/// Generic polynomial `Σ c_i m_i` over the given monomials with fresh
/// unknown coefficients.
pub fn generic_poly(monos: &[Expr], prefix: &str) -> (Expr, Vec<String>) {
    let names = unknown_names(prefix, monos.len());
    let mut total = Expr::zero();
    for (m, n) in monos.iter().zip(&names) {
        total = &total + &(m * &Expr::var(n));
    }
    (total, names)
}
