//! Rational solutions of small polynomial systems arising from ansätze
//! with undetermined coefficients. Elimination with branching; unknowns
//! left free at the end are set to zero.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::Expr;
use crate::poly::{Atom, Monomial, Poly, Rational};

/// Coefficients of `e` with respect to every monomial in the non-unknown
/// atoms; each is a polynomial in the unknowns. `None` when an unknown
/// occurs in the denominator.
pub fn coefficient_equations(e: &Expr, unknowns: &[String]) -> Option<Vec<Expr>> {
    let atoms: BTreeSet<Atom> = unknowns.iter().map(|u| Atom::var(u)).collect();
    if atoms.iter().any(|a| e.den().contains_atom(a)) {
        return None;
    }
    let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in e.num().terms() {
        let (inner, outer) = m.partition(|a| atoms.contains(a));
        groups.entry(outer).or_default().add_term(inner, c.clone());
    }
    Some(groups.into_values().filter(|p| !p.is_zero()).map(Expr::from_poly).collect())
}

#[derive(Clone, Copy, Debug)]
pub struct SystemLimits {
    pub max_depth: usize,
    pub max_solutions: usize,
}

impl Default for SystemLimits {
    fn default() -> Self {
        SystemLimits {
            max_depth: 40,
            max_solutions: 8,
        }
    }
}

/// Rational points of `{eqs = 0}` found by elimination, each verified by
/// substitution.
pub fn solve_system(eqs: &[Expr], unknowns: &[String], limits: SystemLimits) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let mut search = Search {
        unknowns,
        limits,
        out: &mut out,
    };
    search.run(eqs.to_vec(), BTreeMap::new(), BTreeMap::new(), 0);
    let mut seen = BTreeSet::new();
    out.retain(|s| {
        let ok = eqs.iter().all(|e| {
            crate::linalg::instantiate(e, unknowns, s).is_zero()
        });
        ok && seen.insert(s.clone())
    });
    out
}

struct Search<'a> {
    unknowns: &'a [String],
    limits: SystemLimits,
    out: &'a mut Vec<Vec<Rational>>,
}

enum Step {
    Assign(String, Expr),
    Roots(String, Vec<Rational>),
    Divisible(String, usize),
    Pivot(String, usize, Expr, Expr),
}

impl Search<'_> {
    /// `eqs` are already reduced by `subst` except for the assignments in
    /// `fresh`.
    fn run(
        &mut self,
        eqs: Vec<Expr>,
        subst: BTreeMap<String, Expr>,
        fresh: BTreeMap<String, Expr>,
        depth: usize,
    ) {
        if depth > self.limits.max_depth || self.out.len() >= self.limits.max_solutions {
            return;
        }
        let mut reduced: Vec<Expr> = Vec::new();
        for e in &eqs {
            let Ok(r) = e.subst_vars(&fresh) else { return };
            let n = Expr::from_poly(r.num().clone());
            if n.is_zero() {
                continue;
            }
            if n.as_rational().is_some() {
                return;
            }
            if !reduced.contains(&n) {
                reduced.push(n);
            }
        }
        reduced.sort_by_key(|e| e.num().len());
        if reduced.is_empty() {
            self.record(&subst);
            return;
        }
        match self.choose(&reduced) {
            Some(Step::Assign(c, value)) => {
                let s = extend(&subst, &c, &value);
                self.run(reduced, s, single(&c, value), depth + 1);
            }
            Some(Step::Roots(c, roots)) => {
                for r in roots {
                    let v = Expr::rational(r);
                    let s = extend(&subst, &c, &v);
                    self.run(reduced.clone(), s, single(&c, v), depth + 1);
                }
            }
            Some(Step::Divisible(c, i)) => {
                let s = extend(&subst, &c, &Expr::zero());
                self.run(reduced.clone(), s, single(&c, Expr::zero()), depth + 1);
                let atom = Poly::atom(Atom::var(&c));
                let mut rest = reduced;
                rest[i] = Expr::from_poly(rest[i].num().div_exact(&atom).expect("divisible"));
                self.run(rest, subst, BTreeMap::new(), depth + 1);
            }
            Some(Step::Pivot(c, i, coeff, rest)) => {
                let mut with_zero = reduced.clone();
                with_zero.push(coeff.clone());
                self.run(with_zero, subst.clone(), BTreeMap::new(), depth + 1);
                if let Ok(v) = (-&rest).checked_div(&coeff) {
                    let mut others = reduced;
                    others.remove(i);
                    let s = extend(&subst, &c, &v);
                    self.run(others, s, single(&c, v), depth + 1);
                }
            }
            None => {}
        }
    }

    fn record(&mut self, subst: &BTreeMap<String, Expr>) {
        let zeros: BTreeMap<String, Expr> = self
            .unknowns
            .iter()
            .map(|u| (u.clone(), Expr::zero()))
            .collect();
        let mut values = Vec::new();
        for u in self.unknowns {
            let v = match subst.get(u) {
                Some(e) => match e.subst_vars(&zeros).ok().and_then(|x| x.as_rational()) {
                    Some(r) => r,
                    None => return,
                },
                None => Rational::zero(),
            };
            values.push(v);
        }
        self.out.push(values);
    }

    fn present(&self, e: &Expr) -> Vec<String> {
        self.unknowns
            .iter()
            .filter(|u| e.num().contains_atom(&Atom::var(u)))
            .cloned()
            .collect()
    }

    fn choose(&self, eqs: &[Expr]) -> Option<Step> {
        for e in eqs {
            for c in self.present(e) {
                let a = Atom::var(&c);
                let parts = e.num().to_univariate(&a);
                if parts.len() == 2 && parts[1].is_constant() {
                    let value = Expr::from_poly(parts[0].neg())
                        .checked_div(&Expr::from_poly(parts[1].clone()))
                        .ok()?;
                    return Some(Step::Assign(c, value));
                }
            }
        }
        for e in eqs {
            if let [c] = self.present(e).as_slice() {
                let parts = e.num().to_univariate(&Atom::var(c));
                let coeffs: Vec<Rational> = parts.iter().map(|p| p.as_constant().unwrap_or_default()).collect();
                return Some(Step::Roots(c.clone(), rational_roots(&coeffs)));
            }
        }
        for (i, e) in eqs.iter().enumerate() {
            for c in self.present(e) {
                let a = Atom::var(&c);
                if e.num().terms().all(|(m, _)| m.exponent(&a) > 0) {
                    return Some(Step::Divisible(c, i));
                }
            }
        }
        for (i, e) in eqs.iter().enumerate() {
            for c in self.present(e) {
                let parts = e.num().to_univariate(&Atom::var(&c));
                if parts.len() == 2 {
                    return Some(Step::Pivot(
                        c,
                        i,
                        Expr::from_poly(parts[1].clone()),
                        Expr::from_poly(parts[0].clone()),
                    ));
                }
            }
        }
        None
    }
}

fn single(c: &str, v: Expr) -> BTreeMap<String, Expr> {
    BTreeMap::from([(c.to_string(), v)])
}

fn extend(subst: &BTreeMap<String, Expr>, c: &str, value: &Expr) -> BTreeMap<String, Expr> {
    let one: BTreeMap<String, Expr> = [(c.to_string(), value.clone())].into();
    let mut out: BTreeMap<String, Expr> = subst
        .iter()
        .map(|(k, v)| (k.clone(), v.subst_vars(&one).unwrap_or_else(|_| v.clone())))
        .collect();
    out.insert(c.to_string(), value.clone());
    out
}

/// Rational roots of `Σ coeffs[i]·t^i`.
pub fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Rational::from(lcm.clone())).to_integer()).collect();
    while ints.last().is_some_and(Zero::is_zero) {
        ints.pop();
    }
    let mut roots = Vec::new();
    let shift = ints.iter().take_while(|c| c.is_zero()).count();
    if shift > 0 {
        roots.push(Rational::zero());
        ints.drain(..shift);
    }
    if ints.len() < 2 {
        return roots;
    }
    let eval = |r: &Rational| {
        ints.iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * r + Rational::from(c.clone()))
    };
    match ints.len() {
        2 => roots.push(Rational::new(-ints[0].clone(), ints[1].clone())),
        3 => {
            let (c, b, a) = (&ints[0], &ints[1], &ints[2]);
            let disc: BigInt = b * b - BigInt::from(4) * a * c;
            if !disc.is_negative() {
                let s = disc.sqrt();
                if &s * &s == disc {
                    for sign in [1, -1] {
                        let num = -b + BigInt::from(sign) * &s;
                        roots.push(Rational::new(num, BigInt::from(2) * a));
                    }
                }
            }
        }
        _ => {
            let (Some(a0), Some(an)) = (ints[0].abs().to_u64(), ints.last().unwrap().abs().to_u64()) else {
                return roots;
            };
            if a0 > 1_000_000_000 || an > 1_000_000_000 {
                return roots;
            }
            for p in divisors(a0) {
                for q in divisors(an) {
                    for sign in [1i64, -1] {
                        let r = Rational::new(BigInt::from(sign) * BigInt::from(p), BigInt::from(q));
                        if eval(&r).is_zero() {
                            roots.push(r);
                        }
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}
