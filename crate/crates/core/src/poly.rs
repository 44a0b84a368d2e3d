//! Sparse multivariate polynomials over the rationals whose indeterminates
//! are [`Atom`]s: variables, applications of arbitrary function symbols,
//! `exp`, `ln` and unevaluated antiderivatives.
//!
//! Atoms are treated as algebraically independent, with one exception:
//! a monomial carries at most one `exp` atom, so `exp(a)·exp(b)` is stored
//! as `exp(a + b)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::expr::Expr;

pub type Rational = BigRational;

// BigRational reduces by a gcd after every operation, even when both
// operands are integers.
fn mul(a: &Rational, b: &Rational) -> Rational {
    if a.denom().is_one() && b.denom().is_one() {
        Rational::new_raw(a.numer() * b.numer(), BigInt::one())
    } else {
        a * b
    }
}

fn add_assign(a: &mut Rational, b: &Rational) {
    if a.denom().is_one() && b.denom().is_one() {
        *a = Rational::new_raw(a.numer() + b.numer(), BigInt::one());
    } else {
        *a += b;
    }
}

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat2(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Application of a named function symbol, possibly differentiated in
/// some of its argument slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Application {
    pub name: Arc<str>,
    pub derivs: Vec<u32>,
    pub args: Vec<Expr>,
}

/// Unevaluated antiderivative `∫ integrand d(var)`, where the integrand may
/// mention parameters that are afterwards bound to expressions. The
/// parameters are held fixed during integration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quadrature {
    pub integrand: Expr,
    pub var: Arc<str>,
    pub bindings: Vec<(Arc<str>, Expr)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(Arc<str>),
    App(Arc<Application>),
    Exp(Arc<Expr>),
    Ln(Arc<Expr>),
    Int(Arc<Quadrature>),
}

impl Atom {
    pub fn var(name: &str) -> Atom {
        Atom::Var(Arc::from(name))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Atom::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_exp(&self) -> bool {
        matches!(self, Atom::Exp(_))
    }

    /// True for atoms whose algebraic relations are not fully captured by
    /// treating them as independent indeterminates.
    pub fn is_transcendental(&self) -> bool {
        match self {
            Atom::Var(_) => false,
            Atom::App(app) => app.args.iter().any(Expr::has_transcendental),
            Atom::Exp(_) | Atom::Ln(_) | Atom::Int(_) => true,
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self {
            Atom::Var(v) => &**v == var,
            Atom::App(app) => app.args.iter().any(|a| a.depends_on(var)),
            Atom::Exp(a) | Atom::Ln(a) => a.depends_on(var),
            Atom::Int(q) => {
                let own = &*q.var == var
                    || (q.integrand.depends_on(var)
                        && !q.bindings.iter().any(|(p, _)| &**p == var));
                own || q.bindings.iter().any(|(_, e)| e.depends_on(var))
            }
        }
    }

    /// Collects the free variable names of this atom.
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Atom::Var(v) => {
                out.insert(v.to_string());
            }
            Atom::App(app) => app.args.iter().for_each(|a| a.collect_vars(out)),
            Atom::Exp(a) | Atom::Ln(a) => a.collect_vars(out),
            Atom::Int(q) => {
                let mut inner = BTreeSet::new();
                q.integrand.collect_vars(&mut inner);
                for (p, _) in &q.bindings {
                    inner.remove(&**p);
                }
                out.extend(inner);
                out.insert(q.var.to_string());
                for (_, e) in &q.bindings {
                    e.collect_vars(out);
                }
            }
        }
    }
}

/// Product of atoms with positive exponents, sorted by atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn power(a: Atom, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else if a.is_exp() {
            Monomial::one().mul(&Monomial(vec![(a, e)]))
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub fn from_factors(mut factors: Vec<(Atom, u32)>) -> Monomial {
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Atom, u32)> = Vec::with_capacity(factors.len());
        for (a, e) in factors {
            match merged.last_mut() {
                Some((last, le)) if *last == a => *le += e,
                _ => merged.push((a, e)),
            }
        }
        Monomial(merged).merge_exps()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, atom: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn has_exp(&self) -> bool {
        self.0.iter().any(|(a, _)| a.is_exp())
    }

    pub fn exp_atom(&self) -> Option<&Atom> {
        self.0.iter().map(|(a, _)| a).find(|a| a.is_exp())
    }

    fn merge_exps(self) -> Monomial {
        let count: u32 = self
            .0
            .iter()
            .filter(|(a, _)| a.is_exp())
            .map(|(_, e)| *e)
            .sum();
        if count <= 1 {
            return self;
        }
        let mut arg = Expr::zero();
        let mut rest = Vec::with_capacity(self.0.len());
        for (a, e) in self.0 {
            match a {
                Atom::Exp(inner) => arg = &arg + &(&*inner * &Expr::int(e as i64)),
                other => rest.push((other, e)),
            }
        }
        if !arg.is_zero() {
            rest.push((Atom::Exp(Arc::new(arg)), 1));
            rest.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Monomial(rest)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out).merge_exps()
    }

    /// Exact quotient `self / other` if every exponent stays nonnegative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *a {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *a {
                let oe = other.0[j].1;
                j += 1;
                match e.cmp(&oe) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((a.clone(), e - oe)),
                }
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes `atom` from the monomial, returning its exponent and the rest.
    pub fn split_atom(&self, atom: &Atom) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(a, x)| {
                if a == atom {
                    e = *x;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }

    /// Splits into (factors satisfying `pred`, the rest).
    pub fn partition(&self, pred: impl Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(x, _)| pred(x));
        (Monomial(a), Monomial(b))
    }
}

// Lexicographic order on exponent vectors, smaller atoms more significant.
// This is a monomial order, so leading-term division terminates.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::term(c, Monomial::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom) -> Poly {
        Poly::term(Rational::one(), Monomial::atom(a))
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, Rational)>) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                add_assign(v, &c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn has_exp(&self) -> bool {
        self.terms.keys().any(Monomial::has_exp)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                out.insert(a.clone());
            }
        }
        out
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        self.terms.keys().any(|m| m.exponent(atom) > 0)
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|(a, _)| a.depends_on(var)))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, atom: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(atom)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), mul(x, c))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (mm, cc) in &self.terms {
            out.add_term(mm.mul(m), mul(cc, c));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), mul(c1, c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&(Rational::one() / c)),
        }
    }

    /// Coefficients with respect to `atom`, indexed by exponent.
    pub fn to_univariate(&self, atom: &Atom) -> Vec<Poly> {
        let deg = self.degree_in(atom) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_atom(atom);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_univariate(coeffs: &[Poly], atom: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Monomial::power(atom.clone(), e as u32);
            for (mm, cc) in &c.terms {
                out.add_term(mm.mul(&m), cc.clone());
            }
        }
        out
    }

    /// Partial derivative treating `atom` as an indeterminate.
    pub fn deriv_atom(&self, atom: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_atom(atom);
            if e > 0 {
                let m2 = rest.mul(&Monomial::power(atom.clone(), e - 1));
                out.add_term(m2, c * rat(e as i64));
            }
        }
        out
    }

    /// Exact multivariate division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let tm = rm.div(&lm)?;
            let tc = rc / &lc;
            r = r.sub(&d.mul_term(&tm, &tc));
            q.add_term(tm, tc);
        }
        Some(q)
    }

    fn smallest_shared_atom(&self, other: &Poly) -> Option<Atom> {
        let a = self.atoms();
        let b = other.atoms();
        a.intersection(&b).next().cloned()
    }

    /// Greatest common divisor, normalized to leading coefficient one.
    /// Polynomials containing `exp` atoms are treated as coprime.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        // Only exp-free common factors are extracted: fold over the
        // coefficients of the distinct exponentials.
        if self.has_exp() || other.has_exp() {
            let mut parts = self.exp_coefficients();
            parts.extend(other.exp_coefficients());
            let mut g = parts.pop().expect("nonzero");
            for p in parts {
                if g.is_one() {
                    break;
                }
                g = g.gcd(&p);
            }
            return g.monic();
        }
        if self == other {
            return self.monic();
        }
        if coprime_by_specialization(self, other) {
            return Poly::one();
        }
        // Atoms present in only one argument cannot occur in the gcd: fold
        // over the coefficients with respect to all of them at once.
        let (sa, oa) = (self.atoms(), other.atoms());
        if !sa.is_subset(&oa) {
            return other.gcd_with_parts(self.coefficients_outside(&oa));
        }
        if !oa.is_subset(&sa) {
            return self.gcd_with_parts(other.coefficients_outside(&sa));
        }
        if let Some(g) = heuristic_gcd(&integer_primitive(self), &integer_primitive(other)) {
            return g.monic();
        }
        let x = match self.smallest_shared_atom(other) {
            Some(x) => x,
            None => return Poly::one(),
        };
        let ca = content_in(self, &x);
        let cb = content_in(other, &x);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let c = ca.gcd(&cb);
        let g = prs_gcd(&pa, &pb, &x);
        c.mul(&g).monic()
    }

    /// Coefficients with respect to the atoms not in `keep`; each involves
    /// only atoms of `keep`.
    fn coefficients_outside(&self, keep: &BTreeSet<Atom>) -> Vec<Poly> {
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inner, outer) = m.partition(|a| keep.contains(a));
            groups.entry(outer).or_default().add_term(inner, c.clone());
        }
        let mut parts: Vec<Poly> = groups.into_values().collect();
        parts.sort_by_key(|p| p.len());
        parts
    }

    fn gcd_with_parts(&self, parts: Vec<Poly>) -> Poly {
        let mut g = self.clone();
        for p in parts {
            g = g.gcd(&p);
            if g.is_constant() {
                return Poly::one();
            }
        }
        g.monic()
    }

    /// Exp-free coefficients of the distinct exponential atoms.
    fn exp_coefficients(&self) -> Vec<Poly> {
        let mut groups: BTreeMap<Option<Atom>, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.partition(Atom::is_exp);
            let key = e.factors().first().map(|(a, _)| a.clone());
            groups.entry(key).or_default().add_term(rest, c.clone());
        }
        groups.into_values().collect()
    }

    /// Square root when `self` is the square of a polynomial with rational
    /// coefficients and positive leading coefficient.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (lm, lc) = self.leading()?;
        let root_c = rational_sqrt(lc)?;
        let mut root_factors = Vec::new();
        for (a, e) in lm.factors() {
            if e % 2 != 0 || a.is_exp() {
                return None;
            }
            root_factors.push((a.clone(), e / 2));
        }
        let lead = Poly::term(root_c.clone(), Monomial::from_factors(root_factors));
        let (lead_m, _) = lead.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let two_lead_c = &root_c * rat(2);
        let mut s = lead;
        let mut r = self.sub(&s.mul(&s));
        let mut guard = self.len() + 2;
        while !r.is_zero() {
            if guard == 0 {
                return None;
            }
            guard -= 1;
            let (rm, rc) = r.leading().map(|(m, c)| (m.clone(), c.clone()))?;
            let tm = rm.div(&lead_m)?;
            if tm >= lead_m {
                return None;
            }
            let t = Poly::term(rc / &two_lead_c, tm);
            s = s.add(&t);
            r = self.sub(&s.mul(&s));
        }
        Some(s)
    }

    /// Square-free decomposition `self = c · Π fᵢ^i`, returned as the list
    /// of nonconstant `(fᵢ, i)` (each `fᵢ` monic) together with `c`.
    pub fn square_free(&self) -> (Rational, Vec<(Poly, u32)>) {
        let lc = self.leading_coeff();
        if self.is_constant() || self.has_exp() {
            return (lc.clone(), if self.is_constant() { vec![] } else { vec![(self.monic(), 1)] });
        }
        let mut factors: BTreeMap<u32, Poly> = BTreeMap::new();
        sqf_rec(&self.monic(), &mut factors);
        let list = factors
            .into_iter()
            .filter(|(_, f)| !f.is_constant())
            .map(|(i, f)| (f, i))
            .collect();
        (lc, list)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

fn sqf_rec(p: &Poly, out: &mut BTreeMap<u32, Poly>) {
    if p.is_constant() {
        return;
    }
    let x = p.atoms().into_iter().next().expect("nonconstant");
    let cont = content_in(p, &x);
    let pp = p.div_exact(&cont).expect("content divides").monic();
    sqf_rec(&cont, out);
    // Yun's algorithm in the main atom.
    let d = pp.deriv_atom(&x);
    let a = pp.gcd(&d);
    let mut b = pp.div_exact(&a).expect("gcd divides");
    let mut c = d.div_exact(&a).expect("gcd divides");
    let mut i = 1;
    loop {
        let db = b.deriv_atom(&x);
        let dd = c.sub(&db);
        if b.is_constant() {
            break;
        }
        let f = b.gcd(&dd);
        if !f.is_constant() {
            let entry = out.entry(i).or_insert_with(Poly::one);
            *entry = entry.mul(&f).monic();
        }
        b = b.div_exact(&f).expect("gcd divides");
        c = dd.div_exact(&f).expect("gcd divides");
        i += 1;
        if i > 64 {
            break;
        }
    }
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer();
    let d = c.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, MODULUS - 2)
}

fn reduce(c: &Rational) -> Option<u64> {
    let m = BigInt::from(MODULUS);
    let residue = |v: &BigInt| -> u64 {
        let r = v % &m;
        let r = if r.is_negative() { r + &m } else { r };
        r.try_into().expect("reduced below modulus")
    };
    let d = residue(c.denom());
    (d != 0).then(|| mul_mod(residue(c.numer()), inv_mod(d)))
}

/// Image in `F_p[x]` with every other atom replaced by a fixed residue;
/// index `i` is the coefficient of `x^i`.
fn specialize(p: &Poly, x: &Atom, values: &BTreeMap<Atom, u64>) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(x) as usize + 1];
    for (m, c) in p.terms() {
        let mut v = reduce(c)?;
        let mut e = 0;
        for (a, k) in m.factors() {
            if a == x {
                e = *k as usize;
            } else {
                v = mul_mod(v, pow_mod(values[a], *k as u64));
            }
        }
        out[e] = (out[e] + v) % MODULUS;
    }
    Some(out)
}

fn univariate_gcd_degree(a: &[u64], b: &[u64]) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let (mut f, mut g) = (a.to_vec(), b.to_vec());
    trim(&mut f);
    trim(&mut g);
    while !g.is_empty() {
        let lead = inv_mod(g[g.len() - 1]);
        while f.len() >= g.len() {
            let q = mul_mod(f[f.len() - 1], lead);
            let shift = f.len() - g.len();
            for (i, c) in g.iter().enumerate() {
                f[i + shift] = (f[i + shift] + MODULUS - mul_mod(q, *c)) % MODULUS;
            }
            trim(&mut f);
            if f.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    f.len().saturating_sub(1)
}

/// Sufficient test for a trivial gcd: for each shared non-exp atom `x`,
/// a degree-preserving image in `F_p[x]` has a constant gcd, so `x` cannot
/// occur in the true gcd.
fn coprime_by_specialization(a: &Poly, b: &Poly) -> bool {
    let (sa, sb) = (a.atoms(), b.atoms());
    let values: BTreeMap<Atom, u64> = sa
        .union(&sb)
        .enumerate()
        .map(|(i, at)| (at.clone(), pow_mod(3 + 2 * i as u64, 7 + i as u64)))
        .collect();
    for x in sa.intersection(&sb) {
        if x.is_exp() {
            return false;
        }
        let (Some(fa), Some(fb)) = (specialize(a, x, &values), specialize(b, x, &values)) else {
            return false;
        };
        if fa.last() == Some(&0) || fb.last() == Some(&0) {
            return false;
        }
        if univariate_gcd_degree(&fa, &fb) > 0 {
            return false;
        }
    }
    true
}

/// Integer multiple with coprime integer coefficients.
fn integer_primitive(p: &Poly) -> Poly {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    p.scale(&Rational::new(den, num))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

fn eval_atom(p: &Poly, x: &Atom, v: &BigInt) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let (e, rest) = m.split_atom(x);
        out.add_term(rest, mul(c, &Rational::from_integer(num_traits::pow(v.clone(), e as usize))));
    }
    out
}

fn symmetric_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * BigInt::from(2) > *m {
        r - m
    } else {
        r
    }
}

const HEURISTIC_BITS: u64 = 6000;

/// Heuristic gcd of integer polynomials: evaluate one atom at a large
/// integer, recurse, rebuild ξ-adically and accept the candidate only if it
/// divides both inputs. `None` when no candidate is found.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.is_zero() {
        return Some(b.clone());
    }
    if b.is_zero() {
        return Some(a.clone());
    }
    let content = max_content(a).gcd(&max_content(b));
    let (a, b) = (&integer_primitive(a), &integer_primitive(b));
    let atoms: BTreeSet<Atom> = a.atoms().union(&b.atoms()).cloned().collect();
    let Some(x) = atoms.first() else {
        return Some(Poly::constant(Rational::from_integer(content)));
    };
    let norm = max_norm(a).min(max_norm(b));
    let mut xi: BigInt = norm * BigInt::from(2) + BigInt::from(29);
    for _ in 0..6 {
        if xi.bits() > HEURISTIC_BITS {
            return None;
        }
        if let Some(gamma) = heuristic_gcd(&eval_atom(a, x, &xi), &eval_atom(b, x, &xi)) {
            let mut gamma = gamma;
            let mut g = Poly::zero();
            let mut i = 0;
            while !gamma.is_zero() {
                let digit = gamma.map_coeffs(|c| {
                    Rational::from_integer(symmetric_mod(c.numer(), &xi))
                });
                let shift = Monomial::power(x.clone(), i);
                g = g.add(&digit.mul_term(&shift, &Rational::one()));
                gamma = gamma
                    .sub(&digit)
                    .map_coeffs(|c| Rational::new_raw(c.numer() / &xi, BigInt::one()));
                i += 1;
            }
            if !g.is_zero() {
                let g = integer_primitive(&g);
                if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.scale(&Rational::from_integer(content)));
                }
            }
        }
        xi = xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

fn max_content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |g, (_, c)| g.gcd(c.numer()))
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
pub fn content_in(p: &Poly, x: &Atom) -> Poly {
    let coeffs = p.to_univariate(x);
    let mut g = Poly::zero();
    for c in coeffs.iter().rev() {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.monic() } else { g.gcd(c) };
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn primitive_part(p: &Poly, x: &Atom) -> Poly {
    let c = content_in(p, x);
    p.div_exact(&c).expect("content divides").monic()
}

/// `lc(g)^(δ+1)·f mod g` with `δ = deg f − deg g`.
fn pseudo_rem(f: &Poly, g: &Poly, x: &Atom) -> Poly {
    let gu = g.to_univariate(x);
    let dg = gu.len() - 1;
    let lc = gu[dg].clone();
    let df = f.degree_in(x) as usize;
    let mut r = f.clone();
    for i in (0..=df - dg).rev() {
        let ru = r.to_univariate(x);
        if !r.is_zero() && ru.len() - 1 == dg + i {
            let shift = Monomial::power(x.clone(), i as u32);
            let sub = g.mul(&ru[dg + i]).mul_term(&shift, &Rational::one());
            r = r.mul(&lc).sub(&sub);
        } else {
            r = r.mul(&lc);
        }
    }
    r
}

/// Subresultant remainder sequence on primitive inputs.
fn prs_gcd(a: &Poly, b: &Poly, x: &Atom) -> Poly {
    let (mut f, mut g) = if a.degree_in(x) >= b.degree_in(x) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let mut lead = Poly::one();
    let mut psi = Poly::one();
    loop {
        if g.degree_in(x) == 0 {
            return Poly::one();
        }
        let delta = f.degree_in(x) - g.degree_in(x);
        let r = pseudo_rem(&f, &g, x);
        if r.is_zero() {
            return primitive_part(&g, x);
        }
        let divisor = lead.mul(&psi.pow(delta));
        f = g;
        g = r.div_exact(&divisor).expect("subresultant division is exact");
        lead = f.to_univariate(x).pop().expect("nonzero");
        psi = if delta == 0 {
            psi
        } else {
            lead.pow(delta)
                .div_exact(&psi.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::write_poly(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::atom(Atom::var("x"))
    }
    fn y() -> Poly {
        Poly::atom(Atom::var("y"))
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let mx = Monomial::atom(Atom::var("x"));
        let my = Monomial::atom(Atom::var("y"));
        assert!(Monomial::one() < mx);
        assert!(my < mx);
        assert!(my.mul(&my) < mx);
        assert!(my < my.mul(&mx));
    }

    #[test]
    fn gcd_cancels_common_factor() {
        let a = x().mul(&x()).sub(&y().mul(&y()));
        let b = x().sub(&y());
        assert_eq!(a.gcd(&b), b.monic());
        assert_eq!(a.div_exact(&b).unwrap(), x().add(&y()));
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = x().add(&Poly::one());
        let b = y().add(&Poly::one());
        assert!(a.gcd(&b).is_one());
    }

    fn random_poly(rng: &mut impl rand::Rng, degree: u32) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..rng.gen_range(1..=4) {
            let mut m = Poly::constant(rat2(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
            for _ in 0..rng.gen_range(0..=degree) {
                let v = if rng.gen_bool(0.5) { x() } else { y() };
                m = m.mul(&v);
            }
            p = p.add(&m);
        }
        p
    }

    #[test]
    fn gcd_matches_remainder_sequence() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let vx = Atom::var("x");
        for _ in 0..100 {
            let c = random_poly(&mut rng, 2);
            let a = random_poly(&mut rng, 3).mul(&c);
            let b = random_poly(&mut rng, 3).mul(&c);
            if a.is_zero() || b.is_zero() || a.is_constant() || b.is_constant() {
                continue;
            }
            let g = a.gcd(&b);
            assert!(a.div_exact(&g).is_some() && b.div_exact(&g).is_some());
            if !c.is_zero() {
                assert!(g.div_exact(&c).is_some(), "{a} | {b} -> {g}");
            }
            if a.degree_in(&vx) > 0 && b.degree_in(&vx) > 0 {
                let (ca, cb) = (content_in(&a, &vx), content_in(&b, &vx));
                let reference = prs_gcd(
                    &a.div_exact(&ca).unwrap(),
                    &b.div_exact(&cb).unwrap(),
                    &vx,
                )
                .mul(&ca.gcd(&cb))
                .monic();
                assert_eq!(g, reference);
            }
        }
    }

    #[test]
    fn coprimality_filter_never_rejects_common_factors() {
        let a = x().mul(&y()).add(&Poly::one()).mul(&x().sub(&y()));
        let b = x().mul(&y()).add(&Poly::one()).mul(&x().add(&Poly::one()));
        assert!(!coprime_by_specialization(&a, &b));
        assert!(coprime_by_specialization(&x().sub(&y()), &x().add(&Poly::one())));
    }

    #[test]
    fn sqrt_of_square() {
        let p = x().add(&y().scale(&rat(3))).sub(&Poly::one());
        let sq = p.mul(&p);
        let r = sq.sqrt().unwrap();
        assert!(r == p || r == p.neg());
        assert!(x().mul(&y()).sqrt().is_none());
    }

    #[test]
    fn square_free_detects_powers() {
        let p = x().add(&y());
        let (_, f) = p.pow(3).mul(&x()).square_free();
        assert!(f.contains(&(p.monic(), 3)));
        assert!(f.contains(&(x(), 1)));
    }
}
