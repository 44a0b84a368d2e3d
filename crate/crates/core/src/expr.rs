//! Exact scalar expressions: rational functions over the rationals in
//! [`Atom`]s, kept in canonical form (cancelled numerator/denominator with
//! a denominator of leading coefficient one).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ExprError, Result};
use crate::poly::{rat, Application, Atom, Monomial, Poly, Quadrature, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Inner {
    num: Poly,
    den: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Inner>);

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    fn raw(num: Poly, den: Poly) -> Expr {
        Expr(Arc::new(Inner { num, den }))
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr::raw(p, Poly::one())
    }

    /// Builds `num / den` in canonical form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Expr> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Expr::normalize_den(num, den))
    }

    // Assumes num/den already coprime.
    fn normalize_den(num: Poly, den: Poly) -> Expr {
        let lc = den.leading_coeff();
        let (mut num, mut den) = if lc.is_one() {
            (num, den)
        } else {
            let inv = Rational::one() / lc;
            (num.scale(&inv), den.scale(&inv))
        };
        // exp(a) is a unit: move a lone exponential factor upstairs.
        if den.len() == 1 {
            let (m, _) = den.leading().expect("nonzero");
            if let Some(Atom::Exp(arg)) = m.exp_atom().cloned() {
                let inv = Monomial::atom(Atom::Exp(Arc::new(-&*arg)));
                let (_, rest) = m.partition(|a| a.is_exp());
                num = num.mul_term(&inv, &Rational::one());
                den = Poly::term(Rational::one(), rest);
            }
        }
        Expr::raw(num, den)
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::from_poly(Poly::constant(rat(n)))
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::from_poly(Poly::constant(r))
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_poly(Poly::atom(Atom::var(name)))
    }

    pub fn atom(a: Atom) -> Expr {
        match a {
            Atom::Exp(arg) => Expr::exp(&arg),
            other => Expr::from_poly(Poly::atom(other)),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.0.num
    }

    pub fn den(&self) -> &Poly {
        &self.0.den
    }

    /// Structural zero test on the canonical form.
    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.0.num.as_constant()?;
        let d = self.0.den.as_constant()?;
        Some(n / d)
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut a = self.0.num.atoms();
        a.extend(self.0.den.atoms());
        a
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.0.num.depends_on(var) || self.0.den.depends_on(var)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for a in self.atoms() {
            a.collect_vars(out);
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn has_transcendental(&self) -> bool {
        self.atoms().iter().any(Atom::is_transcendental)
    }

    /// True when some atom is an application of a function symbol.
    pub fn has_function_symbols(&self) -> bool {
        fn rec(a: &Atom) -> bool {
            match a {
                Atom::Var(_) => false,
                Atom::App(_) => true,
                Atom::Exp(e) | Atom::Ln(e) => e.has_function_symbols(),
                Atom::Int(q) => {
                    q.integrand.has_function_symbols()
                        || q.bindings.iter().any(|(_, e)| e.has_function_symbols())
                }
            }
        }
        self.atoms().iter().any(rec)
    }

    pub fn has_quadrature(&self) -> bool {
        fn rec(a: &Atom) -> bool {
            match a {
                Atom::Var(_) => false,
                Atom::App(app) => app.args.iter().any(Expr::has_quadrature),
                Atom::Exp(e) | Atom::Ln(e) => e.has_quadrature(),
                Atom::Int(_) => true,
            }
        }
        self.atoms().iter().any(rec)
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        Ok(self * &other.recip()?)
    }

    pub fn recip(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Expr::normalize_den(self.0.den.clone(), self.0.num.clone()))
    }

    pub fn pow(&self, e: i32) -> Result<Expr> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let e = e as u32;
        Ok(Expr::raw(self.0.num.pow(e), self.0.den.pow(e)).renormalized())
    }

    fn renormalized(self) -> Expr {
        let Inner { num, den } = (*self.0).clone();
        Expr::normalize_den(num, den)
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::raw(self.0.num.scale(c), self.0.den.clone())
    }

    /// Leading rational coefficient of the numerator.
    pub fn leading_coeff(&self) -> Rational {
        self.0.num.leading_coeff()
    }

    pub fn is_negative_leading(&self) -> bool {
        self.leading_coeff().is_negative()
    }

    // ---- elementary constructors ------------------------------------

    /// `exp(arg)`, with integer multiples of logarithms pulled out as powers.
    pub fn exp(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        let mut factor = Expr::one();
        let mut rest = arg.clone();
        if let Some(d) = arg.den().as_constant() {
            let mut kept = Poly::zero();
            for (m, c) in arg.num().terms() {
                let k = c / &d;
                let f = m.factors();
                if f.len() == 1 && f[0].1 == 1 && k.is_integer() {
                    if let Atom::Ln(inner) = &f[0].0 {
                        if let Some(ki) = k.to_integer().to_i32() {
                            if let Ok(p) = inner.pow(ki) {
                                factor = &factor * &p;
                                continue;
                            }
                        }
                    }
                }
                kept.add_term(m.clone(), k);
            }
            rest = Expr::from_poly(kept);
        }
        if rest.is_zero() {
            return factor;
        }
        let e = Expr::from_poly(Poly::atom(Atom::Exp(Arc::new(rest))));
        &factor * &e
    }

    pub fn ln(arg: &Expr) -> Result<Expr> {
        if arg.is_zero() {
            return Err(ExprError::Degenerate("ln(0)".into()));
        }
        if arg.is_one() {
            return Ok(Expr::zero());
        }
        if arg.den().is_one() && arg.num().len() == 1 {
            let (m, c) = arg.num().leading().expect("nonzero");
            if c.is_one() && m.factors().len() == 1 {
                if let Atom::Exp(inner) = &m.factors()[0].0 {
                    return Ok((**inner).clone());
                }
            }
        }
        Ok(Expr::from_poly(Poly::atom(Atom::Ln(Arc::new(arg.clone())))))
    }

    pub fn app(name: &str, args: Vec<Expr>) -> Expr {
        let n = args.len();
        Expr::app_deriv(name, vec![0; n], args)
    }

    pub fn app_deriv(name: &str, derivs: Vec<u32>, args: Vec<Expr>) -> Expr {
        assert_eq!(derivs.len(), args.len(), "derivative annotation per slot");
        Expr::from_poly(Poly::atom(Atom::App(Arc::new(Application {
            name: Arc::from(name),
            derivs,
            args,
        }))))
    }

    /// Unevaluated antiderivative, split into `var`-free multiples of
    /// `var`-dependent integrands where possible.
    pub fn integral(f: &Expr, var: &str, bindings: &[(Arc<str>, Expr)]) -> Expr {
        if f.is_zero() {
            return Expr::zero();
        }
        let params: BTreeMap<String, Expr> = bindings
            .iter()
            .map(|(p, e)| (p.to_string(), e.clone()))
            .collect();
        let node = |g: Expr| -> Expr {
            let used: Vec<(Arc<str>, Expr)> = bindings
                .iter()
                .filter(|(p, _)| g.depends_on(p))
                .cloned()
                .collect();
            Expr::from_poly(Poly::atom(Atom::Int(Arc::new(Quadrature {
                integrand: g,
                var: Arc::from(var),
                bindings: used,
            }))))
        };
        let bind = |e: Expr| -> Expr {
            if params.is_empty() {
                e
            } else {
                e.subst_vars(&params).expect("binding substitution")
            }
        };
        if f.den().depends_on(var) {
            let c = f.leading_coeff();
            let g = f.scale(&(Rational::one() / &c));
            return &node(g) * &Expr::rational(c);
        }
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in f.num().terms() {
            let (dep, free) = m.partition(|a| a.depends_on(var));
            groups
                .entry(free)
                .or_default()
                .add_term(dep, c.clone());
        }
        let den = Expr::from_poly(f.den().clone());
        let mut total = Expr::zero();
        for (free, dep) in groups {
            let lc = dep.leading_coeff();
            let dep = dep.scale(&(Rational::one() / &lc));
            let outer = Expr::from_poly(Poly::term(lc, free));
            let outer = bind(outer.checked_div(&den).expect("nonzero denominator"));
            let inner = if dep.is_one() {
                Expr::var(var)
            } else {
                node(Expr::from_poly(dep))
            };
            total = &total + &(&outer * &inner);
        }
        total
    }

    // ---- calculus -----------------------------------------------------

    pub fn diff(&self, var: &str) -> Expr {
        if !self.depends_on(var) {
            return Expr::zero();
        }
        let dn = poly_diff(self.num(), var);
        if self.den().is_one() {
            return dn;
        }
        let den = Expr::from_poly(self.den().clone());
        let dd = poly_diff(self.den(), var);
        let q = self.clone();
        // (n/d)' = n'/d - (n/d)(d'/d)
        let a = dn.checked_div(&den).expect("nonzero denominator");
        let b = &q * &dd.checked_div(&den).expect("nonzero denominator");
        &a - &b
    }

    /// Iterated partial derivative, one order per variable in `vars`.
    pub fn diff_multi(&self, vars: &[String], orders: &[u32]) -> Expr {
        let mut e = self.clone();
        for (v, &k) in vars.iter().zip(orders) {
            for _ in 0..k {
                e = e.diff(v);
                if e.is_zero() {
                    return e;
                }
            }
        }
        e
    }

    // ---- substitution ---------------------------------------------------

    /// Rebuilds the expression, replacing atoms for which `f` returns a value.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Result<Option<Expr>>) -> Result<Expr> {
        let mut cache: BTreeMap<Atom, Expr> = BTreeMap::new();
        let mut eval_poly = |p: &Poly, cache: &mut BTreeMap<Atom, Expr>| -> Result<Expr> {
            if p.atoms().is_empty() {
                return Ok(Expr::from_poly(p.clone()));
            }
            for a in p.atoms() {
                if !cache.contains_key(&a) {
                    let v = match f(&a)? {
                        Some(v) => v,
                        None => rebuild_atom(&a, f)?,
                    };
                    cache.insert(a, v);
                }
            }
            let mut powers: BTreeMap<(Atom, u32), Expr> = BTreeMap::new();
            let mut power = |a: &Atom, e: u32| -> Result<Expr> {
                if let Some(v) = powers.get(&(a.clone(), e)) {
                    return Ok(v.clone());
                }
                let v = cache[a].pow(e as i32)?;
                powers.insert((a.clone(), e), v.clone());
                Ok(v)
            };
            if p.atoms().iter().all(|a| cache[a].is_polynomial()) {
                let mut total = Poly::zero();
                for (m, c) in p.terms() {
                    let mut term = Poly::constant(c.clone());
                    for (a, e) in m.factors() {
                        term = term.mul(power(a, *e)?.num());
                    }
                    total = total.add(&term);
                }
                return Ok(Expr::from_poly(total));
            }
            let mut total = Expr::zero();
            for (m, c) in p.terms() {
                let mut term = Expr::rational(c.clone());
                for (a, e) in m.factors() {
                    term = &term * &power(a, *e)?;
                }
                total = &total + &term;
            }
            Ok(total)
        };
        let n = eval_poly(self.num(), &mut cache)?;
        let d = eval_poly(self.den(), &mut cache)?;
        n.checked_div(&d)
    }

    /// Substitutes expressions for free variables.
    pub fn subst_vars(&self, map: &BTreeMap<String, Expr>) -> Result<Expr> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let mut f = |a: &Atom| -> Result<Option<Expr>> {
            match a {
                Atom::Var(v) => Ok(map.get(&**v).cloned()),
                Atom::Int(q) => subst_in_quadrature(q, map).map(Some),
                _ => Ok(None),
            }
        };
        self.map_atoms(&mut f)
    }

    pub fn subst_var(&self, var: &str, value: &Expr) -> Result<Expr> {
        let mut m = BTreeMap::new();
        m.insert(var.to_string(), value.clone());
        self.subst_vars(&m)
    }

    /// Replaces applications of function symbols.
    pub fn subst_functions(
        &self,
        f: &dyn Fn(&Application) -> Result<Option<Expr>>,
    ) -> Result<Expr> {
        let mut g = |a: &Atom| -> Result<Option<Expr>> {
            match a {
                Atom::App(app) => {
                    let args = app
                        .args
                        .iter()
                        .map(|e| e.subst_functions(f))
                        .collect::<Result<Vec<_>>>()?;
                    let rebuilt = Application {
                        name: app.name.clone(),
                        derivs: app.derivs.clone(),
                        args,
                    };
                    match f(&rebuilt)? {
                        Some(v) => Ok(Some(v)),
                        None => Ok(Some(Expr::app_deriv(
                            &rebuilt.name,
                            rebuilt.derivs.clone(),
                            rebuilt.args.clone(),
                        ))),
                    }
                }
                Atom::Int(q) => {
                    let integrand = q.integrand.subst_functions(f)?;
                    let bindings = q
                        .bindings
                        .iter()
                        .map(|(p, e)| Ok((p.clone(), e.subst_functions(f)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Some(Expr::integral(&integrand, &q.var, &bindings)))
                }
                Atom::Exp(e) => Ok(Some(Expr::exp(&e.subst_functions(f)?))),
                Atom::Ln(e) => Ok(Some(Expr::ln(&e.subst_functions(f)?)?)),
                Atom::Var(_) => Ok(None),
            }
        };
        self.map_atoms(&mut g)
    }

    /// Coefficients of `self` viewed as linear in the given atoms.
    /// Returns `None` if some atom enters nonlinearly or through the
    /// denominator.
    pub fn linear_coefficients(&self, atoms: &[Atom]) -> Option<(Vec<Expr>, Expr)> {
        if atoms.iter().any(|a| self.den().contains_atom(a)) {
            return None;
        }
        let den = Expr::from_poly(self.den().clone());
        let mut coeffs = vec![Poly::zero(); atoms.len()];
        let mut rest = Poly::zero();
        for (m, c) in self.num().terms() {
            let hits: Vec<usize> = atoms
                .iter()
                .enumerate()
                .filter(|(_, a)| m.exponent(a) > 0)
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [] => rest.add_term(m.clone(), c.clone()),
                [i] if m.exponent(&atoms[*i]) == 1 => {
                    let (_, r) = m.split_atom(&atoms[*i]);
                    coeffs[*i].add_term(r, c.clone());
                }
                _ => return None,
            }
        }
        let coeffs = coeffs
            .into_iter()
            .map(|p| Expr::from_poly(p).checked_div(&den).expect("nonzero"))
            .collect();
        let rest = Expr::from_poly(rest).checked_div(&den).expect("nonzero");
        Some((coeffs, rest))
    }
}

fn rebuild_atom(a: &Atom, f: &mut dyn FnMut(&Atom) -> Result<Option<Expr>>) -> Result<Expr> {
    match a {
        Atom::Var(_) => Ok(Expr::atom(a.clone())),
        Atom::App(app) => {
            let args = app
                .args
                .iter()
                .map(|e| e.map_atoms(f))
                .collect::<Result<Vec<_>>>()?;
            Ok(Expr::app_deriv(&app.name, app.derivs.clone(), args))
        }
        Atom::Exp(e) => Ok(Expr::exp(&e.map_atoms(f)?)),
        Atom::Ln(e) => Expr::ln(&e.map_atoms(f)?),
        Atom::Int(q) => {
            let integrand = q.integrand.map_atoms(f)?;
            let bindings = q
                .bindings
                .iter()
                .map(|(p, e)| Ok((p.clone(), e.map_atoms(f)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Expr::integral(&integrand, &q.var, &bindings))
        }
    }
}

fn subst_in_quadrature(q: &Quadrature, map: &BTreeMap<String, Expr>) -> Result<Expr> {
    if map.contains_key(&*q.var) {
        return Err(ExprError::Unsupported(format!(
            "substituting the integration variable {} of an unevaluated antiderivative",
            q.var
        )));
    }
    let params: BTreeSet<&str> = q.bindings.iter().map(|(p, _)| &**p).collect();
    let mut direct = BTreeMap::new();
    let mut bindings: Vec<(Arc<str>, Expr)> = q
        .bindings
        .iter()
        .map(|(p, e)| Ok((p.clone(), e.subst_vars(map)?)))
        .collect::<Result<Vec<_>>>()?;
    for (w, e) in map {
        if params.contains(w.as_str()) || !q.integrand.depends_on(w) {
            continue;
        }
        if e.depends_on(&q.var) {
            bindings.push((Arc::from(w.as_str()), e.clone()));
        } else {
            direct.insert(w.clone(), e.clone());
        }
    }
    let integrand = q.integrand.subst_vars(&direct)?;
    Ok(Expr::integral(&integrand, &q.var, &bindings))
}

/// Derivative of an atom with respect to a variable.
pub fn atom_diff(a: &Atom, var: &str) -> Expr {
    match a {
        Atom::Var(v) => {
            if &**v == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::App(app) => {
            let mut total = Expr::zero();
            for (j, arg) in app.args.iter().enumerate() {
                let da = arg.diff(var);
                if da.is_zero() {
                    continue;
                }
                let mut derivs = app.derivs.clone();
                derivs[j] += 1;
                let f = Expr::app_deriv(&app.name, derivs, app.args.clone());
                total = &total + &(&f * &da);
            }
            total
        }
        Atom::Exp(arg) => &Expr::exp(arg) * &arg.diff(var),
        Atom::Ln(arg) => arg
            .diff(var)
            .checked_div(arg)
            .expect("ln argument is nonzero"),
        Atom::Int(q) => {
            let params: BTreeMap<String, Expr> = q
                .bindings
                .iter()
                .map(|(p, e)| (p.to_string(), e.clone()))
                .collect();
            let mut total = Expr::zero();
            if &*q.var == var {
                total = &total + &q.integrand.subst_vars(&params).expect("bind params");
            } else if !params.contains_key(var) && q.integrand.depends_on(var) {
                let d = q.integrand.diff(var);
                total = &total + &Expr::integral(&d, &q.var, &q.bindings);
            }
            for (p, e) in &q.bindings {
                let de = e.diff(var);
                if de.is_zero() {
                    continue;
                }
                let d = q.integrand.diff(p);
                total = &total + &(&Expr::integral(&d, &q.var, &q.bindings) * &de);
            }
            total
        }
    }
}

fn poly_diff(p: &Poly, var: &str) -> Expr {
    let mut total = Expr::zero();
    for a in p.atoms() {
        if !a.depends_on(var) {
            continue;
        }
        if let Atom::Exp(g) = &a {
            // exp atoms carry exponent one: d(p)/d(exp g) · exp(g) · g'
            let dp = p.deriv_atom(&a);
            let part = &Expr::from_poly(poly_times_atom(&dp, &a)) * &g.diff(var);
            total = &total + &part;
            continue;
        }
        let dp = Expr::from_poly(p.deriv_atom(&a));
        let da = atom_diff(&a, var);
        total = &total + &(&dp * &da);
    }
    total
}

fn poly_times_atom(p: &Poly, a: &Atom) -> Poly {
    p.mul_term(&Monomial::atom(a.clone()), &Rational::one())
}

// ---- operator impls ------------------------------------------------------

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den() == rhs.den() {
            return Expr::from_parts(self.num().add(rhs.num()), self.den().clone())
                .expect("nonzero denominator");
        }
        let g = self.den().gcd(rhs.den());
        let b1 = self.den().div_exact(&g).expect("gcd divides");
        let d1 = rhs.den().div_exact(&g).expect("gcd divides");
        let num = self.num().mul(&d1).add(&rhs.num().mul(&b1));
        if num.is_zero() {
            return Expr::zero();
        }
        let exp = [self.num(), self.den(), rhs.num(), rhs.den()].iter().any(|p| p.has_exp());
        if exp {
            return Expr::from_parts(num, b1.mul(rhs.den())).expect("nonzero denominator");
        }
        // Reduced inputs: only factors of gcd(b, d) can cancel.
        let g2 = num.gcd(&g);
        let num = num.div_exact(&g2).expect("gcd divides");
        let den = b1.mul(&d1).mul(&g.div_exact(&g2).expect("gcd divides"));
        Expr::normalize_den(num, den)
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den().is_one() && rhs.den().is_one() {
            return Expr::from_poly(self.num().mul(rhs.num()));
        }
        let g1 = self.num().gcd(rhs.den());
        let g2 = rhs.num().gcd(self.den());
        let a = self.num().div_exact(&g1).expect("gcd divides");
        let d = rhs.den().div_exact(&g1).expect("gcd divides");
        let c = rhs.num().div_exact(&g2).expect("gcd divides");
        let b = self.den().div_exact(&g2).expect("gcd divides");
        let num = a.mul(&c);
        let den = b.mul(&d);
        Expr::normalize_den(num, den)
    }
}

impl<'a> Neg for &'a Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::raw(self.num().neg(), self.den().clone())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<BigRational> for Expr {
    fn from(r: BigRational) -> Expr {
        Expr::rational(r)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::write_expr(f, self)
    }
}
