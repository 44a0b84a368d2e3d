use std::collections::BTreeMap;
use std::fmt;

use crate::expr::Expr;
use crate::poly::rat;

/// Linear differential operator `Σ c_α D^α` over a fixed list of variables.
/// Coefficients are stored to the left of the derivations and none is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearOperator {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Expr>,
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// All multi-indices `γ ≤ α` componentwise.
fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &a in alpha {
        let mut next = Vec::new();
        for prefix in &out {
            for g in 0..=a {
                let mut p = prefix.clone();
                p.push(g);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

impl LinearOperator {
    pub fn zero(vars: Vec<String>) -> Self {
        LinearOperator {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(vars: Vec<String>, terms: BTreeMap<Vec<u32>, Expr>) -> Self {
        let n = vars.len();
        let terms = terms
            .into_iter()
            .filter(|(idx, c)| {
                assert_eq!(idx.len(), n, "multi-index length matches variable count");
                !c.is_zero()
            })
            .collect();
        LinearOperator { vars, terms }
    }

    pub fn scalar(vars: Vec<String>, c: Expr) -> Self {
        let idx = vec![0; vars.len()];
        let mut terms = BTreeMap::new();
        terms.insert(idx, c);
        LinearOperator::from_terms(vars, terms)
    }

    /// The derivation `D_{vars[i]}`.
    pub fn derivation(vars: Vec<String>, i: usize) -> Self {
        let mut idx = vec![0; vars.len()];
        idx[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(idx, Expr::one());
        LinearOperator { vars, terms }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Expr> {
        &self.terms
    }

    pub fn coeff(&self, idx: &[u32]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, idx: Vec<u32>, c: &Expr) {
        let slot = self.terms.entry(idx.clone()).or_default();
        *slot = &*slot + c;
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn add(&self, other: &LinearOperator) -> LinearOperator {
        assert_eq!(self.vars, other.vars, "operators over the same variables");
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &LinearOperator) -> LinearOperator {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinearOperator {
        self.scale(&Expr::int(-1))
    }

    /// Left multiplication by a scalar.
    pub fn scale(&self, c: &Expr) -> LinearOperator {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), c * v)).collect();
        LinearOperator::from_terms(self.vars.clone(), terms)
    }

    pub fn add_scalar(&self, c: &Expr) -> LinearOperator {
        self.add(&LinearOperator::scalar(self.vars.clone(), c.clone()))
    }

    pub fn apply(&self, u: &Expr) -> Expr {
        let mut total = Expr::zero();
        for (idx, c) in &self.terms {
            let d = u.diff_multi(&self.vars, idx);
            if !d.is_zero() {
                total = &total + &(c * &d);
            }
        }
        total
    }

    /// `self ∘ other`, expanded by the generalized Leibniz rule.
    pub fn compose(&self, other: &LinearOperator) -> LinearOperator {
        assert_eq!(self.vars, other.vars, "operators over the same variables");
        let mut out = LinearOperator::zero(self.vars.clone());
        for (alpha, a) in &self.terms {
            for gamma in sub_indices(alpha) {
                let mut mult = 1i64;
                for (al, g) in alpha.iter().zip(&gamma) {
                    mult *= binomial(*al, *g);
                }
                for (beta, b) in &other.terms {
                    let db = b.diff_multi(&self.vars, &gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let idx: Vec<u32> = alpha
                        .iter()
                        .zip(&gamma)
                        .zip(beta)
                        .map(|((al, g), be)| al - g + be)
                        .collect();
                    let c = &(a * &db) * &Expr::rational(rat(mult));
                    out.add_term(idx, &c);
                }
            }
        }
        out
    }

    /// Terms of exactly the given total order.
    pub fn homogeneous_part(&self, order: u32) -> LinearOperator {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.iter().sum::<u32>() == order)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        LinearOperator::from_terms(self.vars.clone(), terms)
    }

    pub fn substitute_functions(
        &self,
        f: &dyn Fn(&crate::poly::Application) -> crate::error::Result<Option<Expr>>,
    ) -> crate::error::Result<LinearOperator> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(k.clone(), v.subst_functions(f)?);
        }
        Ok(LinearOperator::from_terms(self.vars.clone(), terms))
    }
}

impl fmt::Display for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::operator_text(self))
    }
}
