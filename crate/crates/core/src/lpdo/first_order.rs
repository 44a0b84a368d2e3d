use std::collections::BTreeMap;
use std::fmt;

use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::linalg::{determinant3, solve_expr};
use crate::lpdo::LinearOperator;

/// First-order operator `Σ b_i D_i + b_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FirstOrderOperator {
    pub vars: Vec<String>,
    pub field: Vec<Expr>,
    pub zeroth: Expr,
}

impl FirstOrderOperator {
    pub fn new(vars: Vec<String>, field: Vec<Expr>, zeroth: Expr) -> Self {
        assert_eq!(vars.len(), field.len(), "one coefficient per variable");
        FirstOrderOperator {
            vars,
            field,
            zeroth,
        }
    }

    pub fn pure(vars: Vec<String>, field: Vec<Expr>) -> Self {
        FirstOrderOperator::new(vars, field, Expr::zero())
    }

    pub fn coordinate(vars: Vec<String>, i: usize) -> Self {
        let field = (0..vars.len())
            .map(|j| if i == j { Expr::one() } else { Expr::zero() })
            .collect();
        FirstOrderOperator::pure(vars, field)
    }

    /// Reads a first-order operator; higher-order terms are an error.
    pub fn from_operator(op: &LinearOperator) -> Result<Self> {
        if op.order() > 1 {
            return Err(ExprError::UnsupportedOrder(op.order() as usize));
        }
        let n = op.vars().len();
        let field = (0..n)
            .map(|i| {
                let mut idx = vec![0; n];
                idx[i] = 1;
                op.coeff(&idx)
            })
            .collect();
        Ok(FirstOrderOperator::new(
            op.vars().to_vec(),
            field,
            op.coeff(&vec![0; n]),
        ))
    }

    pub fn to_operator(&self) -> LinearOperator {
        let n = self.vars.len();
        let mut terms = BTreeMap::new();
        for (i, c) in self.field.iter().enumerate() {
            let mut idx = vec![0; n];
            idx[i] = 1;
            terms.insert(idx, c.clone());
        }
        terms.insert(vec![0; n], self.zeroth.clone());
        LinearOperator::from_terms(self.vars.clone(), terms)
    }

    pub fn is_pure(&self) -> bool {
        self.zeroth.is_zero()
    }

    pub fn has_vector_part(&self) -> bool {
        self.field.iter().any(|c| !c.is_zero())
    }

    pub fn vector_part(&self) -> FirstOrderOperator {
        FirstOrderOperator::pure(self.vars.clone(), self.field.clone())
    }

    /// Index of the first nonzero vector-field coefficient.
    pub fn leading_index(&self) -> Option<usize> {
        self.field.iter().position(|c| !c.is_zero())
    }

    pub fn with_zeroth(&self, b0: Expr) -> FirstOrderOperator {
        FirstOrderOperator::new(self.vars.clone(), self.field.clone(), b0)
    }

    pub fn plus_scalar(&self, c: &Expr) -> FirstOrderOperator {
        self.with_zeroth(&self.zeroth + c)
    }

    pub fn apply(&self, u: &Expr) -> Expr {
        let mut total = &self.zeroth * u;
        for (v, c) in self.vars.iter().zip(&self.field) {
            if !c.is_zero() {
                total = &total + &(c * &u.diff(v));
            }
        }
        total
    }

    /// Applies only the vector-field part.
    pub fn derive(&self, u: &Expr) -> Expr {
        self.vector_part().apply(u)
    }

    pub fn scale(&self, c: &Expr) -> FirstOrderOperator {
        FirstOrderOperator::new(
            self.vars.clone(),
            self.field.iter().map(|b| c * b).collect(),
            c * &self.zeroth,
        )
    }

    pub fn add(&self, o: &FirstOrderOperator) -> FirstOrderOperator {
        FirstOrderOperator::new(
            self.vars.clone(),
            self.field.iter().zip(&o.field).map(|(a, b)| a + b).collect(),
            &self.zeroth + &o.zeroth,
        )
    }

    pub fn sub(&self, o: &FirstOrderOperator) -> FirstOrderOperator {
        self.add(&o.scale(&Expr::int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        !self.has_vector_part() && self.zeroth.is_zero()
    }

    /// Rescales so that the leading vector-field coefficient is one;
    /// returns the removed factor alongside.
    pub fn normalized(&self) -> Option<(Expr, FirstOrderOperator)> {
        let i = self.leading_index()?;
        let lead = self.field[i].clone();
        let inv = lead.recip().ok()?;
        Some((lead, self.scale(&inv)))
    }

    /// True when `self = λ·other` as vector fields for some scalar `λ`.
    pub fn proportional_to(&self, other: &FirstOrderOperator) -> bool {
        let n = self.field.len();
        for i in 0..n {
            for j in 0..n {
                let d = &(&self.field[i] * &other.field[j]) - &(&self.field[j] * &other.field[i]);
                if !d.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// `AB − BA` as a first-order operator.
pub fn commutator(a: &FirstOrderOperator, b: &FirstOrderOperator) -> FirstOrderOperator {
    let field = a
        .field
        .iter()
        .zip(&b.field)
        .map(|(ai, bi)| &a.derive(bi) - &b.derive(ai))
        .collect();
    let zeroth = &a.derive(&b.zeroth) - &b.derive(&a.zeroth);
    FirstOrderOperator::new(a.vars.clone(), field, zeroth)
}

/// Coefficients `(c₁, c₂, c₃)` with `w = c₁e₁ + c₂e₂ + c₃e₃` as vector fields.
pub fn decompose_in_frame(
    w: &FirstOrderOperator,
    basis: &[FirstOrderOperator; 3],
) -> Result<[Expr; 3]> {
    let n = w.field.len();
    if n != 3 {
        return Err(ExprError::NotGeneric(format!(
            "frame decomposition needs three variables, got {n}"
        )));
    }
    let m: Vec<Vec<Expr>> = (0..3)
        .map(|i| (0..3).map(|j| basis[j].field[i].clone()).collect())
        .collect();
    let solved = solve_expr(m, w.field.clone()).ok_or_else(|| {
        ExprError::NotGeneric("frame operators do not span the tangent space".into())
    })?;
    Ok([solved[0].clone(), solved[1].clone(), solved[2].clone()])
}

/// Determinant of the frame's coefficient matrix.
pub fn frame_determinant(basis: &[FirstOrderOperator; 3]) -> Expr {
    let m = [0, 1, 2].map(|i| [0, 1, 2].map(|j| basis[j].field[i].clone()));
    determinant3(&m)
}

impl fmt::Display for FirstOrderOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_operator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_operator, var_list};

    fn fo(s: &str) -> FirstOrderOperator {
        let op = parse_operator(s, &var_list(&["x", "y", "z"])).unwrap();
        FirstOrderOperator::from_operator(&op).unwrap()
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator(&fo("Dx"), &fo("Dy + x*Dz")), fo("Dz"));
        assert!(commutator(&fo("Dx"), &fo("Dy")).is_zero());
        assert_eq!(commutator(&fo("Dx"), &fo("x*Dx")), fo("Dx"));
    }

    #[test]
    fn commutator_matches_composition() {
        let a = fo("x*Dx + y*z*Dz");
        let b = fo("Dy + x^2*Dz + y");
        let lhs = commutator(&a, &b).to_operator();
        let ao = a.to_operator();
        let bo = b.to_operator();
        assert_eq!(lhs, ao.compose(&bo).sub(&bo.compose(&ao)));
    }

    #[test]
    fn frame_decompositions() {
        let basis = [fo("Dx"), fo("Dy + x*Dz"), fo("Dz")];
        let c = decompose_in_frame(&fo("Dz"), &basis).unwrap();
        assert!(c[0].is_zero() && c[1].is_zero() && c[2].is_one());
        let c = decompose_in_frame(&fo("Dy"), &basis).unwrap();
        assert!(c[0].is_zero() && c[1].is_one());
        assert_eq!(c[2], -Expr::var("x"));
        let zero = commutator(&fo("Dy + x*Dz"), &fo("-Dz"));
        let c = decompose_in_frame(&zero, &basis).unwrap();
        assert!(c.iter().all(Expr::is_zero));
    }

    #[test]
    fn singular_frame_is_rejected() {
        let basis = [fo("Dx"), fo("x*Dx"), fo("Dz")];
        assert!(matches!(
            decompose_in_frame(&fo("Dy"), &basis),
            Err(ExprError::NotGeneric(_))
        ));
    }
}
