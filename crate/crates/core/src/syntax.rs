//! Text syntax for expressions and operators.
//!
//! Expressions: `+ - * / ^`, integer literals, variables, `exp(..)`,
//! `ln(..)`, function applications `F(x)`, `phi(x, x*y - z)`, derivatives
//! `F'(x)` or `phi'[1,0](a, b)`, and antiderivatives `int(f, x)` or
//! `int(f, t; s = e)`.
//!
//! Operators: sums of `coefficient * Dx^i * Dy^j ...` with coefficients to
//! the left of the derivations.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::lpdo::LinearOperator;
use crate::poly::{Atom, Monomial, Poly, Rational};

// ---- printing -----------------------------------------------------------

fn write_atom(out: &mut String, a: &Atom) {
    match a {
        Atom::Var(v) => out.push_str(v),
        Atom::App(app) => {
            out.push_str(&app.name);
            if app.args.len() == 1 {
                for _ in 0..app.derivs[0] {
                    out.push('\'');
                }
            } else if app.derivs.iter().any(|&d| d > 0) {
                out.push_str("'[");
                let ds: Vec<String> = app.derivs.iter().map(u32::to_string).collect();
                out.push_str(&ds.join(","));
                out.push(']');
            }
            out.push('(');
            let args: Vec<String> = app.args.iter().map(Expr::to_string).collect();
            out.push_str(&args.join(", "));
            out.push(')');
        }
        Atom::Exp(e) => {
            let _ = write!(out, "exp({e})");
        }
        Atom::Ln(e) => {
            let _ = write!(out, "ln({e})");
        }
        Atom::Int(q) => {
            let _ = write!(out, "int({}, {}", q.integrand, q.var);
            if !q.bindings.is_empty() {
                let bs: Vec<String> = q.bindings.iter().map(|(p, e)| format!("{p} = {e}")).collect();
                let _ = write!(out, "; {}", bs.join(", "));
            }
            out.push(')');
        }
    }
}

fn monomial_text(m: &Monomial) -> String {
    let mut out = String::new();
    for (i, (a, e)) in m.factors().iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write_atom(&mut out, a);
        if *e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
    out
}

fn rational_text(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Term with a nonnegative coefficient.
fn term_text(m: &Monomial, c: &Rational) -> String {
    if m.is_one() {
        return rational_text(c);
    }
    let mono = monomial_text(m);
    if c.is_one() {
        mono
    } else {
        format!("{}*{}", rational_text(c), mono)
    }
}

pub(crate) fn poly_text(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let t = term_text(m, &c.abs());
        match (i, neg) {
            (0, false) => out.push_str(&t),
            (0, true) => {
                out.push('-');
                out.push_str(&t);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&t);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&t);
            }
        }
    }
    out
}

pub fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    f.write_str(&poly_text(p))
}

fn is_single_atom(p: &Poly) -> bool {
    p.len() == 1
        && p.leading()
            .map(|(m, c)| c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1)
            .unwrap_or(false)
}

pub(crate) fn expr_text(e: &Expr) -> String {
    if e.is_polynomial() {
        return poly_text(e.num());
    }
    let (c, factors) = e.den().square_free();
    let num = e.num().scale(&(Rational::one() / c));
    let mut den_parts = Vec::new();
    for (fp, mult) in &factors {
        let base = if is_single_atom(fp) {
            poly_text(fp)
        } else {
            format!("({})", poly_text(fp))
        };
        den_parts.push(if *mult > 1 { format!("{base}^{mult}") } else { base });
    }
    let den = if den_parts.len() == 1 {
        den_parts.pop().unwrap_or_default()
    } else {
        format!("({})", den_parts.join("*"))
    };
    let num_text = if num.len() == 1 {
        poly_text(&num)
    } else {
        format!("({})", poly_text(&num))
    };
    format!("{num_text}/{den}")
}

pub fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    f.write_str(&expr_text(e))
}

fn derivation_text(vars: &[String], idx: &[u32]) -> String {
    let mut parts = Vec::new();
    for (v, &k) in vars.iter().zip(idx) {
        match k {
            0 => {}
            1 => parts.push(format!("D{v}")),
            _ => parts.push(format!("D{v}^{k}")),
        }
    }
    parts.join("*")
}

/// Prints an operator in normal-ordered form, highest order first.
pub fn operator_text(op: &LinearOperator) -> String {
    let mut terms: Vec<(&Vec<u32>, &Expr)> = op.terms().iter().collect();
    terms.sort_by(|(a, _), (b, _)| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        db.cmp(&da).then_with(|| b.cmp(a))
    });
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (idx, c)) in terms.into_iter().enumerate() {
        let d = derivation_text(op.vars(), idx);
        let simple_neg = c.num().len() == 1 && c.is_negative_leading();
        let (neg, body) = if simple_neg {
            (true, -c)
        } else {
            (false, c.clone())
        };
        let coeff = if body.num().len() > 1 && !d.is_empty() && body.is_polynomial() {
            format!("({body})")
        } else {
            body.to_string()
        };
        let t = if d.is_empty() {
            coeff
        } else if body.is_one() {
            d
        } else {
            format!("{coeff}*{d}")
        };
        match (i, neg) {
            (0, false) => out.push_str(&t),
            (0, true) => {
                out.push('-');
                out.push_str(&t);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&t);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&t);
            }
        }
    }
    out
}

// ---- lexing -------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|c| c.1).collect();
            let n = s.parse::<BigInt>().map_err(|e| ExprError::Syntax {
                pos,
                msg: e.to_string(),
            })?;
            out.push((Tok::Num(n), pos));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((Tok::Ident(s), pos));
        } else if "+-*/^(),;=[]'".contains(ch) {
            out.push((Tok::Sym(ch), pos));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                pos,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

// ---- parsing ------------------------------------------------------------

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    len: usize,
    /// Declared variables; derivation atoms `D<var>` are recognized for these.
    vars: &'a [String],
    derivations: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &str, vars: &'a [String], derivations: bool) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            len: text.len(),
            vars,
            derivations,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(ExprError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn small_int(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let v = n.to_u32();
                self.at += 1;
                match v {
                    Some(v) => Ok(v),
                    None => self.err("integer too large"),
                }
            }
            _ => self.err("expected integer"),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.at < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.eat('-') {
            -self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.at += 1;
                let d = self.unary()?;
                acc = acc.checked_div(&d).map_err(|_| ExprError::Syntax {
                    pos,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<i32> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let k = self.small_int()? as i32;
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -k } else { k })
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            let pos = self.pos();
            let k = self.exponent()?;
            return base.pow(k).map_err(|_| ExprError::Syntax {
                pos,
                msg: "negative power of zero".into(),
            });
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Expr::rational(Rational::from_integer(n)))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.derivations && self.derivation_var(&name).is_some() {
                    return self.err("derivation inside a coefficient");
                }
                self.at += 1;
                self.named(&name)
            }
            _ => self.err("expected expression"),
        }
    }

    fn named(&mut self, name: &str) -> Result<Expr> {
        match name {
            "exp" if self.peek() == Some(&Tok::Sym('(')) => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                return Ok(Expr::exp(&e));
            }
            "ln" if self.peek() == Some(&Tok::Sym('(')) => {
                let pos = self.pos();
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                return Expr::ln(&e).map_err(|err| ExprError::Syntax {
                    pos,
                    msg: err.to_string(),
                });
            }
            "int" if self.peek() == Some(&Tok::Sym('(')) => return self.integral(),
            _ => {}
        }
        let mut primes = 0u32;
        while self.eat('\'') {
            primes += 1;
        }
        let mut slots: Option<Vec<u32>> = None;
        if self.eat('[') {
            let mut v = vec![self.small_int()?];
            while self.eat(',') {
                v.push(self.small_int()?);
            }
            self.expect(']')?;
            slots = Some(v);
        }
        if self.peek() != Some(&Tok::Sym('(')) {
            if primes > 0 || slots.is_some() {
                return self.err("derivative marks require an application");
            }
            return Ok(Expr::var(name));
        }
        let args = self.args()?;
        let derivs = match slots {
            Some(v) if v.len() == args.len() => v,
            Some(_) => return self.err("derivative orders do not match the arity"),
            None if primes == 0 => vec![0; args.len()],
            None if args.len() == 1 => vec![primes],
            None => return self.err("primes apply only to unary functions"),
        };
        Ok(Expr::app_deriv(name, derivs, args))
    }

    fn integral(&mut self) -> Result<Expr> {
        self.expect('(')?;
        let f = self.expr()?;
        self.expect(',')?;
        let var = self.ident()?;
        let mut bindings = Vec::new();
        if self.eat(';') {
            loop {
                let p = self.ident()?;
                self.expect('=')?;
                let e = self.expr()?;
                bindings.push((Arc::<str>::from(p.as_str()), e));
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(')')?;
        Ok(Expr::integral(&f, &var, &bindings))
    }

    fn derivation_var(&self, name: &str) -> Option<usize> {
        let rest = name.strip_prefix('D')?;
        self.vars.iter().position(|v| v == rest)
    }

    fn is_derivation_token(&self) -> Option<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if s.len() > 1 && s.starts_with('D') => {
                let next = self.toks.get(self.at + 1).map(|t| &t.0);
                if next == Some(&Tok::Sym('(')) || next == Some(&Tok::Sym('\'')) {
                    None
                } else {
                    Some(s.clone())
                }
            }
            _ => None,
        }
    }

    fn op_term(&mut self) -> Result<(Vec<u32>, Expr)> {
        let mut idx = vec![0u32; self.vars.len()];
        let mut coeff = Expr::one();
        let mut seen_derivation = false;
        let mut first = true;
        loop {
            let divide = if first || self.eat('*') {
                false
            } else if self.peek() == Some(&Tok::Sym('/')) {
                self.at += 1;
                true
            } else {
                break;
            };
            first = false;
            if let Some(name) = self.is_derivation_token() {
                let i = match self.derivation_var(&name) {
                    Some(i) => i,
                    None => return Err(ExprError::UnknownVariable(name[1..].to_string())),
                };
                if divide {
                    return self.err("cannot divide by a derivation");
                }
                self.at += 1;
                let k = if self.eat('^') { self.small_int()? } else { 1 };
                idx[i] += k;
                seen_derivation = true;
                continue;
            }
            if seen_derivation {
                return self.err("coefficient to the right of a derivation");
            }
            let pos = self.pos();
            let f = self.unary()?;
            coeff = if divide {
                coeff.checked_div(&f).map_err(|_| ExprError::Syntax {
                    pos,
                    msg: "division by zero".into(),
                })?
            } else {
                &coeff * &f
            };
        }
        Ok((idx, coeff))
    }

    fn operator(&mut self) -> Result<LinearOperator> {
        let mut terms: BTreeMap<Vec<u32>, Expr> = BTreeMap::new();
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let (idx, c) = self.op_term()?;
            let c = if sign < 0 { -c } else { c };
            let slot = terms.entry(idx).or_default();
            *slot = &*slot + &c;
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(LinearOperator::from_terms(self.vars.to_vec(), terms))
    }
}

fn check_vars(e: &Expr, vars: &[String]) -> Result<()> {
    for v in e.free_vars() {
        if !vars.contains(&v) {
            return Err(ExprError::UnknownVariable(v));
        }
    }
    Ok(())
}

/// Parses an expression, rejecting variables outside `vars`.
pub fn parse_expr(text: &str, vars: &[String]) -> Result<Expr> {
    let e = parse_expr_unchecked(text)?;
    check_vars(&e, vars)?;
    Ok(e)
}

/// Parses an expression without restricting its variables.
pub fn parse_expr_unchecked(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text, &[], false)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses an operator in normal-ordered form over `vars`.
pub fn parse_operator(text: &str, vars: &[String]) -> Result<LinearOperator> {
    let mut p = Parser::new(text, vars, true)?;
    if p.toks.is_empty() {
        return p.err("empty operator");
    }
    let op = p.operator()?;
    p.finish()?;
    for c in op.terms().values() {
        check_vars(c, vars)?;
    }
    Ok(op)
}

pub fn var_list(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Vec<String> {
        var_list(&["x", "y", "z"])
    }

    #[test]
    fn expression_round_trips() {
        for text in [
            "x + y",
            "2/(x + y)^2",
            "-2*x*y/(x + y)^3",
            "F'(x) + G'(y) - 2*F(x)/(x + y)",
            "phi'[1,0](x, x*y - z)",
            "exp(-x*y)*x",
            "ln(x + y)",
            "int(phi(x, x*y - z), x)",
            "1/2*x^2*y - x*z",
            "(x - y)/(x*y)",
        ] {
            let e = parse_expr(text, &xyz()).unwrap();
            let printed = e.to_string();
            let again = parse_expr(&printed, &xyz()).unwrap();
            assert_eq!(e, again, "{text} -> {printed}");
        }
    }

    #[test]
    fn prints_example_invariant() {
        let e = parse_expr("2/(x+y)^2", &xyz()).unwrap();
        assert_eq!(e.to_string(), "2/(x + y)^2");
    }

    #[test]
    fn operator_parse_and_print() {
        let op = parse_operator("Dx*Dy + x*Dx*Dz - Dz", &xyz()).unwrap();
        assert_eq!(op.to_string(), "Dx*Dy + x*Dx*Dz - Dz");
        let l = parse_operator("Dx*Dy - 2/(x+y)^2", &var_list(&["x", "y"])).unwrap();
        assert_eq!(l.to_string(), "Dx*Dy - 2/(x + y)^2");
    }

    #[test]
    fn unknown_derivation_variable_is_rejected() {
        let err = parse_operator("Dq", &var_list(&["x", "y"])).unwrap_err();
        assert_eq!(err, ExprError::UnknownVariable("q".into()));
    }

    #[test]
    fn unknown_coefficient_variable_is_rejected() {
        let err = parse_operator("w*Dx", &var_list(&["x", "y"])).unwrap_err();
        assert_eq!(err, ExprError::UnknownVariable("w".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_expr("x + * y", &xyz()) {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_operator("Dx*x", &xyz()),
            Err(ExprError::Syntax { .. })
        ));
    }
}
