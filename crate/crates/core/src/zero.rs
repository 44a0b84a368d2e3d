//! Zero testing and exact evaluation at rational points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ExprError, Result};
use crate::expr::Expr;
use crate::poly::{Atom, Poly, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum ZeroStatus {
    Zero,
    /// Nonzero; `witness` records a sample point with a nonzero value
    /// when one was found.
    NonZero { witness: Option<String> },
    Inconclusive,
}

impl ZeroStatus {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroStatus::Zero)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub points: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { points: 5, seed: 0 }
    }
}

/// Evaluates an expression whose atoms all have assigned values.
/// Atoms missing from `values` are an error.
pub fn evaluate(e: &Expr, values: &BTreeMap<Atom, Rational>) -> Result<Rational> {
    let n = eval_poly(e.num(), values)?;
    let d = eval_poly(e.den(), values)?;
    if d.is_zero() {
        return Err(ExprError::DivisionByZero);
    }
    Ok(n / d)
}

fn eval_poly(p: &Poly, values: &BTreeMap<Atom, Rational>) -> Result<Rational> {
    let mut total = Rational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (a, e) in m.factors() {
            let v = values
                .get(a)
                .ok_or_else(|| ExprError::Unsupported(format!("no value for atom {a:?}")))?;
            t *= num_traits::pow(v.clone(), *e as usize);
        }
        total += t;
    }
    Ok(total)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(-97..=97);
    let d: i64 = rng.gen_range(1..=13);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Evaluates at random rational values of every atom, skipping poles.
/// Only meaningful for expressions without transcendental atoms.
pub fn sample_values(e: &Expr, cfg: SampleConfig) -> Vec<(BTreeMap<Atom, Rational>, Rational)> {
    let atoms: Vec<Atom> = e.atoms().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < cfg.points && attempts < cfg.points * 20 {
        attempts += 1;
        let point: BTreeMap<Atom, Rational> =
            atoms.iter().map(|a| (a.clone(), random_rational(&mut rng))).collect();
        if let Ok(v) = evaluate(e, &point) {
            out.push((point, v));
        }
    }
    out
}

fn describe(point: &BTreeMap<Atom, Rational>) -> String {
    let parts: Vec<String> = point
        .iter()
        .map(|(a, v)| format!("{} = {}", Expr::atom(a.clone()), v))
        .collect();
    parts.join(", ")
}

/// Decides whether `e` is the zero function.
///
/// The canonical form is zero exactly when the numerator vanishes. With only
/// variables and function applications as atoms the numerator is a
/// polynomial in independent indeterminates, so a nonzero numerator is a
/// nonzero function and a sample point is reported as witness. Other atoms
/// may satisfy hidden relations, in which case a nonzero form is reported as
/// inconclusive.
pub fn zero_test(e: &Expr, cfg: SampleConfig) -> ZeroStatus {
    if e.is_zero() {
        return ZeroStatus::Zero;
    }
    if e.has_transcendental() {
        return ZeroStatus::Inconclusive;
    }
    let witness = sample_values(e, cfg)
        .into_iter()
        .find(|(_, v)| !v.is_zero())
        .map(|(p, v)| format!("{} at {}", v, describe(&p)));
    ZeroStatus::NonZero { witness }
}

pub fn is_zero(e: &Expr) -> ZeroStatus {
    zero_test(e, SampleConfig::default())
}

/// Randomized check alone: true when every sampled value is zero.
pub fn samples_vanish(e: &Expr, cfg: SampleConfig) -> bool {
    sample_values(e, cfg).iter().all(|(_, v)| v.is_zero())
}

/// A random rational distinct from the given poles is sometimes needed by
/// callers; exposed for witness construction.
pub fn random_rationals(seed: u64, count: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = random_rational(&mut rng);
            if r.is_zero() {
                Rational::one()
            } else {
                r
            }
        })
        .collect()
}
