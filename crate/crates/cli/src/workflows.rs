use cascade_core::dini::{dini_chain, solve_through_chain, DiniChainReport, DiniLink, LinkStatus};
use cascade_core::laplace::{
    build_solution, characteristic_form, laplace_invariants, run_chain, verify_expression,
    ChainReport, Verification,
};
use cascade_core::lpdo::{factor_symbol, principal_symbol};
use cascade_core::syntax::{operator_text, parse_expr, parse_operator};
use cascade_core::{Expr, ExprError, FirstOrderOperator, LinearOperator};
use serde_json::{json, Map, Value};

use crate::{CliError, ProblemSpec, Status, Workflow};

type Outcome = Result<(Status, Value), CliError>;

fn ex(e: &Expr) -> Value {
    Value::String(e.to_string())
}

fn fo(a: &FirstOrderOperator) -> Value {
    Value::String(operator_text(&a.to_operator()))
}

fn lo(l: &LinearOperator) -> Value {
    Value::String(operator_text(l))
}

pub(crate) fn dispatch(spec: &ProblemSpec, l: &LinearOperator) -> Outcome {
    match spec.workflow {
        Workflow::Invariants => invariants(l),
        Workflow::Chain => chain(spec, l),
        Workflow::Factor => factor(l),
        Workflow::Solve if spec.vars.len() == 3 => dini(spec, l),
        Workflow::Solve => solve(spec, l),
        Workflow::Dini => dini(spec, l),
        Workflow::Verify => verify(spec, l),
        Workflow::Compose => compose(spec, l),
    }
}

fn invariants(l: &LinearOperator) -> Outcome {
    let f = characteristic_form(l)?;
    let inv = laplace_invariants(&f);
    let payload = json!({
        "operator": lo(l),
        "X1": fo(&f.x1),
        "X2": fo(&f.x2),
        "alpha1": ex(&f.alpha1),
        "alpha2": ex(&f.alpha2),
        "alpha3": ex(&f.alpha3),
        "h": ex(&inv.h),
        "k": ex(&inv.k),
    });
    Ok((Status::Ok, payload))
}

fn side(n: Option<usize>) -> Value {
    n.map_or_else(|| json!("budget-exhausted"), |n| json!(n))
}

fn chain_json(r: &ChainReport) -> Value {
    let links: Vec<Value> = r
        .links
        .iter()
        .map(|l| {
            json!({
                "index": l.index,
                "operator": lo(&l.form.operator),
                "h": ex(&l.invariants.h),
                "k": ex(&l.invariants.k),
            })
        })
        .collect();
    json!({
        "links": links,
        "termination": { "N": side(r.n), "K": side(r.k) },
    })
}

fn chain_status(r: &ChainReport) -> Status {
    if r.n.is_none() && r.k.is_none() {
        Status::BudgetExhausted
    } else {
        Status::Ok
    }
}

fn chain(spec: &ProblemSpec, l: &LinearOperator) -> Outcome {
    let r = run_chain(l, spec.options.max_steps)?;
    Ok((chain_status(&r), chain_json(&r)))
}

fn verification_json(v: &Verification) -> (Status, Map<String, Value>) {
    let mut m = Map::new();
    m.insert("verified".into(), json!(v.label()));
    let status = match v {
        Verification::Verified | Verification::VerifiedOnWitnesses => Status::Verified,
        Verification::Failed { residual, witness } => {
            m.insert("residual".into(), json!(residual));
            if let Some(w) = witness {
                m.insert("witness".into(), json!(w));
            }
            Status::VerificationFailed
        }
        Verification::Inconclusive { residual } => {
            m.insert("residual".into(), json!(residual));
            Status::Inconclusive
        }
        Verification::NotChecked => Status::Inconclusive,
    };
    (status, m)
}

fn solve(spec: &ProblemSpec, l: &LinearOperator) -> Outcome {
    let r = run_chain(l, spec.options.max_steps)?;
    let mut payload = json!({ "termination": chain_json(&r)["termination"].clone() });
    if chain_status(&r) == Status::BudgetExhausted {
        return Ok((Status::BudgetExhausted, payload));
    }
    let cert = build_solution(&r)?;
    let v = verify_expression(l, &cert.solution, spec.options.seed);
    let (status, mut m) = verification_json(&v);
    m.insert("solution".into(), ex(&cert.solution));
    let coeffs = |c: &[Expr]| Value::Array(c.iter().map(ex).collect());
    m.insert(
        "coefficients".into(),
        json!({ "F": coeffs(&cert.f_coefficients), "G": coeffs(&cert.g_coefficients) }),
    );
    let arg = |a: &Option<Expr>| a.as_ref().map_or(Value::Null, ex);
    m.insert(
        "arguments".into(),
        json!({ "F": arg(&cert.f_argument), "G": arg(&cert.g_argument) }),
    );
    m.insert("provenance".into(), json!(cert.provenance));
    m.insert("has-quadrature".into(), json!(cert.has_quadrature));
    payload["certificate"] = Value::Object(m);
    Ok((status, payload))
}

fn link_json(link: &DiniLink) -> Value {
    let mut m = Map::new();
    m.insert("index".into(), json!(link.index));
    m.insert("ordering".into(), json!(link.ordering.label()));
    m.insert("status".into(), json!(link.status.label()));
    if let Some(f) = &link.frame {
        for (k, v) in [("S1", &f.s1), ("S2", &f.s2), ("T", &f.t)] {
            m.insert(k.into(), fo(v));
        }
        for (k, v) in [("a", &f.a), ("K", &f.k), ("M", &f.m), ("N", &f.n)] {
            m.insert(k.into(), ex(v));
        }
        for (k, v) in [("P", &f.p), ("Q", &f.q), ("R", &f.r)] {
            m.insert(k.into(), ex(v));
        }
        if let Some(s) = &link.step {
            for (k, v) in [("beta", &s.beta), ("alpha", &s.alpha), ("mu", &s.mu), ("nu", &s.nu)] {
                m.insert(k.into(), ex(v));
            }
            let res = s.intertwining_residual(f);
            let res = if res.is_zero() { json!("zero") } else { lo(&res) };
            m.insert("thcomm-residual".into(), res);
        }
    }
    m.insert("L1".into(), lo(&link.operator));
    if let Some((a, b)) = &link.factors {
        m.insert("factors".into(), json!([fo(a), fo(b)]));
    }
    Value::Object(m)
}

fn dini_failure(r: &DiniChainReport) -> Status {
    let searched = r
        .links
        .iter()
        .any(|l| matches!(l.status, LinkStatus::NoBeta | LinkStatus::NoAlpha));
    if searched {
        Status::AnsatzFailure
    } else {
        Status::BudgetExhausted
    }
}

fn dini(spec: &ProblemSpec, l: &LinearOperator) -> Outcome {
    if spec.vars.len() != 3 {
        return Err(CliError::Spec("dini needs three variables".into()));
    }
    let r = dini_chain(l, spec.options.max_steps, spec.options.degree_bound)?;
    let mut payload = json!({
        "steps": r.links.iter().map(link_json).collect::<Vec<_>>(),
        "factorable": r.factorable,
    });
    if r.factorable.is_none() {
        return Ok((dini_failure(&r), payload));
    }
    let (status, cert) = match solve_through_chain(&r) {
        Ok(u) => {
            let v = verify_expression(l, &u, spec.options.seed);
            let (status, mut m) = verification_json(&v);
            m.insert("solution".into(), ex(&u));
            m.insert("has-quadrature".into(), json!(u.has_quadrature()));
            (status, m)
        }
        Err(e @ (ExprError::Unsupported(_) | ExprError::Undefined(_))) => {
            let mut m = Map::new();
            m.insert("verified".into(), json!("not-checked"));
            m.insert("error".into(), json!(e.to_string()));
            (Status::Inconclusive, m)
        }
        Err(e) => return Err(e.into()),
    };
    payload["certificate"] = Value::Object(cert);
    Ok((status, payload))
}

fn verify(spec: &ProblemSpec, l: &LinearOperator) -> Outcome {
    let text = spec
        .solution
        .as_deref()
        .ok_or_else(|| CliError::Spec("verify needs a candidate solution".into()))?;
    let u = parse_expr(text, &spec.vars)?;
    let v = verify_expression(l, &u, spec.options.seed);
    let (status, mut m) = verification_json(&v);
    m.insert("operator".into(), lo(l));
    m.insert("solution".into(), ex(&u));
    Ok((status, Value::Object(m)))
}

fn compose(spec: &ProblemSpec, l: &LinearOperator) -> Outcome {
    let text = spec
        .right
        .as_deref()
        .ok_or_else(|| CliError::Spec("compose needs a right operand".into()))?;
    let r = parse_operator(text, &spec.vars)?;
    let payload = json!({ "left": lo(l), "right": lo(&r), "product": lo(&l.compose(&r)) });
    Ok((Status::Ok, payload))
}

fn factor(l: &LinearOperator) -> Outcome {
    let symbol = principal_symbol(l)?;
    let (s1, s2) = match factor_symbol(&symbol) {
        Ok(f) => f,
        Err(e @ (ExprError::NotFactorable | ExprError::RepeatedFactor)) => {
            return Ok((Status::NotFactorable, json!({ "operator": lo(l), "reason": e.to_string() })));
        }
        Err(e) => return Err(e.into()),
    };
    let rest = l.sub(&s1.to_operator().compose(&s2.to_operator()));
    let exact = cascade_core::dini::factor_operator(l).map(|(a, b)| json!([fo(&a), fo(&b)]));
    let payload = json!({
        "operator": lo(l),
        "S1": fo(&s1),
        "S2": fo(&s2),
        "remainder": lo(&rest),
        "exact": exact,
    });
    Ok((Status::Ok, payload))
}
