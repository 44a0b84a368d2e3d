//! Command-line front end: problem specifications, workflow dispatch,
//! certificates and the regression corpus.

pub mod corpus;
mod workflows;

use std::time::Instant;

use cascade_core::syntax::parse_operator;
use cascade_core::{ExprError, LinearOperator};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Engine(#[from] ExprError),
    #[error("invalid problem: {0}")]
    Spec(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed corpus line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Workflow {
    Invariants,
    Chain,
    Factor,
    Solve,
    Dini,
    Verify,
    Compose,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct Options {
    pub max_steps: usize,
    pub degree_bound: u32,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_steps: 10,
            degree_bound: 2,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ProblemSpec {
    pub vars: Vec<String>,
    pub operator: String,
    pub workflow: Workflow,
    #[serde(default)]
    pub options: Options,
    /// Candidate solution for `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    /// Right operand for `compose`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
}

impl ProblemSpec {
    pub fn new(vars: Vec<String>, operator: &str, workflow: Workflow) -> Self {
        ProblemSpec {
            vars,
            operator: operator.into(),
            workflow,
            options: Options::default(),
            solution: None,
            right: None,
        }
    }

    pub fn parse(&self) -> Result<LinearOperator, CliError> {
        if !(2..=3).contains(&self.vars.len()) {
            return Err(CliError::Spec(format!(
                "expected 2 or 3 variables, got {}",
                self.vars.len()
            )));
        }
        Ok(parse_operator(&self.operator, &self.vars)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// A solution was substituted back and the residual vanished.
    Verified,
    /// Computation finished; nothing to verify.
    Ok,
    BudgetExhausted,
    NotFactorable,
    AnsatzFailure,
    VerificationFailed,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified | Status::Ok => 0,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Certificate {
    pub workflow: Workflow,
    pub engine_version: String,
    pub status: Status,
    pub payload: Value,
    pub timing_ms: u64,
}

impl Certificate {
    /// JSON text with the timing field zeroed, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.timing_ms = 0;
        serde_json::to_string_pretty(&c).expect("certificate serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Indented `key: value` listing of the payload.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "workflow: {}\nstatus: {}\n",
            label(&self.workflow),
            label(&self.status)
        );
        write_value(&mut out, &self.payload, 0);
        out
    }
}

fn label<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, x, depth + 1);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match x {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        write_value(out, x, depth + 1);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar(x))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs one workflow and wraps the result in a certificate.
pub fn run(spec: &ProblemSpec) -> Result<Certificate, CliError> {
    let start = Instant::now();
    let l = spec.parse()?;
    let (status, payload) = workflows::dispatch(spec, &l)?;
    Ok(Certificate {
        workflow: spec.workflow,
        engine_version: ENGINE_VERSION.into(),
        status,
        payload,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

/// Default variable list for an operator text: `x,y,z` when `z` occurs.
pub fn infer_vars(text: &str) -> Vec<String> {
    let names: &[&str] = if text.contains('z') { &["x", "y", "z"] } else { &["x", "y"] };
    names.iter().map(|s| s.to_string()).collect()
}
