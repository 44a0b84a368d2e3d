//! Regression corpus: one JSON object per line, a problem plus the expected
//! status and a subset of the expected payload.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{run, CliError, ProblemSpec, Status};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub status: Status,
    /// Every field present here must match the certificate payload.
    #[serde(default)]
    pub payload: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    #[serde(flatten)]
    pub spec: ProblemSpec,
    pub expect: Expectation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryResult {
    pub index: usize,
    pub name: String,
    pub passed: bool,
    pub diffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub entries: Vec<EntryResult>,
}

impl CorpusSummary {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let mark = if e.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("[{}] {mark} {}\n", e.index, e.name));
            for d in &e.diffs {
                out.push_str(&format!("    {d}\n"));
            }
        }
        out.push_str(&format!("{}/{} entries passed\n", self.passed(), self.entries.len()));
        out
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| CliError::Json { line: i + 1, source })
        })
        .collect()
}

pub fn run_corpus(path: &str) -> Result<CorpusSummary, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let entries = parse_corpus(&text)?;
    Ok(CorpusSummary {
        entries: entries.iter().enumerate().map(|(i, e)| check(i, e)).collect(),
    })
}

pub fn check(index: usize, entry: &CorpusEntry) -> EntryResult {
    let mut diffs = Vec::new();
    match run(&entry.spec) {
        Ok(cert) => {
            if cert.status != entry.expect.status {
                diffs.push(format!(
                    "status: expected {}, got {}",
                    json_text(&entry.expect.status),
                    json_text(&cert.status)
                ));
            }
            subset_diff("payload", &entry.expect.payload, &cert.payload, &mut diffs);
        }
        Err(e) => diffs.push(format!("error: {e}")),
    }
    EntryResult {
        index,
        name: entry.name.clone(),
        passed: diffs.is_empty(),
        diffs,
    }
}

fn json_text<T: Serialize>(t: &T) -> String {
    serde_json::to_string(t).unwrap_or_default()
}

/// Records every place where `expected` is not contained in `actual`.
fn subset_diff(path: &str, expected: &Value, actual: &Value, out: &mut Vec<String>) {
    match (expected, actual) {
        (Value::Null, _) if path == "payload" => {}
        (Value::Object(e), Value::Object(a)) => {
            for (k, v) in e {
                let p = format!("{path}.{k}");
                match a.get(k) {
                    Some(x) => subset_diff(&p, v, x, out),
                    None => out.push(format!("{p}: expected {v}, missing")),
                }
            }
        }
        (Value::Array(e), Value::Array(a)) if e.len() == a.len() => {
            for (i, (v, x)) in e.iter().zip(a).enumerate() {
                subset_diff(&format!("{path}[{i}]"), v, x, out);
            }
        }
        _ if expected == actual => {}
        _ => out.push(format!("{path}: expected {expected}, got {actual}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn subset_matching_reports_paths() {
        let actual = json!({"a": 1, "b": {"c": [1, 2], "d": "x"}});
        let mut out = Vec::new();
        subset_diff("payload", &json!({"b": {"c": [1, 2]}}), &actual, &mut out);
        assert!(out.is_empty());
        subset_diff("payload", &json!({"b": {"d": "y"}, "e": 0}), &actual, &mut out);
        assert_eq!(
            out,
            vec![
                "payload.b.d: expected \"y\", got \"x\"".to_string(),
                "payload.e: expected 0, missing".to_string()
            ]
        );
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# note\n\n{\"name\":\"n\",\"vars\":[\"x\",\"y\"],\"operator\":\"Dx*Dy\",\"workflow\":\"invariants\",\"expect\":{\"status\":\"ok\"}}\n";
        let entries = parse_corpus(text).unwrap();
        assert_eq!(entries.len(), 1);
        assert!(check(0, &entries[0]).passed);
    }

    #[test]
    fn malformed_lines_name_their_position() {
        let err = parse_corpus("{}\n").unwrap_err();
        assert!(matches!(err, CliError::Json { line: 1, .. }));
    }
}
