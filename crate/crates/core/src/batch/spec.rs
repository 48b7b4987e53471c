//! Spec file schema, parsing and structural validation.

use std::collections::HashSet;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::operators::MAX_SHIFT_ORDER;
use crate::seq::{Complex, DiagonalSymbol, GeomTailSeq};

pub const SPEC_VERSION: u32 = 1;
/// Cap on `m`, `n`, `k` and `depth`.
pub const MAX_POWER: usize = 64;
/// Cap on the basis index `j` for range preimages.
pub const MAX_INDEX: usize = 1024;

pub const VERDICT_NAMES: [&str; 4] = ["LeftInvertible", "NotLeftInvertible", "Invertible", "NotInjective"];
pub const CLASS_NAMES: [&str; 3] = ["Shift", "Analytic", "Unknown"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("parse error at {path}{}: {message}", location(*.line, *.column))]
    Parse {
        path: String,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("invalid value for {field}: {message}")]
    Validation { field: String, message: String },
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        _ => String::new(),
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryPayload {
    /// `V = S^order`; order 0 is the identity.
    pub order: usize,
    pub f: GeomTailSeq,
    pub g: GeomTailSeq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalPayload {
    pub d: DiagonalSymbol,
    pub f: GeomTailSeq,
    pub g: GeomTailSeq,
    /// Right-hand side for `solve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<GeomTailSeq>,
    /// Largest `j` for the `eⱼ` preimage check; 10 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TAlphaBetaPayload {
    pub alpha: Complex,
    pub beta: Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticPayload {
    pub order: usize,
    pub f: GeomTailSeq,
    pub g: GeomTailSeq,
    pub n: usize,
    pub depth: usize,
    /// Shift order used for the leakage window; `order` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerPayload {
    pub m: usize,
    pub n: usize,
    pub f0: GeomTailSeq,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Isometry(IsometryPayload),
    Diagonal(DiagonalPayload),
    TAlphaBeta(TAlphaBetaPayload),
    Analytic(AnalyticPayload),
    Power(PowerPayload),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Isometry(_) => "isometry_perturbation",
            Payload::Diagonal(_) => "diagonal_perturbation",
            Payload::TAlphaBeta(_) => "t_alpha_beta",
            Payload::Analytic(_) => "analytic_probe",
            Payload::Power(_) => "power_formula",
        }
    }
}

/// Optional expected values; each one present becomes a check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_condition: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_clean: Option<bool>,
    /// Free text copied into the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub id: String,
    pub payload: Payload,
    pub expect: Expect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub version: u32,
    pub problems: Vec<Problem>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    version: u32,
    problems: Vec<RawProblem>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    id: String,
    kind: String,
    payload: Value,
    #[serde(default)]
    expect: Option<Value>,
}

fn join(prefix: &str, inner: &serde_path_to_error::Path) -> String {
    let inner = inner.to_string();
    if inner == "." {
        prefix.to_string()
    } else if inner.starts_with('[') {
        format!("{prefix}{inner}")
    } else {
        format!("{prefix}.{inner}")
    }
}

fn from_value<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, SpecError> {
    serde_path_to_error::deserialize(value).map_err(|e| SpecError::Parse {
        path: join(prefix, e.path()),
        line: None,
        column: None,
        message: e.inner().to_string(),
    })
}

/// Parses JSON text into a validated spec. Errors name the offending
/// field by path.
pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SpecError::Parse {
            path,
            line: Some(inner.line()),
            column: Some(inner.column()),
            message: inner.to_string(),
        }
    })?;
    if raw.version != SPEC_VERSION {
        return Err(invalid("version", format!("expected {SPEC_VERSION}, found {}", raw.version)));
    }
    let mut seen = HashSet::new();
    let mut problems = Vec::with_capacity(raw.problems.len());
    for (i, p) in raw.problems.into_iter().enumerate() {
        let at = format!("problems[{i}]");
        if p.id.is_empty() {
            return Err(invalid(format!("{at}.id"), "must be non-empty"));
        }
        if !seen.insert(p.id.clone()) {
            return Err(invalid(format!("{at}.id"), format!("duplicate id {:?}", p.id)));
        }
        let pp = format!("{at}.payload");
        let payload = match p.kind.as_str() {
            "isometry_perturbation" => Payload::Isometry(from_value(p.payload, &pp)?),
            "diagonal_perturbation" => Payload::Diagonal(from_value(p.payload, &pp)?),
            "t_alpha_beta" => Payload::TAlphaBeta(from_value(p.payload, &pp)?),
            "analytic_probe" => Payload::Analytic(from_value(p.payload, &pp)?),
            "power_formula" => Payload::Power(from_value(p.payload, &pp)?),
            other => return Err(invalid(format!("{at}.kind"), format!("unknown kind {other:?}"))),
        };
        validate_payload(&payload, &pp)?;
        let expect: Expect = match p.expect {
            Some(v) => from_value(v, &format!("{at}.expect"))?,
            None => Expect::default(),
        };
        validate_expect(&expect, &format!("{at}.expect"))?;
        problems.push(Problem {
            id: p.id,
            payload,
            expect,
        });
    }
    Ok(SpecFile {
        version: raw.version,
        problems,
    })
}

fn at_most(field: String, value: usize, cap: usize) -> Result<(), SpecError> {
    if value > cap {
        return Err(invalid(field, format!("{value} exceeds the cap {cap}")));
    }
    Ok(())
}

fn validate_payload(p: &Payload, at: &str) -> Result<(), SpecError> {
    match p {
        Payload::Isometry(x) => at_most(format!("{at}.order"), x.order, MAX_SHIFT_ORDER),
        Payload::Diagonal(x) => at_most(format!("{at}.j"), x.j.unwrap_or(0), MAX_INDEX),
        Payload::TAlphaBeta(_) => Ok(()),
        Payload::Analytic(x) => {
            at_most(format!("{at}.order"), x.order, MAX_SHIFT_ORDER)?;
            at_most(format!("{at}.probe_order"), x.probe_order.unwrap_or(0), MAX_SHIFT_ORDER)?;
            at_most(format!("{at}.n"), x.n, MAX_POWER)?;
            at_most(format!("{at}.depth"), x.depth, MAX_POWER)?;
            if x.depth == 0 {
                return Err(invalid(format!("{at}.depth"), "must be at least 1"));
            }
            Ok(())
        }
        Payload::Power(x) => {
            at_most(format!("{at}.m"), x.m, MAX_POWER)?;
            at_most(format!("{at}.n"), x.n, MAX_POWER)?;
            at_most(format!("{at}.k"), x.k, MAX_POWER)
        }
    }
}

fn validate_expect(e: &Expect, at: &str) -> Result<(), SpecError> {
    if let Some(v) = &e.verdict {
        if !VERDICT_NAMES.contains(&v.as_str()) {
            return Err(invalid(format!("{at}.verdict"), format!("unknown verdict {v:?}")));
        }
    }
    if let Some(c) = &e.class {
        if !CLASS_NAMES.contains(&c.as_str()) {
            return Err(invalid(format!("{at}.class"), format!("unknown class {c:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(problem: &str) -> String {
        format!(r#"{{"version": 1, "problems": [{problem}]}}"#)
    }

    #[test]
    fn parses_each_kind() {
        let text = r#"{"version": 1, "problems": [
  {"id": "a", "kind": "isometry_perturbation",
   "payload": {"order": 1, "f": {"prefix": [[0,0],[1,0]]}, "g": {"prefix": [[-1,0]]}},
   "expect": {"verdict": "NotLeftInvertible", "c": 0}},
  {"id": "b", "kind": "diagonal_perturbation",
   "payload": {"d": {"prefix": [], "constant": [1,0]},
               "f": {"prefix": [[1,0]], "tails": [{"scale": [0.5,0], "ratio": [0.5,0]}]},
               "g": {"prefix": [[1,0]], "tails": [{"scale": [0.5,0], "ratio": [0.5,0]}]}, "j": 3}},
  {"id": "c", "kind": "t_alpha_beta", "payload": {"alpha": [3,0], "beta": [4,0]}},
  {"id": "d", "kind": "analytic_probe",
   "payload": {"order": 1, "f": {"prefix": [[0,0],[0,0],[1,0]]}, "g": {"prefix": [[1,0]]}, "n": 0, "depth": 5}},
  {"id": "e", "kind": "power_formula", "payload": {"m": 2, "n": 0, "f0": {"prefix": [[1,0]]}, "k": 3},
   "expect": {"class": "Shift"}}
]}"#;
        let spec = parse_spec(text).unwrap();
        let kinds: Vec<_> = spec.problems.iter().map(|p| p.payload.kind()).collect();
        assert_eq!(
            kinds,
            ["isometry_perturbation", "diagonal_perturbation", "t_alpha_beta", "analytic_probe", "power_formula"]
        );
        assert_eq!(spec.problems[0].expect.c, Some(0.0));
    }

    #[test]
    fn malformed_complex_names_the_field() {
        let text = wrap(
            r#"{"id": "x", "kind": "isometry_perturbation",
                "payload": {"order": 1, "f": {"prefix": [[1, "oops"]]}, "g": {"prefix": []}}}"#,
        );
        match parse_spec(&text) {
            Err(SpecError::Parse { path, .. }) => assert_eq!(path, "problems[0].payload.f.prefix[0][1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn top_level_errors_carry_line_numbers() {
        let text = "{\"version\": 1,\n \"problems\": [\n {\"id\": 3}]}";
        match parse_spec(text) {
            Err(SpecError::Parse { path, line, .. }) => {
                assert_eq!(path, "problems[0].id");
                assert_eq!(line, Some(3));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_spec("{"), Err(SpecError::Parse { .. })));
    }

    #[test]
    fn validation_errors_name_the_field() {
        let p = r#"{"id": "x", "kind": "t_alpha_beta", "payload": {"alpha": [1,0], "beta": [0,0]}}"#;
        let dup = wrap(&format!("{p}, {p}"));
        assert_eq!(
            parse_spec(&dup),
            Err(invalid("problems[1].id", "duplicate id \"x\""))
        );
        let bad_kind = wrap(r#"{"id": "x", "kind": "nope", "payload": {}}"#);
        assert!(matches!(parse_spec(&bad_kind), Err(SpecError::Validation { field, .. }) if field == "problems[0].kind"));
        let big_k = wrap(r#"{"id": "x", "kind": "power_formula", "payload": {"m": 2, "n": 0, "f0": {"prefix": [[1,0]]}, "k": 65}}"#);
        assert!(matches!(parse_spec(&big_k), Err(SpecError::Validation { field, .. }) if field == "problems[0].payload.k"));
        let bad_verdict = wrap(
            r#"{"id": "x", "kind": "t_alpha_beta", "payload": {"alpha": [1,0], "beta": [0,0]}, "expect": {"verdict": "Maybe"}}"#,
        );
        assert!(matches!(parse_spec(&bad_verdict), Err(SpecError::Validation { field, .. }) if field == "problems[0].expect.verdict"));
        assert!(matches!(
            parse_spec(r#"{"version": 2, "problems": []}"#),
            Err(SpecError::Validation { field, .. }) if field == "version"
        ));
        let unknown_field = wrap(r#"{"id": "x", "kind": "t_alpha_beta", "payload": {"alpha": [1,0], "beta": [0,0], "gamma": 1}}"#);
        assert!(matches!(parse_spec(&unknown_field), Err(SpecError::Parse { .. })));
    }

    #[test]
    fn tail_cap_and_disc_errors_surface_as_parse_errors() {
        let tails: Vec<String> = (0..65)
            .map(|i| format!(r#"{{"scale": [1,0], "ratio": [{},0]}}"#, 0.001 * (i + 1) as f64))
            .collect();
        let text = wrap(&format!(
            r#"{{"id": "x", "kind": "isometry_perturbation", "payload": {{"order": 1, "f": {{"prefix": [], "tails": [{}]}}, "g": {{"prefix": []}}}}}}"#,
            tails.join(",")
        ));
        match parse_spec(&text) {
            Err(SpecError::Parse { path, .. }) => assert_eq!(path, "problems[0].payload.f"),
            other => panic!("{other:?}"),
        }
    }
}
