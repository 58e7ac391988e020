//! Problem files: a JSON object with `"version": "1"`, an optional `"kind"`
//! naming the subcommand, and the subcommand's payload fields.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const VERSION: &str = "1";

/// Reads a problem file and returns its payload (without `version` and
/// `kind`).
pub fn load(path: Option<&Path>, kind: &str) -> Result<Map<String, Value>, CliError> {
    let path = path.ok_or_else(|| {
        CliError::invalid(
            "--input",
            format!("the {kind} subcommand needs a problem file"),
        )
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid("--input", format!("{}: {e}", path.display())))?;
    parse_problem(&text, kind)
}

pub fn parse_problem(text: &str, kind: &str) -> Result<Map<String, Value>, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::invalid("<file>", e))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::invalid(
            "<file>",
            "a problem file must be a JSON object",
        ));
    };
    match map.remove("version") {
        Some(Value::String(v)) if v == VERSION => {}
        Some(other) => {
            return Err(CliError::invalid(
                "version",
                format!("expected \"{VERSION}\", got {other}"),
            ))
        }
        None => return Err(CliError::invalid("version", "missing; expected \"1\"")),
    }
    match map.remove("kind") {
        None => {}
        Some(Value::String(k)) if k == kind => {}
        Some(other) => {
            return Err(CliError::invalid(
                "kind",
                format!("file is for {other}, not \"{kind}\""),
            ))
        }
    }
    Ok(map)
}

/// Deserializes a payload, reporting the path of the first offending field.
pub fn decode<T: DeserializeOwned>(payload: &Map<String, Value>) -> Result<T, CliError> {
    let value = Value::Object(payload.clone());
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." {
            "<payload>".to_string()
        } else {
            path
        };
        CliError::invalid(field, e.into_inner())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Demo {
        #[allow(dead_code)]
        pmf: intercomp::JointPmf,
    }

    #[test]
    fn header_checks() {
        assert!(parse_problem(r#"{"version":"1","kind":"info"}"#, "info").is_ok());
        let e = parse_problem(r#"{"version":"2"}"#, "info").unwrap_err();
        assert!(matches!(e, CliError::Validation { ref field, .. } if field == "version"));
        let e = parse_problem(r#"{"version":"1","kind":"network"}"#, "info").unwrap_err();
        assert!(matches!(e, CliError::Validation { ref field, .. } if field == "kind"));
        assert!(parse_problem("[1]", "info").is_err());
    }

    #[test]
    fn field_paths() {
        let p = parse_problem(
            r#"{"version":"1","pmf":{"axes":[2],"probs":[0.5,0.4]}}"#,
            "info",
        )
        .unwrap();
        let e = decode::<Demo>(&p).unwrap_err();
        match e {
            CliError::Validation { field, message } => {
                assert_eq!(field, "pmf");
                assert!(message.contains("sum"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let p = parse_problem(
            r#"{"version":"1","pmf":{"axes":[1],"probs":[1]},"extra":1}"#,
            "info",
        )
        .unwrap();
        assert!(decode::<Demo>(&p).is_err());
    }
}
