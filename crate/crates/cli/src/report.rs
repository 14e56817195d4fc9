use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: nothing is written and the process exits with 2.
    #[error("{0}")]
    Validation(String),
    /// The run itself failed: an error record is written and the process exits with 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

pub fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

pub fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Everything that determines a report: the command, its parameters, and
/// the parsed contents of every input file.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub params: Value,
    pub inputs: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn new(command: &'static str, params: impl Serialize) -> Self {
        RunConfig {
            command,
            params: serde_json::to_value(params).expect("parameters serialize"),
            inputs: BTreeMap::new(),
        }
    }

    /// Reads a JSON input, records it, and returns its text.
    pub fn load(&mut self, name: &str, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        self.inputs.insert(name.to_string(), value);
        Ok(text)
    }

    /// Hex SHA-256 of the canonical JSON form. Object keys are sorted, so the
    /// hash does not depend on key order in the input files.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

pub fn parse<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| invalid(format!("{name}: {e}")))
}

/// Table projection of a result; JSON stays the canonical form.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Output {
    pub result: Value,
    pub table: Table,
}

impl Output {
    pub fn new(result: impl Serialize, table: Table) -> Self {
        Output {
            result: serde_json::to_value(result).expect("result serializes"),
            table,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: &'a str,
    config_hash: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

pub fn render_json(config: &RunConfig, result: Option<&Value>, error: Option<&str>) -> Vec<u8> {
    let hash = config.hash();
    let env = Envelope {
        command: config.command,
        version: cryptogen::VERSION,
        config_hash: &hash,
        result,
        error,
    };
    let mut out = serde_json::to_vec_pretty(&env).expect("report serializes");
    out.push(b'\n');
    out
}

/// CSV with the version and config hash appended to every row.
pub fn render_csv(config: &RunConfig, table: &Table) -> Result<Vec<u8>, CliError> {
    let hash = config.hash();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut headers = table.headers.clone();
    headers.extend(["version", "config_hash"]);
    w.write_record(&headers).map_err(failed)?;
    for row in &table.rows {
        let mut r = row.clone();
        r.push(cryptogen::VERSION.to_string());
        r.push(hash.clone());
        w.write_record(&r).map_err(failed)?;
    }
    w.into_inner().map_err(failed)
}

pub fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| failed(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(failed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_with(input: &str) -> RunConfig {
        let mut c = RunConfig::new("test", serde_json::json!({ "x": 1 }));
        c.inputs.insert("in".into(), serde_json::from_str(input).unwrap());
        c
    }

    #[test]
    fn hash_ignores_key_order_and_layout() {
        let a = config_with(r#"{"a": 1, "b": [1, 2]}"#);
        let b = config_with("{ \"b\": [1,2],\n \"a\": 1 }");
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), config_with(r#"{"a": 2, "b": [1, 2]}"#).hash());
    }

    #[test]
    fn csv_appends_provenance_columns() {
        let c = config_with("{}");
        let t = Table {
            headers: vec!["k", "v"],
            rows: vec![vec!["a,b".into(), "1".into()]],
        };
        let text = String::from_utf8(render_csv(&c, &t).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,v,version,config_hash"));
        assert!(lines.next().unwrap().starts_with("\"a,b\",1,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(invalid("x").exit_code(), 2);
        assert_eq!(failed("x").exit_code(), 1);
    }
}
