use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use fkdv::{Error, Result};
use serde_json::{json, Number, Value};

pub const SCHEMA: u32 = 1;

/// A data file produced by a command.
pub struct Table {
    pub name: &'static str,
    pub csv: Vec<u8>,
}

/// What a command hands back for printing.
pub struct Outcome {
    pub results: Value,
    /// First entry is the one printed by `--format csv`.
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(results: Value) -> Self {
        Outcome {
            results,
            tables: Vec::new(),
        }
    }

    pub fn with_table(mut self, name: &'static str, csv: Vec<u8>) -> Self {
        self.tables.push(Table { name, csv });
        self
    }
}

/// Rewrite every non-integer number with 17 significant digits.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if !text.contains(['.', 'e', 'E']) {
                return Value::Number(n);
            }
            match n.as_f64() {
                Some(x) if x.is_finite() => float(x),
                _ => Value::Null,
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect())
        }
        other => other,
    }
}

/// `x` as a JSON number with 17 significant digits; non-finite becomes null.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    format!("{x:.16e}")
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub struct Manifest {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub artifacts: Vec<PathBuf>,
    pub error: Option<Value>,
}

impl Manifest {
    pub fn to_json(&self) -> Value {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut m = json!({
            "schema": SCHEMA,
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "created_unix": created,
            "inputs": self.inputs,
            "results": self.results,
            "artifacts": self.artifacts.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        });
        if let Some(e) = &self.error {
            m["error"] = e.clone();
        }
        normalize(m)
    }
}

pub fn error_json(e: &Error) -> Value {
    let mut v = json!({
        "exit_code": e.exit_code(),
        "message": e.to_string(),
    });
    if let Error::BlowUp { at, .. } = e {
        v["at"] = float(*at);
    }
    v
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_seventeen_digits() {
        let v = normalize(json!({"a": 0.1, "n": 3, "list": [1.0, f64::NAN]}));
        assert_eq!(v["a"].to_string(), "1.0000000000000001e-1");
        assert_eq!(v["n"].to_string(), "3");
        assert_eq!(v["list"][0].as_f64(), Some(1.0));
        assert!(v["list"][0].to_string().starts_with("1.0000000000000000e"));
        assert!(v["list"][1].is_null());
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }
}
