//! Config files are folded into the argument list: every key the command
//! line leaves unset becomes `--key=value`, then clap parses once more.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command as ClapCommand};
use fkdv::{Error, Result};
use serde_json::{Map, Value};

/// Keys for `subcommand` from a TOML file or an earlier manifest. A TOML
/// table named after the subcommand overrides top-level keys.
pub fn load(path: &Path, subcommand: &str) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("config {}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let root: Value = if is_json {
        serde_json::from_str(&text)
            .map_err(|e| Error::Invalid(format!("config {}: {e}", path.display())))?
    } else {
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Invalid(format!("config {}: {e}", path.display())))?;
        serde_json::to_value(table).map_err(|e| Error::Invalid(format!("config: {e}")))?
    };
    let Value::Object(mut root) = root else {
        return Err(Error::Invalid("config must be a table".into()));
    };
    if is_json {
        if let Some(cmd) = root.get("command").and_then(Value::as_str) {
            let name = cmd.split_whitespace().next().unwrap_or("");
            if name != subcommand {
                return Err(Error::Invalid(format!(
                    "manifest is for `{cmd}`, not `{subcommand}`"
                )));
            }
        }
        return match root.remove("inputs") {
            Some(Value::Object(m)) => Ok(m),
            _ => Err(Error::Invalid("manifest has no `inputs` table".into())),
        };
    }
    let section = match root.remove(subcommand) {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(Error::Invalid(format!("`{subcommand}` must be a table"))),
        None => Map::new(),
    };
    // Sections for other subcommands are not ours to read.
    for name in [
        "classify",
        "reduce",
        "solve",
        "exact",
        "verify",
        "transform",
    ] {
        root.remove(name);
    }
    root.extend(section);
    Ok(root)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Extra arguments realizing `keys` for the arguments of `cmd` that were
/// not given on the command line.
pub fn extra_args(
    cmd: &ClapCommand,
    matches: &ArgMatches,
    keys: &Map<String, Value>,
) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (key, value) in keys {
        let id = key.replace('-', "_");
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_id().as_str() == id && a.get_long().is_some())
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown config key `{key}` for `{}`",
                    cmd.get_name()
                ))
            })?;
        if id == "config" {
            return Err(Error::Invalid(
                "config files cannot include other config files".into(),
            ));
        }
        if matches.value_source(&id) == Some(ValueSource::CommandLine) || value.is_null() {
            continue;
        }
        let long = arg.get_long().expect("checked above");
        if !arg.get_action().takes_values() {
            match value {
                Value::Bool(true) => out.push(format!("--{long}").into()),
                Value::Bool(false) => {}
                _ => return Err(Error::Invalid(format!("`{key}` must be true or false"))),
            }
            continue;
        }
        let text = match value {
            Value::Array(items) => items
                .iter()
                .map(|v| {
                    scalar(v).ok_or_else(|| Error::Invalid(format!("`{key}` must be a flat list")))
                })
                .collect::<Result<Vec<_>>>()?
                .join(","),
            v => scalar(v)
                .ok_or_else(|| Error::Invalid(format!("`{key}` has an unsupported value")))?,
        };
        out.push(format!("--{long}={text}").into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use serde_json::json;

    use crate::args::Cli;

    fn extras(cli: &[&str], keys: Value) -> Result<Vec<String>> {
        let root = Cli::command();
        let m = root.clone().try_get_matches_from(cli).unwrap();
        let (name, sub) = m.subcommand().unwrap();
        let Value::Object(keys) = keys else {
            unreachable!()
        };
        let out = extra_args(root.find_subcommand(name).unwrap(), sub, &keys)?;
        Ok(out.into_iter().map(|s| s.into_string().unwrap()).collect())
    }

    #[test]
    fn command_line_wins() {
        let out = extras(
            &["fkdv", "solve", "--n", "32"],
            json!({"n": 64, "beta": "t", "no_dealias": true, "t-range": "0:1"}),
        )
        .unwrap();
        assert!(!out.iter().any(|a| a.starts_with("--n=")));
        assert!(out.contains(&"--beta=t".to_string()));
        assert!(out.contains(&"--no-dealias".to_string()));
        assert!(out.contains(&"--t-range=0:1".to_string()));
    }

    #[test]
    fn lists_and_nulls() {
        let out = extras(
            &["fkdv", "reduce"],
            json!({"ic": [1, -0.5, 0, 0, 0], "rho": null}),
        )
        .unwrap();
        assert_eq!(out, vec!["--ic=1,-0.5,0,0,0".to_string()]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(extras(&["fkdv", "classify"], json!({"dt": 0.1})).is_err());
        assert!(extras(&["fkdv", "classify"], json!({"config": "x.toml"})).is_err());
    }

    #[test]
    fn toml_sections_override_top_level() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "beta = \"t\"\n[classify]\nbeta = \"1\"\n[solve]\ndt = 0.1\n",
        )
        .unwrap();
        let keys = load(&path, "classify").unwrap();
        assert_eq!(keys.get("beta"), Some(&json!("1")));
        assert!(!keys.contains_key("dt"));
    }
}
