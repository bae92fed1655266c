use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command};
use serde_json::Value;

/// Appends `--key value` for every config entry not already given on the command line.
pub fn merge(cmd: &Command, matches: &ArgMatches, argv: &[OsString], path: &Path) -> Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
    let Value::Object(map) = value else {
        return Err(format!("config {} must be a JSON object", path.display()));
    };

    let mut leaf_cmd = cmd.clone();
    leaf_cmd.build();
    let mut leaf = matches;
    while let Some((name, sub)) = leaf.subcommand() {
        leaf_cmd = leaf_cmd
            .find_subcommand(name)
            .cloned()
            .ok_or_else(|| format!("unknown subcommand {name}"))?;
        leaf = sub;
    }

    let mut out = argv.to_vec();
    for (key, v) in map {
        let long = key.replace('_', "-");
        let arg = leaf_cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| format!("config key `{key}` is not a flag of this command"))?;
        let id = arg.get_id().as_str();
        if id == "config" {
            return Err("config files cannot include other configs".into());
        }
        if leaf.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = OsString::from(format!("--{long}"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_, _>>()?;
                if arg.get_value_delimiter().is_some() {
                    out.push(OsString::from(format!("--{long}={}", parts.join(","))));
                } else {
                    for p in parts {
                        out.push(OsString::from(format!("--{long}={p}")));
                    }
                }
            }
            other => out.push(OsString::from(format!("--{long}={}", scalar(&other)?))),
        }
    }
    Ok(out)
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(format!("unsupported config value {other}")),
    }
}
