use std::ffi::OsString;

use serde_json::{Map, Value};

/// Splices the flags of a `--config` JSON file in front of the explicit ones.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut it = argv.into_iter();
    let prog = it.next().unwrap_or_else(|| "cube-needlets".into());
    let mut rest = Vec::new();
    let mut path = None;
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => {
                path = Some(it.next().ok_or("--config needs a file path")?);
            }
            Some(s) if s.starts_with("--config=") => path = Some(OsString::from(&s[9..])),
            _ => rest.push(a),
        }
    }
    let Some(path) = path else {
        let mut out = vec![prog];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let map: Map<String, Value> = match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => m,
        Ok(_) => return Err("config must be a JSON object".into()),
        Err(e) => return Err(format!("config is not valid JSON: {e}")),
    };
    let command = match map.get("command") {
        Some(Value::String(c)) => Some(c.clone()),
        Some(_) => return Err("config key \"command\" must be a string".into()),
        None => None,
    };
    let mut flags = Vec::new();
    for (key, value) in &map {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(OsString::from(flag)),
            Value::Number(n) => {
                flags.push(flag.into());
                flags.push(n.to_string().into());
            }
            Value::String(s) => {
                flags.push(flag.into());
                flags.push(s.into());
            }
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s.clone()),
                        _ => Err(format!("config key \"{key}\": list entries must be scalars")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                flags.push(flag.into());
                flags.push(parts.join(",").into());
            }
            Value::Object(_) => return Err(format!("config key \"{key}\" must not be an object")),
        }
    }
    let mut out = vec![prog];
    match command {
        Some(c) => {
            if rest.first().and_then(|a| a.to_str()) == Some(c.as_str()) {
                rest.remove(0);
            }
            out.push(c.into());
        }
        None if !rest.is_empty() && !rest[0].to_string_lossy().starts_with('-') => {
            out.push(rest.remove(0));
        }
        None => return Err("config has no \"command\" and none was given".into()),
    }
    out.extend(flags);
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn strings(v: Vec<OsString>) -> Vec<String> {
        v.into_iter().map(|s| s.into_string().unwrap()).collect()
    }

    #[test]
    fn config_flags_precede_explicit_ones() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"command": "frame-roundtrip", "d": 2, "tight": true, "dual": false, "n_list": [8, 16]}}"#).unwrap();
        let argv = vec!["x".into(), "--config".into(), f.path().into(), "--d".into(), "1".into()];
        let got = strings(expand_args(argv).unwrap());
        assert_eq!(got, ["x", "frame-roundtrip", "--d", "2", "--n-list", "8,16", "--tight", "--d", "1"]);
    }

    #[test]
    fn no_config_is_a_passthrough() {
        let argv: Vec<OsString> = vec!["x".into(), "nterm".into(), "--s".into(), "1".into()];
        assert_eq!(expand_args(argv.clone()).unwrap(), argv);
    }
}
