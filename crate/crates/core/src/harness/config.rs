//! Line-oriented `key=value` files that supply flag defaults.
//!
//! Each key names a long flag of the subcommand being run (leading dashes
//! optional, `_` read as `-`). Flags given on the command line win. A value
//! of `true` turns on a switch, `false` leaves it off.

use std::ffi::OsString;

use crate::error::{Error, Result};

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse(format!("config line {}: expected key=value", i + 1)));
        };
        let key = k.trim().trim_start_matches('-').replace('_', "-");
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config FILE` from `args` and appends the file's entries as
/// flags not already present.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| Error::InvalidInput("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let entries = parse_config(&std::fs::read_to_string(&path)?)?;
    let given: Vec<String> = rest
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (k, v) in entries {
        if given.contains(&k) {
            continue;
        }
        match v.as_str() {
            "true" => rest.push(format!("--{k}").into()),
            "false" => {}
            _ => rest.push(format!("--{k}={v}").into()),
        }
    }
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_skips_comments() {
        let c = parse_config("# x\n\ntimeout = 30\n--k_max=4\n").unwrap();
        assert_eq!(c, vec![("timeout".into(), "30".into()), ("k-max".into(), "4".into())]);
        assert!(parse_config("oops\n").is_err());
    }
}
