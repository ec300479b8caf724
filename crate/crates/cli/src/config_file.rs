//! Flat `key=value` configuration files.
//!
//! Each non-blank line that does not start with `#` holds one flag name
//! (without the leading dashes) and its value. The pairs are spliced into
//! the argument list right after the subcommand, so flags given on the
//! command line take precedence.

use std::fs;

use crate::{CliError, Result};

/// Parses the file contents into `(flag, value)` pairs.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {}: expected key=value, got `{line}`",
                lineno + 1
            ))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!(
                "config line {}: empty key",
                lineno + 1
            )));
        }
        if key == "config" {
            return Err(CliError::Usage("config files cannot be nested".into()));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

/// Turns pairs into flags. Boolean flags take `true` or `false`.
fn to_flags(pairs: &[(String, String)]) -> Result<Vec<String>> {
    const SWITCHES: [&str; 2] = ["no-metadata", "curves"];
    let mut flags = Vec::new();
    for (key, value) in pairs {
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" | "1" | "yes" => flags.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "config key `{key}` expects true or false, got `{value}`"
                    )))
                }
            }
        } else {
            flags.push(format!("--{key}={value}"));
        }
    }
    Ok(flags)
}

/// Removes `--config <path>` from `args` and splices the file's flags in
/// after the subcommand.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            let p = iter
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file path".into()))?;
            path = Some(p);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config file `{path}`: {e}")))?;
    let flags = to_flags(&parse(&text)?)?;
    // argv[0] then the subcommand; everything else is a flag
    match rest.iter().skip(1).position(|a| !a.starts_with('-')) {
        Some(pos) => {
            let at = pos + 2;
            rest.splice(at..at, flags);
        }
        None => rest.extend(flags),
    }
    Ok(rest)
}
