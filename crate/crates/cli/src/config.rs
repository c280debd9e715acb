//! Flat `key = value` config files.
//!
//! Each key names a long flag of the chosen subcommand (`b_av` or `b-av`
//! for `--b-av`). Values from the file are spliced into the argument list
//! right after the subcommand, and any flag also given on the command line
//! is dropped from the file's contribution so the command line wins.

use std::fs;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
            line: k + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(ConfigError {
                line: k + 1,
                message: "empty key".into(),
            });
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse(&text)
}

/// Removes `--config <path>` / `--config=<path>` from `argv`, returning the
/// path if present.
pub fn take_config_flag(argv: &mut Vec<String>) -> Option<String> {
    let pos = argv
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))?;
    let arg = argv.remove(pos);
    if let Some(path) = arg.strip_prefix("--config=") {
        return Some(path.to_string());
    }
    if pos < argv.len() {
        Some(argv.remove(pos))
    } else {
        // Leave a dangling flag for clap to report.
        argv.insert(pos, arg);
        None
    }
}

/// Position of the subcommand, skipping global flags placed before it.
fn subcommand_index(argv: &[String]) -> Option<usize> {
    let mut k = 1;
    while k < argv.len() {
        let a = argv[k].as_str();
        if a == "--threads" {
            k += 2;
        } else if a.starts_with('-') {
            k += 1;
        } else {
            return Some(k);
        }
    }
    None
}

/// Inserts config entries right after the subcommand, skipping keys already
/// present on the command line.
pub fn splice(argv: &mut Vec<String>, entries: &[(String, String)]) {
    let Some(sub) = subcommand_index(argv) else {
        return;
    };
    let given: Vec<String> = argv[1..]
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut extra = Vec::new();
    for (key, value) in entries {
        if given.iter().any(|g| g == key) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    let tail = argv.split_off(sub + 1);
    argv.extend(extra);
    argv.extend(tail);
}
