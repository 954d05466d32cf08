//! `key=value` configuration files merged underneath command-line flags.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

/// Flags without a value; `key=true` enables them.
const SWITCHES: &[&str] = &["self-test"];

pub fn read(path: &Path) -> Result<Vec<OsString>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse(text: &str) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "line {}: config files cannot include other files",
                n + 1
            ));
        }
        if SWITCHES.contains(&key) {
            match value {
                "true" => out.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(format!("line {}: {key} takes true or false", n + 1)),
            }
        } else {
            out.push(format!("--{key}").into());
            out.push(value.into());
        }
    }
    Ok(out)
}

/// Path given by `--config PATH` or `--config=PATH`, if any.
pub fn find_config_arg(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Puts the file's flags right after the subcommand so that later
/// command-line occurrences override them.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = find_config_arg(&args) else {
        return Ok(args);
    };
    if args.len() < 2 {
        return Ok(args);
    }
    let from_file = read(Path::new(&path))?;
    let mut merged = args[..2].to_vec();
    merged.extend(from_file);
    merged.extend_from_slice(&args[2..]);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_switches() {
        let got = parse("# comment\na = 1\nrel-tol=1e-9\n\nself-test=true\n").unwrap();
        let got: Vec<String> = got.into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(got, ["--a", "1", "--rel-tol", "1e-9", "--self-test"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse("sigma 2").is_err());
        assert!(parse("config=other.cfg").is_err());
        assert!(parse("self-test=yes").is_err());
    }

    #[test]
    fn finds_config_flag() {
        let args: Vec<OsString> = ["barnes", "eval", "--config=x.cfg"]
            .iter()
            .map(Into::into)
            .collect();
        assert_eq!(find_config_arg(&args), Some("x.cfg".into()));
        let args: Vec<OsString> = ["barnes", "eval", "--config", "y"]
            .iter()
            .map(Into::into)
            .collect();
        assert_eq!(find_config_arg(&args), Some("y".into()));
    }
}
