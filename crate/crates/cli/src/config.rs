//! `key = value` config files merged into the argument list.
//!
//! Each key names a long flag (`two_j` and `two-j` both mean `--two-j`).
//! Entries are spliced in right after the subcommand, and a key is skipped
//! when its flag is already on the command line, so flags always win.

use std::ffi::OsString;
use std::path::Path;

use crate::args::Command;
use crate::CliError;

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key {:?}", i + 1, key)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn flag_present(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("{flag}=");
    args.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

/// Removes `--config PATH` from `args` and returns the merged list.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let args: Vec<String> = args
        .into_iter()
        .map(|a| {
            a.into_string()
                .map_err(|a| CliError::Usage(format!("argument is not UTF-8: {a:?}")))
        })
        .collect::<Result<_, _>>()?;
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut iter = args.into_iter();
    while let Some(a) = iter.next() {
        if a == "--config" {
            path = Some(
                iter.next()
                    .ok_or_else(|| CliError::Usage("--config needs a path".into()))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest.into_iter().map(OsString::from).collect());
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let entries = parse_config(&text)?;
    let at = rest
        .iter()
        .position(|a| Command::NAMES.contains(&a.as_str()))
        .map_or(rest.len(), |i| i + 1);
    let injected: Vec<String> = entries
        .into_iter()
        .filter(|(k, _)| !flag_present(&rest, k))
        .map(|(k, v)| format!("--{k}={v}"))
        .collect();
    rest.splice(at..at, injected);
    Ok(rest.into_iter().map(OsString::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[OsString]) -> Vec<&str> {
        v.iter().map(|s| s.to_str().unwrap()).collect()
    }

    #[test]
    fn parses_comments_and_keys() {
        let e = parse_config("# sweep\ntwo_j = 8\n\nlambda=0.8 # strong\n").unwrap();
        assert_eq!(e, vec![("two-j".into(), "8".into()), ("lambda".into(), "0.8".into())]);
        assert!(parse_config("no equals sign").is_err());
        assert!(parse_config("config = other.cfg").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "lambda = 0.8\ntwo_j = 8\nseed = 3\n").unwrap();
        let args = [
            "sphere-sapt",
            "--seed",
            "5",
            "obstruction",
            "--config",
            path.to_str().unwrap(),
            "--lambda=1",
        ]
        .map(OsString::from)
        .to_vec();
        let merged = merge_config(args).unwrap();
        assert_eq!(
            strings(&merged),
            vec!["sphere-sapt", "--seed", "5", "obstruction", "--two-j=8", "--lambda=1"]
        );
    }

    #[test]
    fn missing_file_is_a_usage_error() {
        let args = ["sphere-sapt", "gap", "--config", "/nonexistent/x.cfg"]
            .map(OsString::from)
            .to_vec();
        assert!(matches!(merge_config(args), Err(CliError::Usage(_))));
    }
}
