//! `key = value` config files, merged into argv ahead of the real flags so
//! that command-line flags win (`args_override_self`).

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;
use exstat::Error;

use crate::args::Cli;

/// Keys that only make sense on the command line.
const FILE_FORBIDDEN: [&str; 3] = ["config", "help", "version"];

#[derive(Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, Error> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("config line {line}: expected `key = value`, got `{body}`")))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(Error::InvalidInput(format!("config line {line}: empty key")));
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(Error::InvalidInput(format!(
                "config line {line}: key '{key}' already set on line {}",
                prev.line
            )));
        }
        entries.push(Entry { key, value, line });
    }
    Ok(entries)
}

fn takes_value(flag: &str) -> bool {
    flag.starts_with("--") && !flag.contains('=') && flag != "--help" && flag != "--version"
}

/// Index of the subcommand token, skipping flag values.
fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let cmd = Cli::command();
    let mut i = 1;
    while i < args.len() {
        let tok = args[i].to_string_lossy();
        if takes_value(&tok) {
            i += 2;
            continue;
        }
        if cmd.find_subcommand(tok.as_ref()).is_some() {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
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

fn known_keys(subcommand: &str) -> Vec<String> {
    let cmd = Cli::command();
    let globals = cmd.get_arguments();
    let local = cmd
        .find_subcommand(subcommand)
        .into_iter()
        .flat_map(|s| s.get_arguments());
    globals
        .chain(local)
        .filter_map(|a| a.get_long())
        .filter(|l| !FILE_FORBIDDEN.contains(l))
        .map(str::to_string)
        .collect()
}

/// Rewrites argv as `[prog, subcommand, file flags..., original flags...]`.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| Error::InvalidInput(format!("cannot read config file {}: {e}", path.to_string_lossy())))?;
    let mut entries = parse(&text)?;

    let mut rest = args;
    let from_file = entries
        .iter()
        .position(|e| e.key == "command")
        .map(|i| entries.remove(i).value);
    let subcommand = match subcommand_position(&rest) {
        Some(i) => rest.remove(i).to_string_lossy().into_owned(),
        None => match from_file {
            Some(c) if Cli::command().find_subcommand(&c).is_some() => c,
            Some(c) => return Err(Error::InvalidInput(format!("unknown command '{c}' in config file"))),
            None => {
                return Err(Error::InvalidInput(
                    "no command given on the command line or in the config file".into(),
                ))
            }
        },
    };

    let known = known_keys(&subcommand);
    let prog = rest.remove(0);
    let mut argv = vec![prog, subcommand.clone().into()];
    for e in entries {
        if !known.contains(&e.key) {
            return Err(Error::InvalidInput(format!(
                "unknown config key '{}' (line {}) for command '{subcommand}'",
                e.key, e.line
            )));
        }
        argv.push(format!("--{}={}", e.key, e.value).into());
    }
    argv.extend(rest);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_normalizes_keys() {
        let e = parse("# header\nn_max = 4  # trailing\n\ncoords = \"0,0;1,0\"\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].key.as_str(), e[0].value.as_str(), e[0].line), ("n-max", "4", 2));
        assert_eq!(e[1].value, "0,0;1,0");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse("seed 4").is_err());
        assert!(parse("seed = 1\nseed = 2").is_err());
    }

    #[test]
    fn finds_subcommand_after_global_values() {
        let args: Vec<OsString> = ["exstat", "--output", "volume", "thermo", "--n", "3"]
            .iter()
            .map(Into::into)
            .collect();
        assert_eq!(subcommand_position(&args), Some(3));
    }

    #[test]
    fn keys_cover_globals_and_locals() {
        let k = known_keys("volume");
        assert!(k.contains(&"seed".to_string()) && k.contains(&"two-j".to_string()));
        assert!(!k.contains(&"config".to_string()) && !k.contains(&"lambda".to_string()));
    }
}
