//! `key = value` configuration files. Each key names a long flag of the
//! subcommand; the file's settings are placed before the command-line
//! arguments so that flags given on the command line win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Command;

pub const CONFIG_FLAG: &str = "config";

/// Parse a configuration file into `(key, value)` pairs. Blank lines and
/// lines starting with `#` are ignored; values may be quoted.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        pairs.push((key, value.to_string()));
    }
    Ok(pairs)
}

/// The value given to `--config` among `args`, if any.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let flag = format!("--{CONFIG_FLAG}");
    let prefix = format!("{flag}=");
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == flag {
            return iter.next().cloned();
        }
        if let Some(rest) = s.strip_prefix(&prefix) {
            return Some(rest.into());
        }
    }
    None
}

/// Translate configuration pairs into flags of `sub`.
fn config_args(sub: &Command, pairs: &[(String, String)]) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (key, value) in pairs {
        if key == CONFIG_FLAG {
            bail!("config files cannot include other config files");
        }
        let Some(arg) = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
        else {
            bail!("unknown config key `{key}` for `{}`", sub.get_name());
        };
        if arg.get_action().takes_values() {
            out.push(format!("--{key}").into());
            out.push(value.into());
        } else {
            let on: bool = value
                .parse()
                .with_context(|| format!("config key `{key}` expects true or false"))?;
            if on {
                out.push(format!("--{key}").into());
            }
        }
    }
    Ok(out)
}

/// The command line with the settings of any `--config` file spliced in
/// right after the subcommand name.
pub fn merge_config(cmd: &Command, args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(sub_name) = args.get(1).map(|a| a.to_string_lossy().into_owned()) else {
        return Ok(args);
    };
    let Some(sub) = cmd.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let Some(path) = config_path(&args[2..]) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let pairs = parse_config(&text).with_context(|| format!("in config {}", path.display()))?;
    let mut merged = args[..2].to_vec();
    merged.extend(config_args(sub, &pairs)?);
    merged.extend(args[2..].iter().cloned());
    Ok(merged)
}
