//! Optional `key = value` defaults file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use yawrate_core::{Error, Result};

const KEYS: [&str; 17] = [
    "dataset-dir",
    "checkpoint",
    "report-dir",
    "seed",
    "dt",
    "lr",
    "context-fraction",
    "friction",
    "vehicles",
    "vehicle",
    "experiment",
    "jobs",
    "max-steps",
    "batch-size",
    "patience",
    "eval-every",
    "mass-extra",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) if !p.exists() => Err(Error::MissingFile(p.to_path_buf())),
            Some(p) => Self::parse(&fs::read_to_string(p)?),
        }
    }

    /// Keys are flag names without the leading dashes; `_` and `-` are
    /// interchangeable. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidArgument(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidArgument(format!("config key `{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    /// Flag value if given, else the config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number `{}` in list `{text}`", s.trim())))
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::InvalidArgument("empty list".into()));
    }
    Ok(out)
}
