//! Header-addressed numeric CSV input for `predict`.

use std::fs;
use std::path::Path;

use yawrate_core::{Error, Result};

/// Reads the named columns of a numeric CSV with a header row. Columns may
/// appear in any order; unnamed ones are ignored.
pub fn read_columns(path: &Path, wanted: &[&str]) -> Result<Vec<Vec<f64>>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?
        .split(',')
        .map(str::trim)
        .collect();
    let index: Vec<usize> = wanted
        .iter()
        .map(|w| {
            header.iter().position(|h| h == w).ok_or_else(|| {
                Error::Parse(format!("{}: missing column `{w}` (header: {})", path.display(), header.join(",")))
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::ChannelCount {
                path: path.display().to_string(),
                line: i + 2,
                found: fields.len(),
                expected: header.len(),
            });
        }
        let row = index
            .iter()
            .map(|&k| {
                fields[k].trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{}:{}: bad number `{}`", path.display(), i + 2, fields[k].trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}
