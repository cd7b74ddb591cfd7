//! Config diagnostics anchored to source lines.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Error)]
pub struct ConfigError {
    pub file: PathBuf,
    pub location: Option<Location>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(l) => write!(
                f,
                "{}:{}:{}: {}",
                self.file.display(),
                l.line,
                l.column,
                self.message
            ),
            None => write!(f, "{}: {}", self.file.display(), self.message),
        }
    }
}

/// 1-based line and column of byte `offset`.
pub fn position(src: &str, offset: usize) -> Location {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Location { line, column }
}

fn header_name(line: &str) -> Option<(&str, bool)> {
    let t = line.trim();
    if let Some(rest) = t.strip_prefix("[[") {
        return rest.split("]]").next().map(|n| (n.trim(), true));
    }
    t.strip_prefix('[')
        .and_then(|r| r.split(']').next())
        .map(|n| (n.trim(), false))
}

/// Finds the line of `key` inside table `table` (the `index`-th occurrence for arrays of
/// tables), falling back to the table header, then to nothing.
pub fn locate(src: &str, table: &str, index: usize, key: Option<&str>) -> Option<Location> {
    let mut seen = 0usize;
    let mut inside = false;
    let mut header = None;
    for (n, line) in src.lines().enumerate() {
        if let Some((name, _)) = header_name(line) {
            if inside {
                break;
            }
            if name == table {
                if seen == index {
                    inside = true;
                    header = Some(Location {
                        line: n + 1,
                        column: 1,
                    });
                }
                seen += 1;
            }
            continue;
        }
        if inside {
            if let Some(k) = key {
                let t = line.trim_start();
                let lhs = t.split('=').next().unwrap_or("").trim();
                if t.contains('=') && lhs == k {
                    return Some(Location {
                        line: n + 1,
                        column: line.len() - t.len() + 1,
                    });
                }
            }
        }
    }
    header
}
