//! CSV files with a provenance comment on the first line.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::RunError;
use crate::resolve::Resolved;

pub const OUTPUT_ROOT_ENV: &str = "HCOPT_OUTPUT_ROOT";

/// `explicit`, else `$HCOPT_OUTPUT_ROOT/<output_dir or name>`, else relative to the working directory.
pub fn output_dir(res: &Resolved, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let e = &res.config.experiment;
    let leaf = e.output_dir.clone().unwrap_or_else(|| e.name.clone());
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) => PathBuf::from(root).join(leaf),
        None => PathBuf::from(leaf),
    }
}

pub fn create_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Shortest round-trip decimal, so reruns are byte-identical.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

pub fn vector(x: &[f64]) -> String {
    x.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, hash: &str, seed: u64) -> Result<(), RunError> {
        let io = |source| RunError::Io {
            path: path.to_path_buf(),
            source,
        };
        let csv_err = |source| RunError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut file = File::create(path).map_err(io)?;
        writeln!(file, "# config_hash={hash} seed={seed}").map_err(io)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}
