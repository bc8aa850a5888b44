//! File emission and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config_sha256: String,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileEntry>,
    pub warnings: Vec<String>,
}

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Full-precision float text; 17 significant digits round-trip every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `<prefix>_<quantity>.<ext>` files into one directory and records
/// their checksums in emission order.
pub struct Outputs {
    dir: PathBuf,
    prefix: String,
    files: Vec<FileEntry>,
}

impl Outputs {
    pub fn new(dir: &Path, prefix: &str) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            prefix: prefix.to_string(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, quantity: &str, ext: &str, bytes: &[u8]) -> Result<(), CliError> {
        let name = format!("{}_{quantity}.{ext}", self.prefix);
        let path = self.dir.join(&name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(FileEntry {
            name,
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Numeric table with a header row.
    pub fn csv(&mut self, quantity: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            w.write_record(r.iter().map(|x| fmt_f64(*x))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write(quantity, "csv", &bytes)
    }

    /// Matrix with the column grid in the header row and the row grid in
    /// the first column.
    pub fn csv_matrix(
        &mut self,
        quantity: &str,
        corner: &str,
        rows: &[f64],
        cols: &[f64],
        values: &[Vec<f64>],
    ) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        let mut head = vec![corner.to_string()];
        head.extend(cols.iter().map(|x| fmt_f64(*x)));
        w.write_record(&head).map_err(io)?;
        for (r, row) in rows.iter().zip(values) {
            let mut rec = vec![fmt_f64(*r)];
            rec.extend(row.iter().map(|x| fmt_f64(*x)));
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write(quantity, "csv", &bytes)
    }

    pub fn json<S: Serialize>(&mut self, quantity: &str, value: &S) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.write(quantity, "json", &bytes)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn into_files(self) -> Vec<FileEntry> {
        self.files
    }
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    let path = dir.join(MANIFEST);
    fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
