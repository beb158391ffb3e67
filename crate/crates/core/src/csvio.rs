//! CSV files with a `#`-prefixed metadata preamble.
//!
//! ```text
//! # aks-qfi 0.1.0
//! # seed: 7
//! # config_sha256: 5f1c…
//! run_id,rule,...
//! ```
//!
//! Readers skip every line starting with `#`, so the preamble never reaches
//! the parsed rows.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;

/// Ordered `key: value` pairs written above the header row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn new() -> Self {
        let mut m = Self::default();
        m.push("version", concat!("aks-qfi ", env!("CARGO_PKG_VERSION")));
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn write_rows<T: Serialize>(path: &Path, meta: &Metadata, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_to(&mut out, meta, rows)?;
    out.flush()?;
    Ok(())
}

pub fn write_to<W: Write, T: Serialize>(out: &mut W, meta: &Metadata, rows: &[T]) -> Result<()> {
    for (k, v) in &meta.0 {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<(Metadata, Vec<T>)> {
    let mut meta = Metadata::default();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let Some(rest) = line.strip_prefix('#') else {
            break;
        };
        if let Some((k, v)) = rest.trim().split_once(':') {
            meta.0.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok((meta, rows))
}
