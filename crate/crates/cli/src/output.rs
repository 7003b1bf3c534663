//! Files written by a scenario run.
//!
//! Every CSV starts with a header row; floats are written with `{:.16e}` so
//! runs can be compared byte for byte. `manifest.json` lists the files with
//! the configuration hash, version, seed and worker count.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{FieldError, ScenarioConfig};

/// One cell of a CSV row.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    U(u64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::U(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::U(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format_float(*x),
            Cell::U(x) => x.to_string(),
            Cell::I(x) => x.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::output::Cell::from($x)),*]
    };
}

/// In-memory table, written in one go.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub version: String,
    pub config_sha256: String,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Canonical JSON of the resolved configuration, the input to the hash.
pub fn config_json(cfg: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("configuration serializes")
}

/// Collects the files of one run inside the output directory.
pub struct OutputDir {
    pub dir: PathBuf,
    pub files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> io::Result<()> {
        let mut f = fs::File::create(self.dir.join(name))?;
        f.write_all(bytes)?;
        self.files.push(FileEntry { name: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> io::Result<()> {
        self.write_bytes(name, table.render().as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        s.push('\n');
        self.write_bytes(name, s.as_bytes())
    }

    pub fn finish(self, cfg: &ScenarioConfig, workers: usize, wall_time_s: f64) -> io::Result<Manifest> {
        let manifest = Manifest {
            scenario: cfg.scenario.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_hex(config_json(cfg).as_bytes()),
            config: cfg.clone(),
            seed: cfg.dynamics.seed,
            workers,
            wall_time_s,
            files: self.files,
        };
        let mut s = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        s.push('\n');
        fs::write(self.dir.join("manifest.json"), s)?;
        Ok(manifest)
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorDocument<'a> {
    pub error: &'a str,
    pub kind: &'a str,
    pub fields: &'a [FieldError],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -3.25e-17, 1.0 / 3.0, 6.02e23] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(&["n", "x", "label"]);
        t.push(row![3usize, 0.5, "a,b"]);
        assert_eq!(t.render(), "n,x,label\n3,5.0000000000000000e-1,\"a,b\"\n");
    }

    #[test]
    fn digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
