use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// An input file that does not exist; reported with exit code 2.
#[derive(Debug)]
pub struct MissingInput(pub PathBuf);

impl fmt::Display for MissingInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "input file not found: {}", self.0.display())
    }
}

impl std::error::Error for MissingInput {}

pub fn read_input(path: &Path) -> anyhow::Result<String> {
    if !path.exists() {
        return Err(MissingInput(path.to_path_buf()).into());
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory that remembers the hash of every file written.
pub struct OutDir {
    root: PathBuf,
    files: BTreeMap<String, String>,
}

impl OutDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), files: BTreeMap::new() })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.insert(rel.to_string(), sha256_hex(bytes));
        Ok(path)
    }

    pub fn files(&self) -> &BTreeMap<String, String> {
        &self.files
    }
}

/// A JSON document stamped with the run seed and configuration hash.
#[derive(Serialize, Deserialize)]
pub struct Stamped<T> {
    pub seed: u64,
    pub config_hash: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Serializes rows to CSV bytes, appending `seed` and `config_hash` columns.
pub fn csv_bytes<T: Serialize>(rows: &[T], seed: u64, config_hash: &str) -> anyhow::Result<Vec<u8>> {
    let mut plain = csv::Writer::from_writer(Vec::new());
    for row in rows {
        plain.serialize(row)?;
    }
    let plain = plain.into_inner()?;
    let mut reader = csv::Reader::from_reader(plain.as_slice());
    let mut headers = if rows.is_empty() { csv::StringRecord::new() } else { reader.headers()?.clone() };
    headers.push_field("seed");
    headers.push_field("config_hash");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&headers)?;
    let seed = seed.to_string();
    for rec in reader.records() {
        let mut rec = rec?;
        rec.push_field(&seed);
        rec.push_field(config_hash);
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

/// Writes to `out` when given, else to stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}
