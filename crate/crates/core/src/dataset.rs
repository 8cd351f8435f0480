//! JSON Lines formats: human reference datasets and generated interpretation sets.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::session::GeneratedInterpretation;

/// One input sentence with its human-written interpretations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub sentence: String,
    #[serde(default)]
    pub interpretations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_toxicity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Hex SHA-256 over the canonical JSON of the run configuration.
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
}

/// Generated interpretation set for one sentence, as written by `toxctl generate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedRecord {
    pub id: String,
    pub sentence: String,
    /// `tox(s)` the run started from, after any override.
    pub sentence_toxicity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_toxicity: Option<f64>,
    pub interpretations: Vec<GeneratedInterpretation>,
    pub provenance: Provenance,
}

pub fn parse_jsonl<T: DeserializeOwned>(text: &str, origin: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line).map_err(|e| Error::input(format!("{origin}:{}: {e}", n + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(&text, &path.display().to_string())
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Checks that ids are unique within a file.
pub fn check_unique_ids<'a>(ids: impl IntoIterator<Item = &'a str>, origin: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::input(format!("{origin}: duplicate id {id:?}")));
        }
    }
    Ok(())
}
