//! TSV record files and the label / decoder sidecars written next to an
//! index file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HbfError, Result};
use crate::index::{DecoderConfig, Record};

/// Parses `key<TAB>value` lines. Blank lines are skipped; keys must be unique.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line.split_once('\t').ok_or_else(|| {
            HbfError::Format(format!("line {}: expected key<TAB>value", lineno + 1))
        })?;
        if key.is_empty() || value.is_empty() {
            return Err(HbfError::Format(format!(
                "line {}: key and value must be non-empty",
                lineno + 1
            )));
        }
        if !seen.insert(key.to_owned()) {
            return Err(HbfError::DuplicateKey(key.to_owned()));
        }
        out.push(Record::new(key, value));
    }
    Ok(out)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<Record>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| HbfError::io(path, e))?;
    parse_records(&text)
}

fn sidecar(index: &Path, ext: &str) -> PathBuf {
    let mut s = index.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

pub fn labels_path(index: &Path) -> PathBuf {
    sidecar(index, ".labels")
}

pub fn decoder_path(index: &Path) -> PathBuf {
    sidecar(index, ".decoder")
}

/// Reads the label sidecar; a missing file means no labels yet.
pub fn read_labels(path: &Path) -> Result<Vec<Vec<u8>>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.as_bytes().to_vec())
            .collect()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(HbfError::io(path, e)),
    }
}

/// Writes labels sorted and de-duplicated, one per line.
pub fn write_labels(path: &Path, labels: &[Vec<u8>]) -> Result<()> {
    let set: BTreeSet<&[u8]> = labels.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for l in set {
        if l.contains(&b'\n') {
            return Err(HbfError::Format("labels must not contain newlines".into()));
        }
        out.extend_from_slice(l);
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| HbfError::io(path, e))
}

pub fn read_decoder(path: &Path) -> Result<Option<DecoderConfig>> {
    match fs::read_to_string(path) {
        Ok(text) => {
            let cfg: DecoderConfig =
                toml::from_str(&text).map_err(|e| HbfError::Format(format!("{}: {e}", path.display())))?;
            cfg.validate()?;
            Ok(Some(cfg))
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(HbfError::io(path, e)),
    }
}

pub fn write_decoder(path: &Path, cfg: &DecoderConfig) -> Result<()> {
    let text = toml::to_string(cfg).map_err(|e| HbfError::Format(e.to_string()))?;
    fs::write(path, text).map_err(|e| HbfError::io(path, e))
}
