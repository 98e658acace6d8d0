//! Corpus manifests and the per-row identity lines carried inside feature
//! files.
//!
//! A manifest is a CSV file with header `path,label` (or just `path`); paths
//! are relative to the manifest's own directory, labels are optional per
//! row, and `#`-prefixed lines are comments. The same `path,label` encoding,
//! one CSV record per row, is what feature files store as their per-row
//! identity lines.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One manifest row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path exactly as written in the manifest, relative to its directory.
    pub path: String,
    pub label: Option<String>,
}

impl ManifestEntry {
    /// The on-disk location, resolved against the manifest's directory.
    pub fn resolve(&self, base: &Path) -> PathBuf {
        base.join(&self.path)
    }
}

fn manifest_err(path: &Path, reason: impl ToString) -> Error {
    Error::Manifest {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Reads a manifest, returning its base directory and rows in file order.
pub fn read_manifest(path: &Path) -> Result<(PathBuf, Vec<ManifestEntry>)> {
    let base = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let file = std::fs::File::open(path).map_err(|e| Error::unreadable(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(file);

    let headers = rdr.headers().map_err(|e| manifest_err(path, e))?.clone();
    let header_ok = matches!(headers.len(), 1 | 2)
        && headers.get(0).map(str::trim) == Some("path")
        && (headers.len() == 1 || headers.get(1).map(str::trim) == Some("label"));
    if !header_ok {
        return Err(manifest_err(
            path,
            format!(
                "header must be `path` or `path,label`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| manifest_err(path, e))?;
        if record.len() > 2 {
            return Err(manifest_err(
                path,
                format!("row {} has {} fields, expected 1 or 2", entries.len() + 2, record.len()),
            ));
        }
        let p = record.get(0).unwrap_or("").to_string();
        if p.is_empty() {
            return Err(manifest_err(path, format!("row {} has an empty path", entries.len() + 2)));
        }
        if !seen.insert(p.clone()) {
            return Err(manifest_err(path, format!("duplicate path `{p}`")));
        }
        let label = record
            .get(1)
            .map(str::to_string)
            .filter(|l| !l.is_empty());
        entries.push(ManifestEntry { path: p, label });
    }
    Ok((base, entries))
}

/// Writes a manifest atomically, with leading `#`-comment lines.
pub fn write_manifest(path: &Path, entries: &[ManifestEntry], comments: &[String]) -> Result<()> {
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        rows.push(vec![e.path.clone(), e.label.clone().unwrap_or_default()]);
    }
    write_csv(path, comments, &["path", "label"], rows)
}

/// Writes a CSV file atomically: `#`-comment lines, a header, then rows.
/// Every consumer in this crate skips the comment lines on read.
pub fn write_csv(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    for c in comments {
        buf.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(|e| manifest_err(path, e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| manifest_err(path, e))?;
        }
        w.flush().map_err(|e| manifest_err(path, e))?;
    }
    crate::store::atomic_write(path, &buf)
}

/// A CSV table read back from one of this crate's outputs: header names and
/// string-valued rows, with `#`-comments skipped.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Index of a named column, or an error listing what exists.
    pub fn column(&self, name: &str, path: &Path) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            manifest_err(
                path,
                format!("missing column `{name}` (found: {})", self.header.join(", ")),
            )
        })
    }
}

/// Reads any of this crate's CSV outputs back as strings.
pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::unreadable(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| manifest_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| manifest_err(path, e))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(CsvTable { header, rows })
}

/// Encodes one feature-row identity as a single CSV line `path,label`
/// (label empty when absent). The resulting string never contains a newline,
/// which is what the feature-file label block requires.
pub fn encode_row_key(path: &str, label: Option<&str>) -> Result<String> {
    let mut buf: Vec<u8> = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([path, label.unwrap_or("")])
            .and_then(|()| w.flush().map_err(csv::Error::from))
            .map_err(|e| Error::CodecFailure(format!("row key encoding: {e}")))?;
    }
    let mut line = String::from_utf8(buf)
        .map_err(|e| Error::CodecFailure(format!("row key encoding: {e}")))?;
    while line.ends_with('\n') || line.ends_with('\r') {
        line.pop();
    }
    if line.contains('\n') {
        return Err(Error::CodecFailure(format!(
            "row key for `{path}` contains a newline"
        )));
    }
    Ok(line)
}

/// Decodes a feature-row identity line back into `(path, label)`.
pub fn decode_row_key(line: &str) -> Result<(String, Option<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(line.as_bytes());
    let mut records = rdr.records();
    let record = records
        .next()
        .ok_or_else(|| Error::CodecFailure(format!("empty feature-row identity line `{line}`")))?
        .map_err(|e| Error::CodecFailure(format!("feature-row identity line `{line}`: {e}")))?;
    if record.len() > 2 || record.get(0).map_or(true, str::is_empty) {
        return Err(Error::CodecFailure(format!(
            "feature-row identity line `{line}` must be `path,label`"
        )));
    }
    let path = record.get(0).unwrap_or("").to_string();
    let label = record.get(1).map(str::to_string).filter(|l| !l.is_empty());
    Ok((path, label))
}
