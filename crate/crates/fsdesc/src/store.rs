//! Versioned persistence: JSON envelopes for fitted models and a compact
//! binary container for descriptor matrices.
//!
//! Model files are human-auditable JSON holding a format version, a kind tag,
//! a provenance block (seed, config echo, creation time, dependency hashes),
//! and the model payload. Every load revalidates the payload's domain
//! invariants, so an invalid model can never be materialized from disk.
//! Descriptor matrices are bulk data and use a raw little-endian binary
//! layout instead: magic `FSDF`, version, row count, dimension, `N*D` f32
//! values row-major, then an optional label block with one newline-terminated
//! line per row.
//!
//! All writes go through a temp-file-plus-rename so readers never observe a
//! partial file.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Current model-envelope format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;
/// Magic bytes opening a descriptor-matrix file.
pub const FEATURE_MAGIC: [u8; 4] = *b"FSDF";
/// Current descriptor-matrix format version.
pub const FEATURE_FORMAT_VERSION: u32 = 1;

/// Implemented by every model type persisted as a JSON envelope.
pub trait StoredModel: Serialize + DeserializeOwned {
    /// Kind tag recorded in the envelope (e.g. `"filter_bank"`).
    const KIND: &'static str;

    /// Revalidates every domain invariant. Called before each save and after
    /// each load.
    fn check(&self) -> Result<()>;
}

impl StoredModel for crate::filterbank::FilterBank {
    const KIND: &'static str = "filter_bank";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl StoredModel for crate::tasks::DetectorModel {
    const KIND: &'static str = "detector";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl StoredModel for crate::tasks::AttributorModel {
    const KIND: &'static str = "attributor";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl StoredModel for crate::tasks::ClusterAssignment {
    const KIND: &'static str = "kmeans";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

/// Provenance block embedded in every model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// RNG seed the artifact was produced with.
    pub seed: u64,
    /// Full echo of the producing configuration.
    pub config: serde_json::Value,
    /// Creation time, seconds since the Unix epoch.
    pub created_unix: u64,
    /// Content hashes of dependency artifacts, keyed by role (e.g. the
    /// filter bank a detector's descriptors came from).
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    /// Builds a provenance block stamped with [`creation_timestamp`].
    pub fn new(seed: u64, config: &impl Serialize) -> Self {
        Provenance {
            seed,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            created_unix: creation_timestamp(),
            inputs: BTreeMap::new(),
        }
    }

    /// Records a named dependency hash.
    pub fn with_input(mut self, name: &str, hash: String) -> Self {
        self.inputs.insert(name.to_string(), hash);
        self
    }
}

/// Creation timestamp for provenance blocks: honors the `SOURCE_DATE_EPOCH`
/// reproducible-build convention when set, otherwise the wall clock.
pub fn creation_timestamp() -> u64 {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(t) = v.trim().parse::<u64>() {
            return t;
        }
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Serialize, Deserialize)]
struct ModelEnvelope<T> {
    format_version: u32,
    kind: String,
    provenance: Provenance,
    payload: T,
}

/// Hex-encoded SHA-256 of a value's canonical JSON serialization. Used to
/// fingerprint artifacts (e.g. a filter bank) inside dependents' provenance.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("value is JSON-serializable");
    hex_digest(&bytes)
}

/// Hex-encoded SHA-256 of a file's raw bytes.
pub fn file_hash(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::unreadable(path, e))?;
    Ok(hex_digest(&bytes))
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Validates and saves a model as a JSON envelope.
pub fn save_model<T: StoredModel>(path: &Path, model: &T, provenance: &Provenance) -> Result<()> {
    model.check()?;
    let envelope = ModelEnvelope {
        format_version: MODEL_FORMAT_VERSION,
        kind: T::KIND.to_string(),
        provenance: provenance.clone(),
        payload: model,
    };
    let mut json = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Error::CodecFailure(format!("model serialization: {e}")))?;
    json.push('\n');
    atomic_write(path, json.as_bytes())
}

/// Loads a model envelope, checking version and kind and revalidating every
/// domain invariant of the payload.
pub fn load_model<T: StoredModel>(path: &Path) -> Result<(T, Provenance)> {
    let text = fs::read_to_string(path).map_err(|e| Error::unreadable(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|_| Error::BadMagic {
        path: path.to_path_buf(),
    })?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::BadMagic {
            path: path.to_path_buf(),
        })?;
    if version != MODEL_FORMAT_VERSION as u64 {
        return Err(Error::BadVersion {
            path: path.to_path_buf(),
            found: version.min(u32::MAX as u64) as u32,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let kind = value.get("kind").and_then(|v| v.as_str()).unwrap_or("?");
    if kind != T::KIND {
        return Err(Error::KindMismatch {
            path: path.to_path_buf(),
            expected: T::KIND.to_string(),
            found: kind.to_string(),
        });
    }
    let envelope: ModelEnvelope<T> =
        serde_json::from_value(value).map_err(|e| Error::InvariantViolation {
            path: path.to_path_buf(),
            invariant: format!("payload schema: {e}"),
        })?;
    envelope.payload.check().map_err(|e| Error::InvariantViolation {
        path: path.to_path_buf(),
        invariant: e.to_string(),
    })?;
    Ok((envelope.payload, envelope.provenance))
}

/// An N x D matrix of f32 descriptor rows with optional per-row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    d: usize,
    data: Vec<f32>,
    labels: Option<Vec<String>>,
}

impl FeatureMatrix {
    /// Wraps raw row-major data, validating lengths, finiteness, and that
    /// labels (if any) are one per row and newline-free.
    pub fn new(n: usize, d: usize, data: Vec<f32>, labels: Option<Vec<String>>) -> Result<Self> {
        if data.len() != n * d {
            return Err(Error::ShapeMismatch(format!(
                "descriptor matrix holds {} values, expected {n}x{d} = {}",
                data.len(),
                n * d
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "descriptor matrix contains a non-finite value".into(),
            ));
        }
        if let Some(ls) = &labels {
            if ls.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "{} labels for {n} rows",
                    ls.len()
                )));
            }
            if ls.iter().any(|l| l.contains('\n')) {
                return Err(Error::InvalidConfig(
                    "row labels must not contain newlines".into(),
                ));
            }
        }
        // An empty matrix cannot distinguish "no labels" from "zero labels";
        // normalize to the former so round trips are exact.
        let labels = if n == 0 { None } else { labels };
        Ok(FeatureMatrix { n, d, data, labels })
    }

    /// Builds a matrix from f64 rows (quantizing to f32).
    pub fn from_rows(rows: &[Vec<f64>], labels: Option<Vec<String>>) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} values, expected {d}",
                    r.len()
                )));
            }
        }
        let data = rows.iter().flatten().map(|v| *v as f32).collect();
        FeatureMatrix::new(rows.len(), d, data, labels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    /// All rows widened back to f64 (the numeric type of model fitting).
    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| *v as f64).collect())
            .collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Selects a subset of rows (labels carried along), for split protocols.
    pub fn select(&self, indices: &[usize]) -> Result<FeatureMatrix> {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            if i >= self.n {
                return Err(Error::ShapeMismatch(format!(
                    "row index {i} out of range for {} rows",
                    self.n
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| indices.iter().map(|&i| ls[i].clone()).collect());
        FeatureMatrix::new(indices.len(), self.d, data, labels)
    }
}

/// Serializes a descriptor matrix into the binary layout.
fn encode_features(m: &FeatureMatrix) -> Result<Vec<u8>> {
    let n = u32::try_from(m.n).map_err(|_| Error::InvalidConfig("row count exceeds u32".into()))?;
    let d = u32::try_from(m.d).map_err(|_| Error::InvalidConfig("dimension exceeds u32".into()))?;
    let mut out = Vec::with_capacity(16 + 4 * m.data.len());
    out.extend_from_slice(&FEATURE_MAGIC);
    out.extend_from_slice(&FEATURE_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&d.to_le_bytes());
    for v in &m.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(labels) = &m.labels {
        for l in labels {
            out.extend_from_slice(l.as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

/// Saves a descriptor matrix (atomic write).
pub fn save_features(path: &Path, m: &FeatureMatrix) -> Result<()> {
    atomic_write(path, &encode_features(m)?)
}

/// Loads a descriptor matrix, validating magic, version, declared sizes, and
/// the label block framing.
pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::unreadable(path, e))?;
    if bytes.len() < 4 || bytes[..4] != FEATURE_MAGIC {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
        });
    }
    if bytes.len() < 16 {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            detail: format!("header truncated at {} bytes (need 16)", bytes.len()),
        });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != FEATURE_FORMAT_VERSION {
        return Err(Error::BadVersion {
            path: path.to_path_buf(),
            found: version,
            supported: FEATURE_FORMAT_VERSION,
        });
    }
    let n = word(8) as usize;
    let d = word(12) as usize;
    let need = n
        .checked_mul(d)
        .and_then(|nd| nd.checked_mul(4))
        .ok_or_else(|| Error::SizeMismatch {
            path: path.to_path_buf(),
            detail: "declared size overflows".into(),
        })?;
    if bytes.len() < 16 + need {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            detail: format!(
                "payload holds {} bytes, header declares {need} ({n}x{d} f32)",
                bytes.len() - 16
            ),
        });
    }
    let data: Vec<f32> = bytes[16..16 + need]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let tail = &bytes[16 + need..];
    let labels = if tail.is_empty() {
        None
    } else {
        let text = std::str::from_utf8(tail).map_err(|_| Error::CodecFailure(format!(
            "{}: label block is not valid UTF-8",
            path.display()
        )))?;
        let body = text.strip_suffix('\n').ok_or_else(|| Error::SizeMismatch {
            path: path.to_path_buf(),
            detail: "label block is not newline-terminated".into(),
        })?;
        let lines: Vec<String> = body.split('\n').map(str::to_string).collect();
        if lines.len() != n {
            return Err(Error::SizeMismatch {
                path: path.to_path_buf(),
                detail: format!("label block holds {} lines for {n} rows", lines.len()),
            });
        }
        Some(lines)
    };
    FeatureMatrix::new(n, d, data, labels).map_err(|e| match e {
        Error::InvalidConfig(msg) | Error::ShapeMismatch(msg) => Error::InvariantViolation {
            path: path.to_path_buf(),
            invariant: msg,
        },
        other => other,
    })
}
