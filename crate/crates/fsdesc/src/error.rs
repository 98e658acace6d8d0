//! Crate-wide error type.
//!
//! One enum covers the whole pipeline so callers can match on failure class
//! without unwrapping nested error chains. The CLI maps each variant to a
//! process exit code via [`Error::exit_code`]: `2` for unreadable inputs and
//! malformed invocations, `1` for domain failures (violated invariants,
//! degenerate data, files whose contents break the format contract).

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be read or decoded at the byte level.
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },

    /// An image (after optional cropping) is too small to support the
    /// requested neighborhood or pyramid depth.
    #[error("image too small: {width}x{height}, need at least {min_side} per side ({context})")]
    TooSmall {
        width: usize,
        height: usize,
        min_side: usize,
        context: String,
    },

    /// A downsample would produce an empty field.
    #[error("downsampling {width}x{height} by {factor} would produce an empty field")]
    DegenerateOutput {
        width: usize,
        height: usize,
        factor: usize,
    },

    /// Image encode/decode failed or was given out-of-range codec parameters.
    #[error("codec failure: {0}")]
    CodecFailure(String),

    /// A configuration value is outside its documented domain.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An operation needing at least one element got none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Mismatched shapes between cooperating values (filter vs. image,
    /// coefficients vs. pyramid, feature dimension vs. model, ...).
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A loss or objective stopped being finite during optimization.
    #[error("non-finite {what} at step {step}")]
    NonFinite { what: String, step: usize },

    /// Fewer samples than the estimator needs.
    #[error("too few samples: have {have}, need at least {need} ({context})")]
    TooFewSamples {
        have: usize,
        need: usize,
        context: String,
    },

    /// A mixture component collapsed and could not be recovered by reseeding.
    #[error("degenerate mixture component {component}: {reason}")]
    DegenerateComponent { component: usize, reason: String },

    /// Silhouette requested on a single-cluster assignment.
    #[error("silhouette is undefined for a single cluster")]
    SingleCluster,

    /// A serialized artifact has the wrong leading magic bytes.
    #[error("{path}: bad magic, not a recognized artifact")]
    BadMagic { path: PathBuf },

    /// A serialized artifact has an unsupported format version.
    #[error("{path}: unsupported format version {found} (supported: {supported})")]
    BadVersion {
        path: PathBuf,
        found: u32,
        supported: u32,
    },

    /// A model file holds a different kind of model than requested.
    #[error("{path}: expected a {expected} model, found {found}")]
    KindMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },

    /// A loaded artifact fails one of its type invariants.
    #[error("{path}: invariant violated: {invariant}")]
    InvariantViolation { path: PathBuf, invariant: String },

    /// A binary artifact's declared sizes disagree with its actual contents.
    #[error("{path}: size mismatch: {detail}")]
    SizeMismatch { path: PathBuf, detail: String },

    /// A manifest or other structured input file is malformed.
    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    /// Plain I/O failure while writing outputs.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code the CLI uses for this failure.
    ///
    /// `2` means "the invocation or an input file could not be read at all";
    /// `1` means "the inputs were readable but the domain rejected them".
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnreadableFile { .. } | Error::Manifest { .. } | Error::Io { .. } => 2,
            _ => 1,
        }
    }

    /// Shorthand for [`Error::UnreadableFile`] from any displayable cause.
    pub(crate) fn unreadable(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::UnreadableFile {
            path: path.into(),
            reason: reason.to_string(),
        }
    }

    /// Shorthand for [`Error::Io`].
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
