use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("record `{id}`: {reason}")]
    InvalidRecord { id: String, reason: String },

    #[error("malformed FASTA: {0}")]
    Fasta(String),

    #[error("duplicate sequence id `{0}`")]
    DuplicateId(String),

    #[error("sequence `{id}` belongs to family `{found}`, expected `{expected}`")]
    FamilyMismatch {
        id: String,
        expected: String,
        found: String,
    },

    #[error("invalid accession `{0}`")]
    InvalidAccession(String),

    #[error("fetching {url}: {message}")]
    Http { url: String, message: String },

    #[error("fetching {0}: empty payload")]
    EmptyPayload(String),

    #[error("sequence length {len} exceeds the enumeration limit of {max}")]
    SequenceTooLong { len: usize, max: usize },

    #[error("invalid fold parameters: {0}")]
    InvalidParams(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("partition function is not finite (length {0})")]
    NonFinite(usize),

    #[error("image must be square, got {width}x{height}")]
    NonSquare { width: usize, height: usize },

    #[error("image sizes differ: {0}x{0} vs {1}x{1}")]
    SizeMismatch(usize, usize),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("png {path}: {message}")]
    Png { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    Tsv {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("need at least {needed} families, have {have}")]
    TooFewFamilies { needed: usize, have: usize },

    #[error("family `{0}` has no split assignment")]
    UnassignedFamily(String),

    #[error("no base-pairing matrix for sequence `{0}`")]
    MissingBppm(String),

    #[error("missing dot-plot image {0}")]
    MissingDotplot(PathBuf),

    #[error("sequence ids `{0}` and `{1}` map to the same file name")]
    FileNameCollision(String, String),

    #[error("{path}:{line}: {message}")]
    Jsonl {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid ratio `{0}` (expected `r:1` or `none`)")]
    InvalidRatio(String),

    #[error("batch size {batch_size} is not divisible by {parts}")]
    IndivisibleBatch { batch_size: usize, parts: usize },

    #[error("no `{0}` pairs available for sampling")]
    EmptyClass(&'static str),

    #[error("score {score} for pair `{pair_id}` is outside [0, 1]")]
    ScoreOutOfRange { pair_id: String, score: f64 },

    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("prediction for unknown pair `{0}`")]
    UnknownPair(String),

    #[error("prediction label for `{0}` disagrees with the manifest")]
    LabelMismatch(String),

    #[error("no predictions")]
    EmptyCounts,

    #[error("ROC needs both classes present")]
    SingleClass,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure came from the filesystem or the network rather
    /// than from the data itself.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Http { .. } | Error::EmptyPayload(_) | Error::Png { .. }
        )
    }
}
