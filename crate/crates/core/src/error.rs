use std::path::PathBuf;

use crate::ArmId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("embedding for query {0} has wrong dimension: expected {1}, got {2}")]
    DimensionMismatch(ArmId, usize, usize),

    #[error("embedding for query {0} contains a non-finite value")]
    NonFinite(ArmId),

    #[error("duplicate embedding for query {0}")]
    DuplicateQuery(ArmId),

    #[error("no embedding for query {0}")]
    MissingEmbedding(ArmId),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("all similarity scores are non-positive; preference masses are undefined")]
    DegenerateSimilarities,

    #[error("joint probability needs two distinct arms, got {0} twice")]
    SameArm(usize),

    #[error("arm set must not be empty")]
    EmptySet,

    #[error("cannot split {pool} arms into {parts} partitions")]
    TooManyPartitions { parts: usize, pool: usize },

    #[error("cannot draw {k} arms from a pool of {pool}")]
    SampleTooLarge { k: usize, pool: usize },

    #[error("matrix lost positive definiteness")]
    NotPositiveDefinite,

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
