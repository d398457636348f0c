use std::path::PathBuf;

use crate::store::Channel;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("slice {index} out of range (partition has {count} slices)")]
    SliceOutOfRange { index: usize, count: usize },

    #[error("slices {a} and {b} are not adjacent")]
    NonAdjacentSlices { a: usize, b: usize },

    #[error("vertex {0} appears more than once")]
    DuplicateVertex(u64),

    #[error("vertex {0} is not a leaf of the hierarchy")]
    UnknownVertex(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed hierarchy: {0}")]
    Malformed(String),

    #[error("bad tile format: {0}")]
    Format(String),

    #[error("tile store I/O failed for slice {slice} ({channel}) at {path:?}: {source}")]
    Io {
        slice: usize,
        channel: Channel,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no tile stored for slice {slice} ({channel})")]
    MissingTile { slice: usize, channel: Channel },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
