use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("no connected component with at least {required} nodes (largest has {largest})")]
    NoLargeComponent { required: usize, largest: usize },

    #[error("graph has {nodes} nodes; exhaustive search is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },

    #[error("graph pool entry has {actual} nodes but the action set has {expected}")]
    PoolSizeMismatch { expected: usize, actual: usize },
}
