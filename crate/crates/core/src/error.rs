use thiserror::Error;

/// Errors raised by graph construction, rainbow queries and experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters that are individually well-typed but do not describe a valid model.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Ragged or mis-sized arrays.
    #[error("shape error: {0}")]
    Shape(String),

    /// The requested computation would exceed the memory budget.
    #[error("resource budget exceeded: {needed} bits requested, budget is {budget} bits")]
    Budget { needed: u128, budget: u128 },

    #[error("malformed graph document: {0}")]
    Document(String),

    /// Stored edge counts disagree with the adjacency recomputed on load.
    #[error(
        "edge-count checksum mismatch in layer {layer}: stored {stored}, recomputed {recomputed}"
    )]
    Checksum {
        layer: usize,
        stored: u64,
        recomputed: u64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
