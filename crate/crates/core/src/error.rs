use thiserror::Error;

/// Errors raised by graph construction, chain operations and the analysis tools.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("illegal move: vertex {vertex} to slot {slot}")]
    IllegalMove { vertex: usize, slot: usize },
    /// The requested construction cannot be carried out with these parameters
    /// (for example the class-count slack does not fit under `q`).
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no local reduction available at kappa = {kappa}")]
    ReductionUnavailable { kappa: usize },
    #[error("internal failure: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
