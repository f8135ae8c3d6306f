use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty input")]
    EmptyInput,
    #[error("framing error: expected {expected} samples/bits, got {got}")]
    Framing { expected: usize, got: usize },
    #[error("length error: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("routing failure: no neighbor of node {stuck_at} makes progress toward node {sink}")]
    Routing { stuck_at: u32, sink: u32 },
    #[error("unknown node id {0}")]
    UnknownNode(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
