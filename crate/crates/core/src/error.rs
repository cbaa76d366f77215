use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("density encoding undefined: denominator 2^n·y + Tr O = {denominator:e}")]
    DegenerateEncoding { denominator: f64 },

    #[error("unsupported gate {gate} in {context}")]
    UnsupportedGate { gate: String, context: &'static str },

    #[error(
        "term budget exceeded: {terms} terms > limit {limit} after {gates_applied} gates \
         ({t_applied} T/T† applied)"
    )]
    ResourceLimit {
        terms: usize,
        limit: usize,
        gates_applied: usize,
        t_applied: usize,
    },

    #[error("gate {gate} is not X-Y preserving: {input} ↦ {image}")]
    NotXyPreserving {
        gate: String,
        input: String,
        image: String,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
