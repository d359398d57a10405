use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("line {line}: expected {expected} columns, found {found}")]
    RaggedColumns { line: usize, expected: usize, found: usize },

    #[error("template line {line}: {message}")]
    TemplateParse { line: usize, message: String },

    #[error("template references column {column} but the data has {available} feature columns")]
    TemplateColumn { column: usize, available: usize },

    #[error("dictionary line {line}: {message}")]
    DictionaryParse { line: usize, message: String },

    #[error("invalid feature configuration: {0}")]
    InvalidConfig(String),

    #[error("overlapping spans at token {0}")]
    Overlap(usize),

    #[error("span {start}..={end} lies outside a sentence of {len} tokens")]
    SpanOutOfRange { start: usize, end: usize, len: usize },

    #[error("malformed BIO sequence at token {0}")]
    MalformedBio(usize),

    #[error("alignment mismatch: {0}")]
    Alignment(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("training corpus is empty")]
    EmptyCorpus,

    #[error("corpus has {found} columns; at least {needed} are required")]
    MissingColumns { needed: usize, found: usize },

    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),
}
