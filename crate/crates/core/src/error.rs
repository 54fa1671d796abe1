use std::path::PathBuf;

use thiserror::Error;

use crate::ingest::Issue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: malformed CSV: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },

    /// Header row does not match the file's schema.
    #[error("{file}:{line}: schema error: {message}")]
    Schema {
        file: String,
        line: u64,
        message: String,
    },

    /// Fatal integrity problems found while loading or validating a dataset.
    #[error("dataset has {} fatal issue(s); first: {}", .0.len(), .0.first().map(|i| i.to_string()).unwrap_or_default())]
    Invalid(Vec<Issue>),

    #[error("no journal entry at any year for journal {journal_id} (publication {pub_id})")]
    MissingJournal { pub_id: String, journal_id: String },

    #[error("subject category {0} is not present in the SC map")]
    UnknownSc(String),

    #[error("missing cost entry: {0}")]
    MissingCost(String),

    #[error("byline position {position} out of range for {total_authors} author(s)")]
    PositionOutOfRange { position: u32, total_authors: u32 },

    #[error("total_authors must be at least 1")]
    NoAuthors,

    #[error("years on staff must be at least 1 (professor {0})")]
    ZeroYears(String),

    #[error("research cost must be positive, got {0}")]
    NonPositiveCost(f64),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("failed to build worker pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Module the error originates from, used in machine-readable CLI errors.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Io { .. } | Error::Csv { .. } | Error::Schema { .. } | Error::Invalid(_) => {
                "ingestion"
            }
            Error::MissingJournal { .. } => "cohort",
            Error::UnknownSc(_) | Error::PositionOutOfRange { .. } | Error::NoAuthors => "credit",
            Error::MissingCost(_) | Error::ZeroYears(_) | Error::NonPositiveCost(_) => "indicators",
            Error::Config { .. } => "config",
            Error::ThreadPool(_) => "runtime",
            Error::Json(_) => "analytics",
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::Schema { .. } => "schema",
            Error::Invalid(_) => "invalid_dataset",
            Error::MissingJournal { .. } => "missing_journal",
            Error::UnknownSc(_) => "unknown_sc",
            Error::MissingCost(_) => "missing_cost",
            Error::PositionOutOfRange { .. } => "position_out_of_range",
            Error::NoAuthors => "no_authors",
            Error::ZeroYears(_) => "zero_years",
            Error::NonPositiveCost(_) => "non_positive_cost",
            Error::Config { .. } => "config",
            Error::ThreadPool(_) => "thread_pool",
            Error::Json(_) => "json",
        }
    }
}
