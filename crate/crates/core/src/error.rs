use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no edges")]
    EmptyEdgeSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("every node is vaccinated; no epidemic seed is available")]
    NoSeed,

    #[error("instance too large for exhaustive enumeration: {unvaccinated} unvaccinated nodes (limit {limit})")]
    Capacity { unvaccinated: usize, limit: usize },

    #[error("degenerate degree distribution: {0}")]
    DegenerateDistribution(String),

    #[error("division by zero: {0}")]
    Division(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("replica {replica}: {source}")]
    Replica {
        replica: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag for the error category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::EmptyEdgeSet => "empty_edge_set",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UndefinedStatistic(_) => "undefined_statistic",
            Error::NoSeed => "no_seed",
            Error::Capacity { .. } => "capacity",
            Error::DegenerateDistribution(_) => "degenerate_distribution",
            Error::Division(_) => "division",
            Error::Numeric(_) => "numeric",
            Error::Replica { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}
