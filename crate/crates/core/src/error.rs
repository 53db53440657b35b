//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Probability level outside the open unit interval.
    #[error("tau must lie strictly between 0 and 1, got {tau}")]
    InvalidTau { tau: f64 },

    /// Design matrix violates a structural requirement (intercept column,
    /// dummy coding, dimensions).
    #[error("invalid design matrix: {message}")]
    Design { message: String },

    /// Design matrix is rank deficient. `dependent` lists the columns that
    /// are linear combinations of the others, each with the columns it
    /// depends on.
    #[error("design matrix is rank deficient: {}", format_dependent(dependent))]
    RankDeficient { dependent: Vec<(String, Vec<String>)> },

    /// Mismatched dimensions between related inputs.
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },

    /// Schema definition is inconsistent or incomplete.
    #[error("schema error: {message}")]
    Schema { message: String },

    /// Input data violates the schema or contains unusable values.
    #[error("data error: {message}")]
    Data { message: String },

    /// Raster inputs are malformed or geometrically incompatible.
    #[error("raster error: {message}")]
    Raster { message: String },

    /// A numerical procedure failed beyond recovery.
    #[error("numerical failure: {message}")]
    Numerical { message: String },

    /// An error raised while fitting one level of a quantile grid.
    #[error("fit at tau={tau} failed: {source}")]
    AtTau {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn design(message: impl Into<String>) -> Self {
        Error::Design {
            message: message.into(),
        }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Error::Schema {
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Error::Data {
            message: message.into(),
        }
    }

    pub fn raster(message: impl Into<String>) -> Self {
        Error::Raster {
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical {
            message: message.into(),
        }
    }

    pub fn at_tau(tau: f64, source: Error) -> Self {
        Error::AtTau {
            tau,
            source: Box::new(source),
        }
    }
}

fn format_dependent(dependent: &[(String, Vec<String>)]) -> String {
    dependent
        .iter()
        .map(|(col, on)| {
            if on.is_empty() {
                format!("column `{col}` is linearly dependent on the other columns")
            } else {
                format!("column `{col}` is linearly dependent on [{}]", on.join(", "))
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}
