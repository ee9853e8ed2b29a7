use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An evaluation point or coordinate lies outside the valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed argument (degree, derivative order, sizes).
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("material error: {0}")]
    Material(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The reduced stiffness is not positive definite, usually because the
    /// plate is under-constrained.
    #[error("constraint error: {0}")]
    Constraint(String),

    #[error("inertia error: {0}")]
    Inertia(String),

    /// The buckling problem has no positive load factor for the given
    /// pre-buckling load.
    #[error("load direction error: {0}")]
    LoadDirection(String),

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("case `{id}`: {source}")]
    Case {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_case(self, id: &str) -> Self {
        Error::Case {
            id: id.to_string(),
            source: Box::new(self),
        }
    }
}
