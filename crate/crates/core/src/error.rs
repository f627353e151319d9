use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty observation set")]
    EmptyObservations,

    #[error("error out of range: {value} is not a probability in [0, 1]")]
    ErrorOutOfRange { value: f64 },

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unreachable below irreducible error: target {target} <= c_inf {c_inf}")]
    BelowIrreducible { target: f64, c_inf: f64 },

    #[error("above n=1 error: target {target} > a + c_inf = {ceiling}")]
    AboveUnitSize { target: f64, ceiling: f64 },

    #[error("underdetermined fit: {needed} points required, {got} supplied")]
    Underdetermined { needed: usize, got: usize },

    #[error("degenerate joint design: {0}")]
    DegenerateJointDesign(String),

    #[error("numerical failure at iteration {iteration}: {reason} (params {params:?}, sse {sse})")]
    NumericalFailure {
        iteration: usize,
        reason: String,
        params: Vec<f64>,
        sse: f64,
    },

    #[error("grid too large: {cells} cells exceeds the limit of {limit}")]
    GridTooLarge { cells: u128, limit: u64 },

    #[error("cannot classify without fit: the supplied fit did not converge")]
    UnconvergedFit,

    #[error(
        "law never exits small-data region under these tolerances: \
         eps0 - tol_guess = {threshold} <= c_inf = {c_inf}"
    )]
    NeverExitsSmallData { threshold: f64, c_inf: f64 },

    #[error("schema error: unknown column `{column}`")]
    UnknownColumn { column: String },

    #[error("schema error: missing required column `{column}`")]
    MissingColumn { column: String },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("unknown fixture `{name}` (available: {available})")]
    UnknownFixture { name: String, available: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
