use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ambiguous sheet: point z = {z} is a branch value and no sheet tag was given")]
    AmbiguousSheet { z: String },

    #[error("sheet inconsistency: {0}")]
    SheetInconsistency(String),

    #[error("degenerate sampling: preimage counts disagree across targets ({counts:?})")]
    DegenerateSampling { counts: Vec<usize> },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("quadrature did not converge: estimated error {achieved:.3e} > target {target:.3e} after {cells} cells")]
    ConvergenceFailure {
        achieved: f64,
        target: f64,
        cells: usize,
    },

    #[error("identity failure in {entry}: difference = {difference}")]
    IdentityFailure { entry: String, difference: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
