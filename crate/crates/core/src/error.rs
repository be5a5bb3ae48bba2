use thiserror::Error;

use crate::expr::ParseError;
use crate::jet::JetError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("singular metric at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("null plane: pi1(x,y,y,x) = {0:e}")]
    NullPlane(f64),
    #[error("cannot build an orthonormal J-basis: {0}")]
    Frame(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
