use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("evaluation at pole λ = {0}")]
    Pole(String),

    #[error("series composition requires an inner series of valuation >= 1")]
    ValuationRequired,

    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("hypergeometric series does not terminate: no upper parameter is a non-positive integer")]
    NotTerminating,

    #[error("lower parameter {param} has vanishing Pochhammer symbol at index {index}")]
    VanishingLowerPochhammer { param: usize, index: usize },

    #[error("residual denominator after normalisation: {0}")]
    ResidualDenominator(String),

    #[error("grid/chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed field file: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
