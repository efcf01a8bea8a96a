use thiserror::Error;

/// Failures raised by the algebraic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("series is not a unit (zero constant term)")]
    NonUnit,
    #[error("no precision left: {0}")]
    PrecisionExhausted(String),
    #[error("resonance at order {0}: shifted constant matrix is singular")]
    Resonance(usize),
    #[error(
        "extension cannot be split: eigenvalues {lambda} and {mu} differ by a positive integer"
    )]
    ObstructedSplit { lambda: String, mu: String },
    #[error("module is not geometric: {0}")]
    NonGeometric(String),
    #[error("module does not have a simple pole")]
    NotSimplePole,
    #[error("saturation did not stabilise within {0} steps")]
    NotRegular(usize),
    #[error("no Jordan block of size {size} at eigenvalue {eigenvalue}")]
    NoSuchBlock { eigenvalue: String, size: usize },
    #[error("fresco factors are not admissible: {0}")]
    NotAdmissible(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// The variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OrderMismatch(..) => "OrderMismatch",
            Error::NonUnit => "NonUnit",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::Resonance(_) => "Resonance",
            Error::ObstructedSplit { .. } => "ObstructedSplit",
            Error::NonGeometric(_) => "NonGeometric",
            Error::NotSimplePole => "NotSimplePole",
            Error::NotRegular(_) => "NotRegular",
            Error::NoSuchBlock { .. } => "NoSuchBlock",
            Error::NotAdmissible(_) => "NotAdmissible",
            Error::Dimension(_) => "Dimension",
            Error::Invalid(_) => "Invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
