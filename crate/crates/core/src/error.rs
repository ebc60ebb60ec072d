use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. `code()` gives the stable
/// machine-readable name used by the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("step {0:?} is the zero vector")]
    ZeroStep(Vec<i64>),
    #[error("step {vector:?} has non-positive weight {weight}")]
    NonPositiveWeight { vector: Vec<i64>, weight: String },
    /// Coordinate numbering is 1-based here, matching the usual z_1..z_d labels.
    #[error("no step moves both forward and backward in coordinate {0}")]
    MissingForwardOrBackwardStep(usize),
    #[error("step {0:?} has an entry outside {{-1, 0, 1}}")]
    EntryOutOfRange(Vec<i64>),
    #[error("step {vector:?} has length {found}, expected dimension {expected}")]
    DimensionMismatch { vector: Vec<i64>, expected: usize, found: usize },
    #[error("invalid model description: {0}")]
    InvalidModel(String),
    #[error("cannot parse weight {0:?} as an exact rational")]
    InvalidWeight(String),
    #[error("model class is not supported here: {0}")]
    UnsupportedClass(String),
    #[error("model has non-zero drift {0}")]
    NonZeroDrift(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("quadrature under-resolved: node spacing {spacing:.3e} exceeds oscillation scale {scale:.3e}")]
    QuadratureUnderResolved { spacing: f64, scale: f64 },
    #[error("invalid quadrature parameters: {0}")]
    InvalidQuadrature(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("sequence has non-positive term at n = {0}")]
    NonPositiveTerms(usize),
    #[error("invalid fit window: {0}")]
    InvalidWindow(String),
    #[error("invalid diagonal representation: {0}")]
    InvalidRepresentation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroStep(_) => "ZeroStep",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::MissingForwardOrBackwardStep(_) => "MissingForwardOrBackwardStep",
            Error::EntryOutOfRange(_) => "EntryOutOfRange",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::UnsupportedClass(_) => "UnsupportedClass",
            Error::NonZeroDrift(_) => "NonZeroDrift",
            Error::ResourceLimit(_) => "ResourceLimit",
            Error::QuadratureUnderResolved { .. } => "QuadratureUnderResolved",
            Error::InvalidQuadrature(_) => "InvalidQuadrature",
            Error::InsufficientData(_) => "InsufficientData",
            Error::NonPositiveTerms(_) => "NonPositiveTerms",
            Error::InvalidWindow(_) => "InvalidWindow",
            Error::InvalidRepresentation(_) => "InvalidRepresentation",
            Error::Numerical(_) => "Numerical",
        }
    }

    /// True for errors caused by bad user input rather than by limits or numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ZeroStep(_)
                | Error::NonPositiveWeight { .. }
                | Error::MissingForwardOrBackwardStep(_)
                | Error::EntryOutOfRange(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidModel(_)
                | Error::InvalidWeight(_)
                | Error::UnsupportedClass(_)
                | Error::NonZeroDrift(_)
                | Error::InvalidQuadrature(_)
                | Error::InvalidWindow(_)
        )
    }
}
