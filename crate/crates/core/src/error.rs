use thiserror::Error;

/// Everything that can go wrong inside the numerical modules.
///
/// Magnitudes are carried as `f64` so the error type stays independent of
/// the scalar the computation ran on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("operator is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NonHermitian { residual: f64 },
    #[error("orthogonal conditions: |<b|a>| = {overlap:e} is below {eps:e}")]
    OrthogonalConditions { overlap: f64, eps: f64 },
    #[error("state is orthogonal to the reference momentum (|<p0|E>| = {overlap:e})")]
    ZeroReferenceOverlap { overlap: f64 },
    #[error("time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("classical displacement {displacement} violates the wrap-around guard (limit {limit})")]
    WrapAround { displacement: f64, limit: f64 },
    #[error("stationary momentum {momentum} lies outside the resolved band [{lower}, {upper}]")]
    OutsideBand { momentum: f64, lower: f64, upper: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("no classically allowed region at energy {energy}")]
    NoAllowedRegion { energy: f64 },
    #[error("orbit at energy {energy} is not closed inside the grid")]
    OpenOrbit { energy: f64 },
    #[error("position {x} is classically forbidden at energy {energy}")]
    ForbiddenRegion { x: f64, energy: f64 },
    #[error("no admissible rows left after masking")]
    NoAdmissibleRegion,
    #[error("too few accepted trials: {accepted} < {required}")]
    TooFewAccepted { accepted: usize, required: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input")]
    EmptyInput,
}

impl LabError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            LabError::InvalidSpace(_) => "invalid_space",
            LabError::DimensionMismatch { .. } => "dimension_mismatch",
            LabError::ZeroVector => "zero_vector",
            LabError::NonFinite(_) => "non_finite",
            LabError::NonHermitian { .. } => "non_hermitian",
            LabError::OrthogonalConditions { .. } => "orthogonal_conditions",
            LabError::ZeroReferenceOverlap { .. } => "zero_reference_overlap",
            LabError::InvalidTime(_) => "invalid_time",
            LabError::WrapAround { .. } => "wrap_around",
            LabError::OutsideBand { .. } => "outside_band",
            LabError::IndexOutOfRange { .. } => "index_out_of_range",
            LabError::NoAllowedRegion { .. } => "no_allowed_region",
            LabError::OpenOrbit { .. } => "open_orbit",
            LabError::ForbiddenRegion { .. } => "forbidden_region",
            LabError::NoAdmissibleRegion => "no_admissible_region",
            LabError::TooFewAccepted { .. } => "too_few_accepted",
            LabError::InvalidParameter(_) => "invalid_parameter",
            LabError::EmptyInput => "empty_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
