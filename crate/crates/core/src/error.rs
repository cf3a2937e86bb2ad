use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Variants split into two families: input validation problems (bad
/// indices, wrong shapes, malformed files) and numerical failures (singular
/// systems, non-convergence). [`Error::is_numerical`] tells them apart; the
/// command-line front end maps them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigendecomposition did not converge")]
    ConvergenceFailure,

    #[error("matrix is singular or ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid generator pair (k = {k}, j = {j}); requires k < j")]
    InvalidPair { k: usize, j: usize },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("state is not normalized (trace = {trace})")]
    NotNormalized { trace: f64 },

    #[error("state is not physical (min eigenvalue = {min_eigenvalue:e})")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("measurement set has {found} operators, expected {expected}")]
    WrongCount { found: usize, expected: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("degenerate measurement set: {0}")]
    DegenerateSet(String),

    #[error("overlap {0} outside (0, 1]")]
    ZeroOverlap(f64),

    #[error("measurement set is incomplete (condition number {condition:e})")]
    IncompleteSet { condition: f64 },

    #[error("estimated count scale is non-positive ({0})")]
    NegativeScale(f64),

    #[error("maximum-likelihood iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure
                | Error::Singular { .. }
                | Error::IncompleteSet { .. }
                | Error::NegativeScale(_)
                | Error::NonConvergence { .. }
                | Error::DegenerateSet(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::ConvergenceFailure => "convergence_failure",
            Error::Singular { .. } => "singular",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::IndexOutOfRange(_) => "index_out_of_range",
            Error::InvalidPair { .. } => "invalid_pair",
            Error::DimensionTooLarge { .. } => "dimension_too_large",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NotPhysical { .. } => "not_physical",
            Error::UnknownName(_) => "unknown_name",
            Error::WrongCount { .. } => "wrong_count",
            Error::BasisMismatch(_) => "basis_mismatch",
            Error::DegenerateSet(_) => "degenerate_set",
            Error::ZeroOverlap(_) => "zero_overlap",
            Error::IncompleteSet { .. } => "incomplete_set",
            Error::NegativeScale(_) => "negative_scale",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Invalid { .. } => "invalid",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
