use thiserror::Error;

/// Every failure a library operation can report.
///
/// Variant names are part of the CLI contract: domain errors are emitted
/// with the variant name as the machine-readable `error` field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported order: {0}")]
    BadOrder(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("t = {t} outside the window pi/2 <= 2 pi t / p <= pi for p = {p}")]
    BadT { t: i64, p: u64 },

    #[error("{0} must be a prime congruent to 1 mod 4")]
    BadPrime(u64),

    #[error("family has no vectors")]
    EmptyFamily,

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("states {0} and {1} are orthogonal in no party")]
    NotOrthogonalSet(usize, usize),

    #[error("cardinality bound inconclusive: sum of non-spanning sizes {sum} >= {k} states")]
    Inconclusive { sum: usize, k: usize },

    #[error("no unextendibility verdict for this product set")]
    NotUpb,

    #[error("decomposition does not reconstruct the state (residual {residual:e})")]
    BadDecomposition { residual: f64 },

    #[error("decomposition size {size} is below the rank {rank}")]
    BadSize { size: usize, rank: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Stable identifier used in machine-readable error objects.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonHermitian { .. } => "NonHermitian",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::BadOrder(_) => "BadOrder",
            Error::TooLarge(_) => "TooLarge",
            Error::NotPrime(_) => "NotPrime",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::DegenerateParameter(_) => "DegenerateParameter",
            Error::BadT { .. } => "BadT",
            Error::BadPrime(_) => "BadPrime",
            Error::EmptyFamily => "EmptyFamily",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::NotOrthogonalSet(..) => "NotOrthogonalSet",
            Error::Inconclusive { .. } => "Inconclusive",
            Error::NotUpb => "NotUpb",
            Error::BadDecomposition { .. } => "BadDecomposition",
            Error::BadSize { .. } => "BadSize",
            Error::Invalid(_) => "Invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
