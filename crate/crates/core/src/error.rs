use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameters: {}", .violations.join("; "))]
    InvalidParameter { violations: Vec<String> },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("singular system: rank {rank} of {size}")]
    Singular { rank: usize, size: usize },

    #[error("inconsistent system: rank(A) = {rank}, rank([A|b]) = {augmented_rank}")]
    Inconsistent { rank: usize, augmented_rank: usize },

    /// A printed denominator vanished at an in-range index while its numerator did not.
    #[error("degenerate parameters: {form} vanishes at nu = {at:?}")]
    DegenerateParameter { form: String, at: Vec<String> },

    #[error("operator does not preserve the space: {0}")]
    NotInvariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}
