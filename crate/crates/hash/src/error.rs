use thiserror::Error;

/// Errors produced by hash construction and distance computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashError {
    /// The input raster is unusable (zero dimension or a pixel buffer that
    /// does not match the declared dimensions / value range).
    #[error("invalid image: {0}")]
    InvalidImage(String),

    /// A requested dimension is invalid (zero-sized resize target, or a
    /// non-square matrix handed to the 2-D DCT).
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Two hashes with different algorithm tags were compared.
    #[error("algorithm mismatch: {0} vs {1}")]
    AlgorithmMismatch(String, String),

    /// Two feature vectors of different dimension were compared.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}
