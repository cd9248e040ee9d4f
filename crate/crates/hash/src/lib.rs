//! Perceptual hashing primitives for image identity checks.
//!
//! Four hash algorithms are provided: [`ahash`], [`dhash`], and [`phash`]
//! produce 64-bit hashes compared by Hamming distance, while [`vishash`]
//! produces a real-valued difference-feature vector compared by a
//! normalized L2 distance. All of them start from a [`GrayImage`], a
//! decoded grayscale raster, so this crate performs no file I/O and no
//! image decoding.
//!
//! Everything here is pure and deterministic: hashing the same pixels
//! twice yields bit-identical results, and all values are immutable once
//! constructed.

mod algos;
mod bithash;
mod dct;
mod error;
mod features;
mod gray;
mod threshold;

pub use algos::{ahash, dhash, phash, vishash};
pub use bithash::{hamming, BitAlgorithm, BitHash64};
pub use dct::dct2d;
pub use error::HashError;
pub use features::{normalized_l2, FeatureVector, VISHASH_DIMENSION};
pub use gray::GrayImage;
pub use threshold::{is_same, DistanceThreshold, HashValue};
