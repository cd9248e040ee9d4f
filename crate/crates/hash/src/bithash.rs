use serde::{Deserialize, Serialize};

use crate::error::HashError;

/// Which 64-bit hash recipe produced a [`BitHash64`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitAlgorithm {
    AHash,
    DHash,
    PHash,
}

impl BitAlgorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            BitAlgorithm::AHash => "ahash",
            BitAlgorithm::DHash => "dhash",
            BitAlgorithm::PHash => "phash",
        }
    }
}

/// A 64-bit perceptual hash.
///
/// Bit order is canonical: bit 0 is the top-left cell of the 8x8 decision
/// grid, proceeding row-major, and bytes serialize MSB-first, so bit 0 is
/// the most significant bit of the first hex byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitHash64 {
    bits: u64,
    algorithm: BitAlgorithm,
}

impl BitHash64 {
    /// Collects 64 decision bits in canonical order (index 0 first).
    pub fn from_bits<I>(algorithm: BitAlgorithm, bits: I) -> Result<Self, HashError>
    where
        I: IntoIterator<Item = bool>,
    {
        let mut value = 0u64;
        let mut count = 0usize;
        for (i, bit) in bits.into_iter().enumerate() {
            if i >= 64 {
                return Err(HashError::InvalidImage("more than 64 hash bits".into()));
            }
            if bit {
                value |= 1u64 << (63 - i);
            }
            count += 1;
        }
        if count != 64 {
            return Err(HashError::InvalidImage(format!(
                "hash has {count} bits, expected 64"
            )));
        }
        Ok(Self { bits: value, algorithm })
    }

    pub fn from_u64(algorithm: BitAlgorithm, bits: u64) -> Self {
        Self { bits, algorithm }
    }

    pub fn algorithm(&self) -> BitAlgorithm {
        self.algorithm
    }

    pub fn as_u64(&self) -> u64 {
        self.bits
    }

    /// Whether bit `index` (0 = top-left) is set.
    pub fn bit(&self, index: usize) -> bool {
        assert!(index < 64);
        self.bits & (1u64 << (63 - index)) != 0
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Canonical serialization: 16 lowercase hex characters.
    pub fn to_hex(&self) -> String {
        format!("{:016x}", self.bits)
    }

    pub fn from_hex(algorithm: BitAlgorithm, hex: &str) -> Result<Self, HashError> {
        if hex.len() != 16 {
            return Err(HashError::InvalidImage(format!(
                "hash hex must be 16 chars, got {}",
                hex.len()
            )));
        }
        let bits = u64::from_str_radix(hex, 16)
            .map_err(|e| HashError::InvalidImage(format!("bad hash hex: {e}")))?;
        Ok(Self { bits, algorithm })
    }
}

/// Count of differing bit positions between two hashes of the same
/// algorithm, in `[0, 64]`.
pub fn hamming(a: &BitHash64, b: &BitHash64) -> Result<u32, HashError> {
    if a.algorithm != b.algorithm {
        return Err(HashError::AlgorithmMismatch(
            a.algorithm.as_str().into(),
            b.algorithm.as_str().into(),
        ));
    }
    Ok((a.bits ^ b.bits).count_ones())
}
