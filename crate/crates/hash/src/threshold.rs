use serde::{Deserialize, Serialize};

use crate::bithash::{hamming, BitHash64};
use crate::error::HashError;
use crate::features::{normalized_l2, FeatureVector};

/// Identity thresholds: two images are "the same" when their hash
/// distance does not exceed these (inclusive on both sides).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceThreshold {
    /// Maximum Hamming distance for 64-bit hashes.
    pub phash_bits: u32,
    /// Maximum normalized L2 distance for feature vectors.
    pub vishash_distance: f64,
}

impl DistanceThreshold {
    pub fn new(phash_bits: u32, vishash_distance: f64) -> Result<Self, HashError> {
        if phash_bits > 64 {
            return Err(HashError::InvalidDimension(format!(
                "phash threshold {phash_bits} outside [0, 64]"
            )));
        }
        if !(0.0..=1.0).contains(&vishash_distance) {
            return Err(HashError::InvalidDimension(format!(
                "vishash threshold {vishash_distance} outside [0, 1]"
            )));
        }
        Ok(Self { phash_bits, vishash_distance })
    }
}

impl Default for DistanceThreshold {
    fn default() -> Self {
        // 5 bits / 0.3: the identity thresholds the judge defaults to.
        Self { phash_bits: 5, vishash_distance: 0.3 }
    }
}

/// Either hash representation, for code paths that judge with both methods.
#[derive(Debug, Clone, PartialEq)]
pub enum HashValue {
    Bits(BitHash64),
    Features(FeatureVector),
}

impl HashValue {
    pub fn family(&self) -> &'static str {
        match self {
            HashValue::Bits(h) => h.algorithm().as_str(),
            HashValue::Features(_) => "vishash",
        }
    }
}

/// Whether two hashes of the same family fall within the identity
/// threshold: Hamming distance `<= phash_bits` for bit hashes and
/// normalized L2 `<= vishash_distance` for feature vectors.
pub fn is_same(
    query: &HashValue,
    candidate: &HashValue,
    thresholds: &DistanceThreshold,
) -> Result<bool, HashError> {
    match (query, candidate) {
        (HashValue::Bits(a), HashValue::Bits(b)) => {
            Ok(hamming(a, b)? <= thresholds.phash_bits)
        }
        (HashValue::Features(a), HashValue::Features(b)) => {
            Ok(normalized_l2(a, b)? <= thresholds.vishash_distance)
        }
        (a, b) => Err(HashError::AlgorithmMismatch(
            a.family().into(),
            b.family().into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bithash::BitAlgorithm;

    fn bits(v: u64) -> HashValue {
        HashValue::Bits(BitHash64::from_u64(BitAlgorithm::PHash, v))
    }

    #[test]
    fn phash_boundary_is_inclusive_at_5_bits() {
        let t = DistanceThreshold::default();
        let five = bits(0b11111);
        let six = bits(0b111111);
        assert!(is_same(&bits(0), &five, &t).unwrap());
        assert!(!is_same(&bits(0), &six, &t).unwrap());
    }

    #[test]
    fn vishash_boundary_is_inclusive_at_0_3() {
        let t = DistanceThreshold::default();
        // ||a - b|| / (||a|| + ||b||) = (1 - s) / (1 + s) = d  =>  s = (1 - d) / (1 + d)
        let at = |d: f64| {
            let s = (1.0 - d) / (1.0 + d);
            let a = FeatureVector::new(vec![1.0]).unwrap();
            let b = FeatureVector::new(vec![s]).unwrap();
            is_same(&HashValue::Features(a), &HashValue::Features(b), &t).unwrap()
        };
        assert!(at(0.3 - 1e-12));
        assert!(!at(0.3 + 1e-6));
    }

    #[test]
    fn identical_hashes_are_always_same() {
        let t = DistanceThreshold::new(0, 0.0).unwrap();
        assert!(is_same(&bits(42), &bits(42), &t).unwrap());
        let f = HashValue::Features(FeatureVector::new(vec![0.25, -0.5]).unwrap());
        assert!(is_same(&f, &f, &t).unwrap());
    }

    #[test]
    fn cross_family_comparison_rejected() {
        let t = DistanceThreshold::default();
        let f = HashValue::Features(FeatureVector::new(vec![0.0]).unwrap());
        assert!(matches!(
            is_same(&bits(0), &f, &t),
            Err(HashError::AlgorithmMismatch(_, _))
        ));
    }

    #[test]
    fn threshold_bounds_validated() {
        assert!(DistanceThreshold::new(65, 0.3).is_err());
        assert!(DistanceThreshold::new(5, 1.5).is_err());
        assert!(DistanceThreshold::new(64, 1.0).is_ok());
    }
}
