use crate::bithash::{BitAlgorithm, BitHash64};
use crate::dct::dct2d;
use crate::error::HashError;
use crate::features::{FeatureVector, VISHASH_DIMENSION};
use crate::gray::GrayImage;

/// Average hash: resize to 8x8 and set each bit where the pixel is
/// strictly above the mean of all 64 pixels. Ties map to 0, so a constant
/// image hashes to all zeros.
pub fn ahash(img: &GrayImage) -> Result<BitHash64, HashError> {
    let small = img.resize(8, 8)?;
    // Mean as anchor + mean deviation: identical in exact arithmetic, but a
    // constant image yields the anchor itself, so the strict comparison
    // below cannot flip on summation rounding.
    let anchor = small.pixels()[0];
    let mean = anchor + small.pixels().iter().map(|p| p - anchor).sum::<f64>() / 64.0;
    BitHash64::from_bits(
        BitAlgorithm::AHash,
        small.pixels().iter().map(|p| *p > mean).collect::<Vec<_>>(),
    )
}

/// Difference hash: resize to 9 columns x 8 rows and set bit (r, c) where
/// the pixel right of (r, c) is strictly brighter.
pub fn dhash(img: &GrayImage) -> Result<BitHash64, HashError> {
    let small = img.resize(9, 8)?;
    let mut bits = Vec::with_capacity(64);
    for r in 0..8 {
        for c in 0..8 {
            bits.push(small.at(r, c + 1) > small.at(r, c));
        }
    }
    BitHash64::from_bits(BitAlgorithm::DHash, bits)
}

/// DCT hash: resize to 32x32, transform, keep the low-frequency top-left
/// 8x8 block (DC included), and set each bit where the coefficient is
/// strictly above the block median. The median of the 64 coefficients is
/// the mean of the 32nd and 33rd order statistics.
pub fn phash(img: &GrayImage) -> Result<BitHash64, HashError> {
    let small = img.resize(32, 32)?;
    let spectrum = dct2d(small.pixels(), 32)?;

    let mut block = [0.0f64; 64];
    for r in 0..8 {
        for c in 0..8 {
            block[r * 8 + c] = spectrum[r * 32 + c];
        }
    }
    let mut sorted = block;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("DCT output is finite"));
    let median = (sorted[31] + sorted[32]) / 2.0;

    BitHash64::from_bits(
        BitAlgorithm::PHash,
        block.iter().map(|v| *v > median).collect::<Vec<_>>(),
    )
}

/// Shape-oriented difference features: horizontal differences from a
/// 17x16 resize and vertical differences from a 16x17 resize, each 16x16,
/// concatenated row-major and scaled by 1/255 into `[-1, 1]`.
pub fn vishash(img: &GrayImage) -> Result<FeatureVector, HashError> {
    let horiz = img.resize(17, 16)?;
    let vert = img.resize(16, 17)?;

    let mut values = Vec::with_capacity(VISHASH_DIMENSION);
    for r in 0..16 {
        for c in 0..16 {
            values.push((horiz.at(r, c + 1) - horiz.at(r, c)) / 255.0);
        }
    }
    for r in 0..16 {
        for c in 0..16 {
            values.push((vert.at(r + 1, c) - vert.at(r, c)) / 255.0);
        }
    }
    debug_assert_eq!(values.len(), VISHASH_DIMENSION);
    FeatureVector::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::normalized_l2;

    fn constant(w: u32, h: u32, v: f64) -> GrayImage {
        GrayImage::new(w, h, vec![v; w as usize * h as usize]).unwrap()
    }

    #[test]
    fn ahash_of_black_image_is_zero() {
        let h = ahash(&constant(20, 20, 0.0)).unwrap();
        assert_eq!(h.count_ones(), 0);
    }

    #[test]
    fn ahash_of_constant_gray_is_zero() {
        // Strict comparison against the mean leaves ties unset.
        let h = ahash(&constant(8, 8, 128.0)).unwrap();
        assert_eq!(h.count_ones(), 0);
    }

    #[test]
    fn ahash_of_half_black_half_white() {
        let mut pixels = Vec::with_capacity(64);
        for _r in 0..8 {
            for c in 0..8 {
                pixels.push(if c < 4 { 0.0 } else { 255.0 });
            }
        }
        let h = ahash(&GrayImage::new(8, 8, pixels).unwrap()).unwrap();
        assert_eq!(h.as_u64(), 0x0F0F0F0F0F0F0F0F);
        assert_eq!(h.to_hex(), "0f0f0f0f0f0f0f0f");
    }

    #[test]
    fn dhash_of_increasing_gradient_is_all_ones() {
        let pixels: Vec<f64> = (0..64 * 64)
            .map(|i| (i % 64) as f64 * 255.0 / 63.0)
            .collect();
        let h = dhash(&GrayImage::new(64, 64, pixels).unwrap()).unwrap();
        assert_eq!(h.as_u64(), u64::MAX);
    }

    #[test]
    fn dhash_of_constant_is_zero() {
        let h = dhash(&constant(9, 8, 77.0)).unwrap();
        assert_eq!(h.count_ones(), 0);
    }

    #[test]
    fn dhash_of_decreasing_gradient_is_zero() {
        let pixels: Vec<f64> = (0..64 * 64)
            .map(|i| (63 - i % 64) as f64 * 255.0 / 63.0)
            .collect();
        let h = dhash(&GrayImage::new(64, 64, pixels).unwrap()).unwrap();
        assert_eq!(h.count_ones(), 0);
    }

    #[test]
    fn phash_of_black_image_is_zero() {
        let h = phash(&constant(40, 30, 0.0)).unwrap();
        assert_eq!(h.count_ones(), 0);
    }

    #[test]
    fn phash_of_constant_gray_sets_only_dc() {
        let h = phash(&constant(100, 100, 128.0)).unwrap();
        assert_eq!(h.count_ones(), 1);
        assert!(h.bit(0), "the single set bit must be the DC term");
    }

    #[test]
    fn vishash_of_constant_is_zero_vector() {
        let v = vishash(&constant(33, 21, 200.0)).unwrap();
        assert_eq!(v.dimension(), VISHASH_DIMENSION);
        assert!(v.values().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn vishash_of_identical_images_has_distance_zero() {
        let img = GrayImage::new(
            10,
            10,
            (0..100).map(|i| (i * 2) as f64).collect(),
        )
        .unwrap();
        let a = vishash(&img).unwrap();
        let b = vishash(&img).unwrap();
        assert_eq!(a, b);
        assert_eq!(normalized_l2(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn vishash_of_split_image_is_nonzero_only_at_boundary_columns() {
        let mut pixels = Vec::with_capacity(640 * 480);
        for _r in 0..480 {
            for c in 0..640 {
                pixels.push(if c < 320 { 0.0 } else { 255.0 });
            }
        }
        let v = vishash(&GrayImage::new(640, 480, pixels).unwrap()).unwrap();
        let (horiz, vert) = v.values().split_at(256);
        assert!(vert.iter().all(|x| *x == 0.0), "no vertical structure");
        for r in 0..16 {
            for c in 0..16 {
                let val = horiz[r * 16 + c];
                // The black/white edge lands inside resized column 8, so
                // only differences touching it (c = 7 and c = 8) may fire.
                if c == 7 || c == 8 {
                    assert!(val > 0.0, "boundary diff at ({r}, {c})");
                } else {
                    assert_eq!(val, 0.0, "interior diff at ({r}, {c})");
                }
            }
        }
    }

    #[test]
    fn hashing_is_deterministic() {
        let pixels: Vec<f64> = (0..48 * 48).map(|i| (i % 251) as f64).collect();
        let img = GrayImage::new(48, 48, pixels).unwrap();
        assert_eq!(phash(&img).unwrap(), phash(&img).unwrap());
        assert_eq!(ahash(&img).unwrap(), ahash(&img).unwrap());
        assert_eq!(dhash(&img).unwrap(), dhash(&img).unwrap());
        assert_eq!(vishash(&img).unwrap(), vishash(&img).unwrap());
    }
}
