use crate::error::HashError;

/// Rec. 601 luma weights; they sum to 1 so white maps to exactly 255.
const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// A decoded grayscale raster: row-major luminance values in `[0, 255]`.
///
/// This is the single input type every hash algorithm accepts. Pixels are
/// stored as `f64` because resizing and the DCT work on real values; the
/// invariants (`len == width * height`, every value finite and in range)
/// are enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<f64>,
}

impl GrayImage {
    /// Builds a grayscale image from raw luminance values.
    pub fn new(width: u32, height: u32, pixels: Vec<f64>) -> Result<Self, HashError> {
        if width == 0 || height == 0 {
            return Err(HashError::InvalidImage(format!(
                "zero dimension: {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(HashError::InvalidImage(format!(
                "pixel buffer has {} values, expected {expected}",
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 255.0) {
            return Err(HashError::InvalidImage(format!(
                "pixel value {bad} outside [0, 255]"
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Converts packed 8-bit RGB samples (3 bytes per pixel) to grayscale.
    pub fn from_rgb8(width: u32, height: u32, samples: &[u8]) -> Result<Self, HashError> {
        let expected = width as usize * height as usize * 3;
        if samples.len() != expected {
            return Err(HashError::InvalidImage(format!(
                "RGB buffer has {} bytes, expected {expected}",
                samples.len()
            )));
        }
        let pixels = samples
            .chunks_exact(3)
            .map(|px| luma(px[0] as f64, px[1] as f64, px[2] as f64))
            .collect();
        Self::new(width, height, pixels)
    }

    /// Converts packed 8-bit RGBA samples to grayscale, compositing the
    /// alpha channel over a white background first.
    pub fn from_rgba8(width: u32, height: u32, samples: &[u8]) -> Result<Self, HashError> {
        let expected = width as usize * height as usize * 4;
        if samples.len() != expected {
            return Err(HashError::InvalidImage(format!(
                "RGBA buffer has {} bytes, expected {expected}",
                samples.len()
            )));
        }
        let pixels = samples
            .chunks_exact(4)
            .map(|px| {
                let a = px[3] as f64 / 255.0;
                let over = |c: u8| a * c as f64 + (1.0 - a) * 255.0;
                luma(over(px[0]), over(px[1]), over(px[2]))
            })
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major luminance values.
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Value at (row, col). Panics when out of bounds, like slice indexing.
    pub fn at(&self, row: u32, col: u32) -> f64 {
        assert!(row < self.height && col < self.width);
        self.pixels[row as usize * self.width as usize + col as usize]
    }

    /// Downsamples (or upsamples) with box-filter area averaging: each
    /// output pixel is the mean of its source region, with fractional
    /// coverage at region edges. Resizing an image to its own size is the
    /// identity, and constant images stay exactly constant.
    pub fn resize(&self, width: u32, height: u32) -> Result<Self, HashError> {
        if width == 0 || height == 0 {
            return Err(HashError::InvalidDimension(format!(
                "resize target {width}x{height}"
            )));
        }
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }

        let col_spans = coverage_spans(self.width, width);
        let row_spans = coverage_spans(self.height, height);

        let src_w = self.width as usize;
        let mut out = Vec::with_capacity(width as usize * height as usize);
        for (row_start, row_weights) in &row_spans {
            for (col_start, col_weights) in &col_spans {
                // Accumulate deviations from the region's first pixel rather
                // than raw values: the mean is unchanged algebraically, but a
                // constant region comes out exactly constant instead of
                // drifting by an ulp, which the hash invariants rely on.
                let anchor = self.pixels[row_start * src_w + col_start];
                let mut acc = 0.0;
                let mut total = 0.0;
                for (dy, wy) in row_weights.iter().enumerate() {
                    let base = (row_start + dy) * src_w;
                    for (dx, wx) in col_weights.iter().enumerate() {
                        let w = wy * wx;
                        acc += w * (self.pixels[base + col_start + dx] - anchor);
                        total += w;
                    }
                }
                out.push((anchor + acc / total).clamp(0.0, 255.0));
            }
        }
        Self::new(width, height, out)
    }
}

fn luma(r: f64, g: f64, b: f64) -> f64 {
    // Weighted sums of in-range channels can exceed 255 by one ulp.
    (LUMA_R * r + LUMA_G * g + LUMA_B * b).clamp(0.0, 255.0)
}

/// For each output coordinate, the first covered source index and the
/// fractional weight of each covered source pixel.
fn coverage_spans(src: u32, dst: u32) -> Vec<(usize, Vec<f64>)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let lo = (o as f64 * scale).min(src as f64);
            let hi = ((o + 1) as f64 * scale).min(src as f64);
            let first = (lo.floor() as usize).min(src as usize - 1);
            let last = ((hi.ceil() as usize).max(first + 1) - 1).min(src as usize - 1);
            let weights = (first..=last)
                .map(|j| {
                    let cover = hi.min((j + 1) as f64) - lo.max(j as f64);
                    cover.max(0.0)
                })
                .collect();
            (first, weights)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_pixel_is_255() {
        let img = GrayImage::from_rgb8(1, 1, &[255, 255, 255]).unwrap();
        assert_eq!(img.pixels()[0], 255.0);
    }

    #[test]
    fn black_pixel_is_0() {
        let img = GrayImage::from_rgb8(1, 1, &[0, 0, 0]).unwrap();
        assert_eq!(img.pixels()[0], 0.0);
    }

    #[test]
    fn red_pixel_is_luma_weighted() {
        let img = GrayImage::from_rgb8(1, 1, &[255, 0, 0]).unwrap();
        assert_eq!(img.pixels()[0], 0.299 * 255.0);
        assert!((img.pixels()[0] - 76.245).abs() < 1e-9);
    }

    #[test]
    fn transparent_pixel_composites_to_white() {
        let img = GrayImage::from_rgba8(1, 1, &[0, 0, 0, 0]).unwrap();
        assert_eq!(img.pixels()[0], 255.0);
        let half = GrayImage::from_rgba8(1, 1, &[0, 0, 0, 255]).unwrap();
        assert_eq!(half.pixels()[0], 0.0);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            GrayImage::new(0, 4, vec![]),
            Err(HashError::InvalidImage(_))
        ));
        assert!(matches!(
            GrayImage::from_rgb8(3, 0, &[]),
            Err(HashError::InvalidImage(_))
        ));
    }

    #[test]
    fn out_of_range_pixel_rejected() {
        assert!(GrayImage::new(1, 1, vec![255.1]).is_err());
        assert!(GrayImage::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn resize_2x2_to_1x1_is_mean() {
        let img = GrayImage::new(2, 2, vec![0.0, 0.0, 255.0, 255.0]).unwrap();
        let small = img.resize(1, 1).unwrap();
        assert_eq!(small.pixels(), &[127.5]);
    }

    #[test]
    fn resize_to_same_size_is_identity() {
        let img = GrayImage::new(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let same = img.resize(3, 2).unwrap();
        assert_eq!(same.pixels(), img.pixels());
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = GrayImage::new(4, 4, vec![100.0; 16]).unwrap();
        let small = img.resize(2, 2).unwrap();
        assert_eq!(small.pixels(), &[100.0; 4]);
        // Non-integer ratio too.
        let odd = img.resize(3, 3).unwrap();
        assert_eq!(odd.pixels(), &[100.0; 9]);
    }

    #[test]
    fn resize_zero_target_rejected() {
        let img = GrayImage::new(2, 2, vec![0.0; 4]).unwrap();
        assert!(matches!(
            img.resize(0, 5),
            Err(HashError::InvalidDimension(_))
        ));
    }

    #[test]
    fn upscale_keeps_values_in_range() {
        let img = GrayImage::new(2, 1, vec![0.0, 255.0]).unwrap();
        let big = img.resize(5, 3).unwrap();
        assert!(big.pixels().iter().all(|v| (0.0..=255.0).contains(v)));
        assert_eq!(big.at(0, 0), 0.0);
        assert_eq!(big.at(2, 4), 255.0);
    }
}
