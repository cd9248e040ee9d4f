//! Seeded synthetic images.
//!
//! Content is defined in normalized coordinates and sampled at whatever
//! resolution the caller asks for, so a 640px rendition and a 320px
//! rendition of the same seed depict the same picture. The composition is
//! deliberately low-frequency (smooth color fields plus a few large
//! shapes) so DCT-based hashes survive rescaling.

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Cursor;

struct Shape {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    rect: bool,
    color: [f64; 3],
}

struct Scene {
    base: [f64; 3],
    tint: [f64; 3],
    fx: f64,
    fy: f64,
    phase: f64,
    shapes: Vec<Shape>,
}

impl Scene {
    fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut channel = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let base = [channel(40.0, 210.0), channel(40.0, 210.0), channel(40.0, 210.0)];
        let tint = [channel(20.0, 70.0), channel(20.0, 70.0), channel(20.0, 70.0)];
        let fx = rng.random_range(0.5..2.5);
        let fy = rng.random_range(0.5..2.5);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let count = rng.random_range(2..=4);
        let shapes = (0..count)
            .map(|_| Shape {
                cx: rng.random_range(0.15..0.85),
                cy: rng.random_range(0.15..0.85),
                rx: rng.random_range(0.10..0.30),
                ry: rng.random_range(0.10..0.30),
                rect: rng.random_bool(0.5),
                color: [
                    rng.random_range(10.0..245.0),
                    rng.random_range(10.0..245.0),
                    rng.random_range(10.0..245.0),
                ],
            })
            .collect();
        Scene { base, tint, fx, fy, phase, shapes }
    }

    fn sample(&self, x: f64, y: f64) -> [u8; 3] {
        let wave = (std::f64::consts::TAU * (self.fx * x + self.fy * y) + self.phase).sin();
        let mut px = [0.0; 3];
        for c in 0..3 {
            px[c] = self.base[c] + self.tint[c] * wave;
        }
        for shape in &self.shapes {
            let dx = (x - shape.cx) / shape.rx;
            let dy = (y - shape.cy) / shape.ry;
            let inside = if shape.rect {
                dx.abs() <= 1.0 && dy.abs() <= 1.0
            } else {
                dx * dx + dy * dy <= 1.0
            };
            if inside {
                px = shape.color;
            }
        }
        [
            px[0].clamp(0.0, 255.0) as u8,
            px[1].clamp(0.0, 255.0) as u8,
            px[2].clamp(0.0, 255.0) as u8,
        ]
    }
}

/// Renders the scene identified by `seed` at the requested resolution.
pub fn synth_rgb(seed: u64, width: u32, height: u32) -> RgbImage {
    let scene = Scene::from_seed(seed);
    RgbImage::from_fn(width, height, |col, row| {
        let x = (col as f64 + 0.5) / width as f64;
        let y = (row as f64 + 0.5) / height as f64;
        Rgb(scene.sample(x, y))
    })
}

pub fn png_bytes(img: &RgbImage) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    image::DynamicImage::ImageRgb8(img.clone())
        .write_to(&mut out, image::ImageFormat::Png)
        .expect("in-memory PNG encoding");
    out.into_inner()
}

pub fn jpeg_bytes(img: &RgbImage) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    image::DynamicImage::ImageRgb8(img.clone())
        .write_to(&mut out, image::ImageFormat::Jpeg)
        .expect("in-memory JPEG encoding");
    out.into_inner()
}
