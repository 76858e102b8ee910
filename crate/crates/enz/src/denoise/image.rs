//! Grayscale image container, binary PGM (P5) I/O and noise injection.
//!
//! Pixels live in `[0, 1]`; file I/O maps linearly to 8-bit with maxval 255.

use crate::error::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::{BufRead, Read, Write};
use std::path::Path;

/// Row-major grayscale image with pixels clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl Image {
    /// Builds an image, clamping every pixel into `[0, 1]`.
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::ImageFormat("image dimensions must be positive".into()));
        }
        if pixels.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} image needs {} pixels, got {}",
                height,
                width,
                height * width,
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::ImageFormat("non-finite pixel value".into()));
        }
        let pixels = pixels.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Reads a binary PGM (`P5`, maxval 255) and maps values to `[0, 1]`.
    pub fn from_pgm_reader<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut header_fields = Vec::with_capacity(4);
        let mut token = Vec::new();
        let mut in_comment = false;
        // Tokenize the header byte-wise so comments and arbitrary whitespace
        // are handled; exactly one whitespace byte follows the maxval.
        while header_fields.len() < 4 {
            let mut byte = [0u8; 1];
            let mut take = reader.take(1);
            let n = take.read(&mut byte)?;
            reader = take.into_inner();
            if n == 0 {
                return Err(Error::ImageFormat("truncated PGM header".into()));
            }
            let b = byte[0];
            if in_comment {
                if b == b'\n' {
                    in_comment = false;
                }
                continue;
            }
            if b == b'#' {
                in_comment = true;
                continue;
            }
            if b.is_ascii_whitespace() {
                if !token.is_empty() {
                    header_fields.push(String::from_utf8_lossy(&token).into_owned());
                    token.clear();
                }
                continue;
            }
            token.push(b);
        }
        if header_fields[0] != "P5" {
            return Err(Error::ImageFormat(format!(
                "expected binary PGM magic 'P5', got '{}'",
                header_fields[0]
            )));
        }
        let width: usize = header_fields[1]
            .parse()
            .map_err(|_| Error::ImageFormat("bad PGM width".into()))?;
        let height: usize = header_fields[2]
            .parse()
            .map_err(|_| Error::ImageFormat("bad PGM height".into()))?;
        let maxval: usize = header_fields[3]
            .parse()
            .map_err(|_| Error::ImageFormat("bad PGM maxval".into()))?;
        if maxval != 255 {
            return Err(Error::ImageFormat(format!(
                "only 8-bit PGM (maxval 255) is supported, got {maxval}"
            )));
        }
        let mut raw = vec![0u8; width * height];
        reader.read_exact(&mut raw).map_err(|_| {
            Error::ImageFormat(format!(
                "PGM raster truncated: expected {} bytes",
                width * height
            ))
        })?;
        let pixels = raw.iter().map(|&b| b as f64 / 255.0).collect();
        Image::new(height, width, pixels)
    }

    pub fn from_pgm_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_pgm_reader(std::io::BufReader::new(file))
    }

    /// Writes a binary PGM with maxval 255 (`round(p * 255)` per pixel).
    pub fn to_pgm_writer<W: Write>(&self, mut writer: W) -> Result<()> {
        write!(writer, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self
            .pixels
            .iter()
            .map(|&p| (p * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        writer.write_all(&bytes)?;
        Ok(())
    }

    pub fn to_pgm_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.to_pgm_writer(std::io::BufWriter::new(file))
    }
}

/// Deterministic 128x128-style piecewise-constant test scene: rectangles and
/// a disc over a flat background, scaled to any requested size.
pub fn synthetic_scene(height: usize, width: usize) -> Image {
    let mut pixels = vec![0.2; height * width];
    let h = height as f64;
    let w = width as f64;
    let paint_rect = |r0: f64, r1: f64, c0: f64, c1: f64, level: f64, px: &mut Vec<f64>| {
        let (r0, r1) = ((r0 * h) as usize, (r1 * h) as usize);
        let (c0, c1) = ((c0 * w) as usize, (c1 * w) as usize);
        for r in r0..r1.min(height) {
            for c in c0..c1.min(width) {
                px[r * width + c] = level;
            }
        }
    };
    paint_rect(0.125, 0.5625, 0.09375, 0.46875, 0.75, &mut pixels);
    paint_rect(0.3125, 0.859375, 0.546875, 0.921875, 0.5, &mut pixels);
    paint_rect(0.0625, 0.1875, 0.6875, 0.96875, 0.05, &mut pixels);
    let (cy, cx, rad) = (0.71875 * h, 0.28125 * w, 0.140625 * h.min(w));
    for r in 0..height {
        for c in 0..width {
            let dy = r as f64 - cy;
            let dx = c as f64 - cx;
            if dy * dy + dx * dx <= rad * rad {
                pixels[r * width + c] = 0.95;
            }
        }
    }
    Image::new(height, width, pixels).expect("valid synthetic scene")
}

/// Adds i.i.d. `N(0, sigma^2)` noise and clamps back into `[0, 1]`.
pub fn awgn(img: &Image, sigma: f64, seed: u64) -> Image {
    if sigma == 0.0 {
        return img.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| p + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Image::new(img.height(), img.width(), pixels).expect("dimensions preserved")
}
