//! Grayscale dot-plots: rendering a [`Bppm`], resizing, and stitching two
//! plots into one pair image.

mod png_io;
mod tsv;

use crate::error::{Error, Result};
use crate::thermo::Bppm;

pub use png_io::{encode_png, read_png, write_png};
pub use tsv::{export_bppm_tsv, import_bppm_tsv, parse_bppm_tsv, write_bppm_tsv};

/// Side length of network-ready images.
pub const DEFAULT_SIDE: usize = 224;

/// 8-bit single-channel raster, row-major, 0-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.pixels[r * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.pixels[r * self.width + c] = v;
    }

    fn square_side(&self) -> Result<usize> {
        if self.width != self.height {
            return Err(Error::NonSquare {
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.width)
    }

    pub fn transpose(&self) -> GrayImage {
        let mut out = GrayImage::filled(self.height, self.width, 0);
        for r in 0..self.height {
            for c in 0..self.width {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}

/// Maps probability to intensity: `round(255 * p)`, so 1 is white.
#[inline]
pub fn intensity(p: f64) -> u8 {
    (255.0 * p.clamp(0.0, 1.0)).round() as u8
}

/// Renders a BPPM as an `n x n` image, pixel `(r, c)` holding `p(r+1, c+1)`.
pub fn bppm_to_dotplot(b: &Bppm) -> GrayImage {
    let n = b.n();
    let pixels = b.as_slice().iter().map(|&p| intensity(p)).collect();
    GrayImage {
        width: n,
        height: n,
        pixels,
    }
}

/// Bilinear resize of a square image with align-corners sampling and
/// round-half-up output.
pub fn resize_bilinear(img: &GrayImage, side: usize) -> Result<GrayImage> {
    let src = img.square_side()?;
    if side == 0 {
        return Err(Error::InvalidImage("target side must be at least 1".into()));
    }
    if side == src {
        return Ok(img.clone());
    }
    if src == 0 {
        return Err(Error::InvalidImage("cannot resize an empty image".into()));
    }

    // per-axis source taps; both axes share them since input and output are square
    let taps: Vec<(usize, usize, f64)> = (0..side)
        .map(|t| {
            let pos = if side == 1 {
                0.0
            } else {
                (t * (src - 1)) as f64 / (side - 1) as f64
            };
            let lo = (pos.floor() as usize).min(src - 1);
            let hi = (lo + 1).min(src - 1);
            (lo, hi, pos - lo as f64)
        })
        .collect();

    let mut out = GrayImage::filled(side, side, 0);
    for (r, &(r0, r1, fy)) in taps.iter().enumerate() {
        for (c, &(c0, c1, fx)) in taps.iter().enumerate() {
            let p00 = img.get(r0, c0) as f64;
            let p01 = img.get(r0, c1) as f64;
            let p10 = img.get(r1, c0) as f64;
            let p11 = img.get(r1, c1) as f64;
            let top = p00 + (p01 - p00) * fx;
            let bottom = p10 + (p11 - p10) * fx;
            let v = top + (bottom - top) * fy;
            out.set(r, c, round_half_up(v));
        }
    }
    Ok(out)
}

// Bilinear blends of integers can land a few ulps below an exact .5 or an
// integer; nudge before flooring so those cases round as in exact arithmetic.
#[inline]
fn round_half_up(v: f64) -> u8 {
    (v + 0.5 + 1e-9).floor().clamp(0.0, 255.0) as u8
}

/// Combines two equal-size square images: the strictly lower triangle
/// (`r > c`) comes from `lower`, the strictly upper from `upper`, and the
/// diagonal is 0.
pub fn stitch(lower: &GrayImage, upper: &GrayImage) -> Result<GrayImage> {
    let a = lower.square_side()?;
    let b = upper.square_side()?;
    if a != b {
        return Err(Error::SizeMismatch(a, b));
    }
    let mut out = GrayImage::filled(a, a, 0);
    for r in 0..a {
        for c in 0..a {
            let v = match r.cmp(&c) {
                std::cmp::Ordering::Greater => lower.get(r, c),
                std::cmp::Ordering::Less => upper.get(r, c),
                std::cmp::Ordering::Equal => 0,
            };
            out.set(r, c, v);
        }
    }
    Ok(out)
}
