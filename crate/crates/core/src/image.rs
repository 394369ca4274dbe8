//! RGB raster observations.

use crate::error::{Error, Result};

pub type Rgb = [f32; 3];

/// A row-major `height × width × 3` raster with channel values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Image {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: vec![0.0; height * width * 3],
        }
    }

    pub fn filled(height: usize, width: usize, color: Rgb) -> Self {
        let mut img = Self::new(height, width);
        img.fill_rect(0, 0, height, width, color);
        img
    }

    /// Builds an image from raw row-major channel data. Values must lie in `[0, 1]`.
    pub fn from_vec(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != height * width * 3 {
            return Err(Error::DimensionMismatch {
                expected: height * width * 3,
                got: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "pixel value {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f32 {
        self.data[(row * self.width + col) * 3 + channel]
    }

    #[inline]
    pub fn set_pixel(&mut self, row: usize, col: usize, color: Rgb) {
        let i = (row * self.width + col) * 3;
        self.data[i..i + 3].copy_from_slice(&color);
    }

    /// Fills rows `r0..r1` and columns `c0..c1`, clipped to the image.
    pub fn fill_rect(&mut self, r0: usize, c0: usize, r1: usize, c1: usize, color: Rgb) {
        for r in r0..r1.min(self.height) {
            for c in c0..c1.min(self.width) {
                self.set_pixel(r, c, color);
            }
        }
    }

    /// Average-pools `factor × factor` blocks and returns the flattened
    /// `(h/factor) × (w/factor) × 3` vector.
    pub fn downsample(&self, factor: usize) -> Result<Vec<f32>> {
        if factor == 0 || !self.height.is_multiple_of(factor) || !self.width.is_multiple_of(factor) {
            return Err(Error::InvalidArgument(format!(
                "cannot pool a {}x{} image by {factor}",
                self.height, self.width
            )));
        }
        let (oh, ow) = (self.height / factor, self.width / factor);
        let mut out = vec![0.0f32; oh * ow * 3];
        let norm = 1.0 / (factor * factor) as f32;
        for r in 0..self.height {
            let orow = r / factor;
            for c in 0..self.width {
                let o = (orow * ow + c / factor) * 3;
                let i = (r * self.width + c) * 3;
                out[o] += self.data[i];
                out[o + 1] += self.data[i + 1];
                out[o + 2] += self.data[i + 2];
            }
        }
        out.iter_mut().for_each(|v| *v *= norm);
        Ok(out)
    }
}
