//! Core panorama, mask, layout and sample types plus the resampling and
//! column arithmetic everything else builds on.

pub mod equirect;
pub(crate) mod resample;
mod validate;

pub use resample::{sample_bilinear, sample_bilinear_where, sample_nearest};
pub use validate::{validate_sample, Violation, ViolationKind, CEILING_CONSISTENCY_TOL};
pub(crate) use validate::median as median_of;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Rgb = [f64; 3];

/// Equirectangular RGB image, channels stored row-major as `f64` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panorama {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Panorama {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width * 3 {
            return Err(Error::DimensionMismatch(format!(
                "panorama buffer has {} values, expected {}x{}x3",
                data.len(),
                height,
                width
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, color: Rgb) -> Self {
        let mut data = Vec::with_capacity(height * width * 3);
        for _ in 0..height * width {
            data.extend_from_slice(&color);
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Self {
        let mut data = Vec::with_capacity(height * width * 3);
        for r in 0..height {
            for c in 0..width {
                data.extend_from_slice(&f(c, r));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> Rgb {
        let i = (row * self.width + col) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, color: Rgb) {
        let i = (row * self.width + col) * 3;
        self.data[i..i + 3].copy_from_slice(&color);
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Mean absolute per-channel difference against another image of the
    /// same size.
    pub fn mean_abs_diff(&self, other: &Panorama) -> f64 {
        assert_eq!((self.height, self.width), (other.height, other.width));
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum();
        sum / self.data.len() as f64
    }
}

/// Per-pixel class indices into `classes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticMask {
    height: usize,
    width: usize,
    labels: Vec<u8>,
    classes: Vec<String>,
}

impl SemanticMask {
    pub fn new(height: usize, width: usize, labels: Vec<u8>, classes: Vec<String>) -> Result<Self> {
        if labels.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "mask buffer has {} labels, expected {}x{}",
                labels.len(),
                height,
                width
            )));
        }
        Ok(Self {
            height,
            width,
            labels,
            classes,
        })
    }

    pub fn filled(height: usize, width: usize, label: u8, classes: Vec<String>) -> Self {
        Self {
            height,
            width,
            labels: vec![label; height * width],
            classes,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, name: &str) -> Option<u8> {
        self.classes.iter().position(|c| c == name).map(|i| i as u8)
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.labels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, label: u8) {
        self.labels[row * self.width + col] = label;
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [u8] {
        &mut self.labels
    }

    /// Sorted set of labels that occur at least once.
    pub fn present_labels(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (0..=255u8).filter(|&l| seen[l as usize]).collect()
    }
}

/// One wall-wall junction: its column and the rows where it meets the
/// ceiling and the floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub column: f64,
    pub ceil_row: f64,
    pub floor_row: f64,
}

impl Corner {
    pub fn new(column: f64, ceil_row: f64, floor_row: f64) -> Self {
        Self {
            column,
            ceil_row,
            floor_row,
        }
    }
}

/// Room layout as corners ordered by ascending column. Wall `i` runs from
/// corner `i` to corner `(i + 1) % T`; the last wall crosses the seam.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    corners: Vec<Corner>,
}

impl Layout {
    /// Builds a layout, sorting corners by column. Invariants are checked by
    /// [`validate_sample`] and by the geometry routines that need them.
    pub fn new(mut corners: Vec<Corner>) -> Self {
        corners.sort_by(|a, b| a.column.total_cmp(&b.column));
        Self { corners }
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn wall_count(&self) -> usize {
        self.corners.len()
    }

    /// Shifts every corner `k` columns to the right, wrapping into `[0, W)`.
    pub fn rolled(&self, k: i64, width: usize) -> Layout {
        let shift = k.rem_euclid(width as i64) as f64;
        Layout::new(
            self.corners
                .iter()
                .map(|c| Corner {
                    column: equirect::wrap_col(c.column + shift, width),
                    ..*c
                })
                .collect(),
        )
    }

    /// Mirrors the layout left-right.
    pub fn flipped(&self, width: usize) -> Layout {
        Layout::new(
            self.corners
                .iter()
                .map(|c| Corner {
                    column: equirect::wrap_col(width as f64 - 1.0 - c.column, width),
                    ..*c
                })
                .collect(),
        )
    }
}

/// A training sample: image, semantic mask and layout sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub image: Panorama,
    pub mask: SemanticMask,
    pub layout: Layout,
}

impl Sample {
    pub fn new(image: Panorama, mask: SemanticMask, layout: Layout) -> Result<Self> {
        if image.height() != mask.height() || image.width() != mask.width() {
            return Err(Error::DimensionMismatch(format!(
                "image is {}x{} but mask is {}x{}",
                image.height(),
                image.width(),
                mask.height(),
                mask.width()
            )));
        }
        Ok(Self {
            image,
            mask,
            layout,
        })
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }
}

/// Rotates a sample horizontally: output column `c` holds input column
/// `(c − k) mod W`.
pub fn roll_columns(sample: &Sample, k: i64) -> Sample {
    let (h, w) = (sample.height(), sample.width());
    let shift = k.rem_euclid(w as i64) as usize;
    if shift == 0 {
        return sample.clone();
    }
    let mut image = sample.image.clone();
    let mut mask = sample.mask.clone();
    for r in 0..h {
        image.data[r * w * 3..(r + 1) * w * 3].rotate_right(shift * 3);
        mask.labels[r * w..(r + 1) * w].rotate_right(shift);
    }
    Sample {
        image,
        mask,
        layout: sample.layout.rolled(shift as i64, w),
    }
}

/// Mirrors a sample left-right.
pub fn flip_columns(sample: &Sample) -> Sample {
    let (h, w) = (sample.height(), sample.width());
    let mut image = sample.image.clone();
    let mut mask = sample.mask.clone();
    for r in 0..h {
        for c in 0..w {
            image.set(c, r, sample.image.get(w - 1 - c, r));
            mask.set(c, r, sample.mask.get(w - 1 - c, r));
        }
    }
    Sample {
        image,
        mask,
        layout: sample.layout.flipped(w),
    }
}
