//! Shared domain types.
//!
//! Coordinates are `(row, col)` = `(y, x)`, grids are row-major and boxes are
//! half-open: pixel `(i, j)` lies inside `[y0, x0, y1, x1]` iff
//! `y0 <= i < y1 && x0 <= j < x1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointing::Peak;

/// A normalized `H x W` activation map with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl ActivationMap {
    /// Builds a map from row-major values, validating every invariant.
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyMap);
        }
        if values.len() != height * width {
            return Err(Error::ValueCountMismatch {
                height,
                width,
                expected: height * width,
                actual: values.len(),
            });
        }
        let map = ActivationMap {
            height,
            width,
            values,
        };
        validate_map(&map)?;
        Ok(map)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(height * width);
        for row in rows {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::ValueCountMismatch {
                    height,
                    width,
                    expected: height * width,
                    actual: values.len() + row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(height, width, values)
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Self::new(height, width, vec![0.0; height * width])
    }

    /// Skips validation; callers guarantee values are finite and in `[0, 1]`.
    pub(crate) fn from_trusted(height: usize, width: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), height * width);
        ActivationMap {
            height,
            width,
            values,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.width..(row + 1) * self.width]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Checks the [`ActivationMap`] invariants: non-empty, finite, within `[0, 1]`.
pub fn validate_map(map: &ActivationMap) -> Result<()> {
    if map.height == 0 || map.width == 0 {
        return Err(Error::EmptyMap);
    }
    for (k, &v) in map.values.iter().enumerate() {
        let (row, col) = (k / map.width, k % map.width);
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { row, col });
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRangeValue {
                row,
                col,
                value: v,
            });
        }
    }
    Ok(())
}

/// Half-open pixel box `[y0, y1) x [x0, x1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct BoundingBox {
    pub y0: usize,
    pub x0: usize,
    pub y1: usize,
    pub x1: usize,
}

impl BoundingBox {
    pub const fn new(y0: usize, x0: usize, y1: usize, x1: usize) -> Self {
        BoundingBox { y0, x0, y1, x1 }
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.y0 <= row && row < self.y1 && self.x0 <= col && col < self.x1
    }

    pub fn area(&self) -> usize {
        self.y1.saturating_sub(self.y0) * self.x1.saturating_sub(self.x0)
    }

    pub fn validate(&self, height: usize, width: usize) -> Result<()> {
        let BoundingBox { y0, x0, y1, x1 } = *self;
        if y0 >= y1 || x0 >= x1 {
            return Err(Error::DegenerateBox { y0, x0, y1, x1 });
        }
        if y1 > height || x1 > width {
            return Err(Error::BoxOutOfBounds {
                y0,
                x0,
                y1,
                x1,
                height,
                width,
            });
        }
        Ok(())
    }
}

impl From<[usize; 4]> for BoundingBox {
    fn from([y0, x0, y1, x1]: [usize; 4]) -> Self {
        BoundingBox { y0, x0, y1, x1 }
    }
}

impl From<BoundingBox> for [usize; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.y0, b.x0, b.y1, b.x1]
    }
}

/// One or more boxes and their union mask on an `H x W` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    height: usize,
    width: usize,
    boxes: Vec<BoundingBox>,
    mask: Vec<u8>,
    inside_count: usize,
}

impl GroundTruth {
    pub fn new(boxes: Vec<BoundingBox>, height: usize, width: usize) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::EmptyBoxList);
        }
        for b in &boxes {
            b.validate(height, width)?;
        }
        let mut mask = vec![0u8; height * width];
        for b in &boxes {
            for i in b.y0..b.y1 {
                mask[i * width + b.x0..i * width + b.x1].fill(1);
            }
        }
        let inside_count = mask.iter().map(|&m| m as usize).sum();
        Ok(GroundTruth {
            height,
            width,
            boxes,
            mask,
            inside_count,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn boxes(&self) -> &[BoundingBox] {
        &self.boxes
    }

    /// Row-major union mask, one byte per pixel (0 or 1).
    pub fn mask(&self) -> &[u8] {
        &self.mask
    }

    #[inline]
    pub fn is_inside(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.width + col] != 0
    }

    /// Number of 1-pixels in the mask.
    pub fn inside_count(&self) -> usize {
        self.inside_count
    }

    pub(crate) fn check_shape(&self, map: &ActivationMap) -> Result<()> {
        if map.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                map_height: map.height(),
                map_width: map.width(),
                gt_height: self.height,
                gt_width: self.width,
            });
        }
        Ok(())
    }
}

pub fn make_ground_truth(boxes: &[BoundingBox], height: usize, width: usize) -> Result<GroundTruth> {
    GroundTruth::new(boxes.to_vec(), height, width)
}

/// Constants used by the metric suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub binarize_threshold: f64,
    /// Local maxima must be strictly above this value.
    pub maxima_threshold: f64,
    /// NMS suppression radius in pixels.
    pub nms_radius: f64,
    pub epsilon: f64,
    pub tie_tolerance: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            binarize_threshold: 0.5,
            maxima_threshold: 0.7,
            nms_radius: 50.0,
            epsilon: 1e-8,
            tie_tolerance: 1e-6,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.binarize_threshold) {
            return Err(Error::InvalidConfig(format!(
                "binarize_threshold must be in (0, 1), got {}",
                self.binarize_threshold
            )));
        }
        if !open_unit(self.maxima_threshold) {
            return Err(Error::InvalidConfig(format!(
                "maxima_threshold must be in (0, 1), got {}",
                self.maxima_threshold
            )));
        }
        if !(self.nms_radius > 0.0 && self.nms_radius.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "nms_radius must be positive, got {}",
                self.nms_radius
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.tie_tolerance >= 0.0 && self.tie_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tie_tolerance must be non-negative, got {}",
                self.tie_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// The map has no activation mass at all.
    DegenerateMap,
}

/// Full per-instance score record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetrics {
    pub iou_soft: f64,
    pub iou_binary: f64,
    pub dice_soft: f64,
    pub dice_binary: f64,
    pub wdp_soft: f64,
    pub wdp_binary: f64,
    pub io_ratio: f64,
    pub pg_hit: u8,
    pub pg_uncertain: bool,
    pub argmax_coord: (usize, usize),
    pub nms_maxima: Vec<Peak>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
}

impl InstanceMetrics {
    /// The seven continuous scores, in table column order.
    pub fn scalars(&self) -> [f64; 7] {
        [
            self.iou_soft,
            self.iou_binary,
            self.dice_soft,
            self.dice_binary,
            self.wdp_soft,
            self.wdp_binary,
            self.io_ratio,
        ]
    }
}
