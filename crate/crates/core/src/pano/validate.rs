use super::Sample;
use crate::layout::corner_ceiling_heights;
use std::fmt;

/// Relative spread of per-corner ceiling heights tolerated by
/// [`validate_sample`].
pub const CEILING_CONSISTENCY_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Dimensions,
    PixelValue,
    MaskLabel,
    MaskShape,
    CornerCount,
    CornerOrder,
    CornerRows,
    CeilingConsistency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

fn push(out: &mut Vec<Violation>, kind: ViolationKind, message: String) {
    out.push(Violation { kind, message });
}

/// Lists every broken invariant of a sample; an empty list means valid.
pub fn validate_sample(sample: &Sample) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let (h, w) = (sample.height(), sample.width());

    if w != 2 * h || h < 8 {
        push(&mut out, Dimensions, format!("image is {h}x{w}; need W = 2H and H >= 8"));
    }
    let bad_pixels = sample
        .image
        .data()
        .iter()
        .filter(|v| !v.is_finite() || **v < 0.0 || **v > 1.0)
        .count();
    if bad_pixels > 0 {
        push(&mut out, PixelValue, format!("{bad_pixels} channel values outside [0, 1]"));
    }

    if sample.mask.height() != h || sample.mask.width() != w {
        push(&mut out, MaskShape, format!(
            "mask is {}x{} but image is {h}x{w}",
            sample.mask.height(),
            sample.mask.width()
        ));
    }
    let c = sample.mask.class_count();
    let bad_labels = sample.mask.labels().iter().filter(|&&l| l as usize >= c).count();
    if bad_labels > 0 {
        push(&mut out, MaskLabel, format!("{bad_labels} mask pixels have a label >= class count {c}"));
    }

    let corners = sample.layout.corners();
    if corners.len() < 3 {
        push(&mut out, CornerCount, format!("layout has {} corners, need at least 3", corners.len()));
    }
    let mut geometry_ok = corners.len() >= 3;
    for (i, k) in corners.iter().enumerate() {
        if !(k.column.is_finite() && k.column >= 0.0 && k.column < w as f64) {
            push(&mut out, CornerOrder, format!("corner {i} column {} outside [0, {w})", k.column));
            geometry_ok = false;
        }
        if !(k.ceil_row.is_finite()
            && k.floor_row.is_finite()
            && k.ceil_row >= 0.0
            && k.ceil_row < k.floor_row
            && k.floor_row < h as f64)
        {
            push(&mut out, CornerRows, format!(
                "corner {i}: need 0 <= ceil_row ({}) < floor_row ({}) < {h}",
                k.ceil_row, k.floor_row
            ));
            geometry_ok = false;
        }
    }
    for (i, pair) in corners.windows(2).enumerate() {
        if pair[1].column <= pair[0].column {
            push(&mut out, CornerOrder, format!(
                "corners {i} and {} share or reverse column ({} then {})",
                i + 1,
                pair[0].column,
                pair[1].column
            ));
            geometry_ok = false;
        }
    }

    if geometry_ok {
        match corner_ceiling_heights(&sample.layout, h) {
            Ok(heights) => {
                let med = median(&heights);
                for (i, hc) in heights.iter().enumerate() {
                    let rel = (hc - med).abs() / med;
                    if rel > CEILING_CONSISTENCY_TOL {
                        push(&mut out, CeilingConsistency, format!(
                            "corner {i} implies ceiling height {hc:.4}, {:.1}% from median {med:.4}",
                            rel * 100.0
                        ));
                    }
                }
            }
            Err(e) => push(&mut out, CeilingConsistency, e.to_string()),
        }
    }
    out
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
