use crate::error::{Error, Result};
use crate::layout::Segment;
use crate::pano::equirect::{col_to_lon, lon_to_col, wrap_col};
use serde::{Deserialize, Serialize};

/// How destination columns inside a wall find their source column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizontalMode {
    /// Same fraction along the wall in the floor plan.
    #[default]
    PlanFraction,
    /// Same fraction of the wall's column span.
    Linear,
}

/// Corresponding walls of the source and destination layouts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallPair {
    pub src_segment: Segment,
    pub dst_segment: Segment,
    /// Corner columns bounding the source wall, `end` may be below `start`
    /// when the wall crosses the seam.
    pub src_col_range: (f64, f64),
    pub dst_col_range: (f64, f64),
}

impl WallPair {
    pub fn new(
        src_segment: Segment,
        dst_segment: Segment,
        src_col_range: (f64, f64),
        dst_col_range: (f64, f64),
    ) -> Result<Self> {
        for (name, seg) in [("source", &src_segment), ("destination", &dst_segment)] {
            if !(seg.length() > 1e-9) {
                return Err(Error::DegenerateWall(format!("{name} wall segment has zero length")));
            }
        }
        Ok(Self {
            src_segment,
            dst_segment,
            src_col_range,
            dst_col_range,
        })
    }
}

/// Source column for `dst_col` by plan-fraction correspondence: the viewing
/// ray hits the destination wall at fraction `s`, and the source column looks
/// at the point at the same fraction of the source wall.
pub fn horizontal_map(dst_col: f64, pair: &WallPair, width: usize) -> Result<f64> {
    let (s, _) = pair.dst_segment.intersect_ray(col_to_lon(dst_col, width))?;
    let p = pair.src_segment.start.lerp(pair.src_segment.end, s);
    Ok(wrap_col(lon_to_col(p.lon(), width), width))
}

/// Source column for `dst_col` by uniform rescaling of the wall's column span.
pub fn linear_map(dst_col: f64, pair: &WallPair, width: usize) -> Result<f64> {
    let w = width as f64;
    let (d0, d1) = pair.dst_col_range;
    let (s0, s1) = pair.src_col_range;
    let dst_span = (d1 - d0).rem_euclid(w);
    let src_span = (s1 - s0).rem_euclid(w);
    if !(dst_span > 0.0 && src_span > 0.0) {
        return Err(Error::DegenerateWall("wall spans no columns".into()));
    }
    let mut offset = (dst_col - d0).rem_euclid(w);
    // just left of the start corner wraps to ~W
    if offset > w - 1.0 {
        offset -= w;
    }
    let f = offset / dst_span;
    if !(-1e-6..=1.0 + 1e-6).contains(&f) {
        return Err(Error::Geometry(format!(
            "column {dst_col} lies outside wall columns [{d0}, {d1})"
        )));
    }
    Ok(wrap_col(s0 + f.clamp(0.0, 1.0) * src_span, width))
}
