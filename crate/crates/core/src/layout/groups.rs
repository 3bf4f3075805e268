use super::{layout_to_plan, plan_to_boundaries, BoundaryMap};
use crate::error::{Error, Result};
use crate::pano::{roll_columns, Layout, Panorama, Sample, SemanticMask};

/// First pixel column of each wall: the first pixel whose center is at or
/// past the corner, modulo `W`.
pub fn group_boundaries(layout: &Layout, width: usize) -> Result<Vec<usize>> {
    let corners = layout.corners();
    if corners.len() < 3 {
        return Err(Error::DegenerateLayout(format!(
            "layout has {} corners, need at least 3",
            corners.len()
        )));
    }
    let bounds: Vec<usize> = corners
        .iter()
        .map(|c| (c.column.ceil() as i64).rem_euclid(width as i64) as usize)
        .collect();
    let n = bounds.len();
    // cyclic offsets from the first boundary must strictly increase
    let offset = |b: usize| (b + width - bounds[0]) % width;
    for i in 1..n {
        if offset(bounds[i]) <= offset(bounds[i - 1]) {
            return Err(Error::DegenerateWall(format!(
                "corners {} and {i} (columns {} and {}) fall on the same pixel boundary",
                i - 1,
                corners[i - 1].column,
                corners[i].column
            )));
        }
    }
    if offset(bounds[n - 1]) == 0 {
        return Err(Error::DegenerateWall(format!(
            "corners {} and 0 fall on the same pixel boundary",
            n - 1
        )));
    }
    Ok(bounds)
}

/// Wall index owning every pixel column.
pub fn column_owners(layout: &Layout, width: usize) -> Result<Vec<usize>> {
    let bounds = group_boundaries(layout, width)?;
    let n = bounds.len();
    let mut owners = vec![0usize; width];
    for i in 0..n {
        let start = bounds[i];
        let end = bounds[(i + 1) % n];
        let mut c = start;
        loop {
            owners[c] = i;
            c = (c + 1) % width;
            if c == end {
                break;
            }
        }
    }
    Ok(owners)
}

/// Contiguous column range `[col_start, col_end)` of one wall in a
/// [`ColumnSplit`]'s rolled sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnGroup {
    pub wall_index: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl ColumnGroup {
    pub fn width(&self) -> usize {
        self.col_end - self.col_start
    }
}

/// A sample rolled so the first wall starts at column 0, plus its per-wall
/// column groups. `wall_index` refers to the original layout's corner order.
#[derive(Debug, Clone)]
pub struct ColumnSplit {
    /// Columns the sample was rolled by; roll by `-roll` to undo.
    pub roll: i64,
    pub rolled: Sample,
    pub groups: Vec<ColumnGroup>,
}

impl ColumnSplit {
    pub fn image_slice(&self, group: &ColumnGroup) -> Panorama {
        let img = &self.rolled.image;
        Panorama::from_fn(img.height(), group.width(), |c, r| img.get(group.col_start + c, r))
    }

    pub fn mask_slice(&self, group: &ColumnGroup) -> SemanticMask {
        let m = &self.rolled.mask;
        let mut out = SemanticMask::filled(m.height(), group.width(), 0, m.classes().to_vec());
        for r in 0..m.height() {
            for c in 0..group.width() {
                out.set(c, r, m.get(group.col_start + c, r));
            }
        }
        out
    }

    /// Boundary curves of the rolled layout over one group's columns.
    pub fn boundary_slice(&self, group: &ColumnGroup) -> Result<BoundaryMap> {
        let (h, w) = (self.rolled.height(), self.rolled.width());
        let plan = layout_to_plan(&self.rolled.layout, h, w)?;
        let full = plan_to_boundaries(&plan, h, w)?;
        Ok(BoundaryMap {
            ceil_rows: full.ceil_rows[group.col_start..group.col_end].to_vec(),
            floor_rows: full.floor_rows[group.col_start..group.col_end].to_vec(),
        })
    }
}

/// Splits a sample's columns into one contiguous group per wall.
pub fn split_column_groups(sample: &Sample) -> Result<ColumnSplit> {
    let w = sample.width();
    let bounds = group_boundaries(&sample.layout, w)?;
    let n = bounds.len();
    let roll = -(bounds[0] as i64);
    let rolled = roll_columns(sample, roll);
    let groups = (0..n)
        .map(|i| {
            let start = (bounds[i] + w - bounds[0]) % w;
            let end = if i + 1 == n {
                w
            } else {
                (bounds[i + 1] + w - bounds[0]) % w
            };
            ColumnGroup {
                wall_index: i,
                col_start: start,
                col_end: end,
            }
        })
        .collect();
    Ok(ColumnSplit {
        roll,
        rolled,
        groups,
    })
}
