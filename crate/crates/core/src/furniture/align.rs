use super::horizontal::{horizontal_map, linear_map, HorizontalMode, WallPair};
use super::vertical::{vertical_source_row, VerticalPolicy};
use crate::error::{Error, Result};
use crate::layout::{column_owners, layout_to_plan, PlanModel};
use crate::pano::equirect::col_to_lon;
use crate::pano::resample::nearest_index;
use crate::pano::{sample_bilinear_where, Layout, Panorama, Sample, SemanticMask};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignOptions {
    pub vertical: VerticalPolicy,
    pub horizontal: HorizontalMode,
}

/// Backward map from destination pixels to source coordinates between two
/// layouts with the same wall count.
#[derive(Debug, Clone)]
pub struct WarpField {
    height: usize,
    policy: VerticalPolicy,
    dst_wall: Vec<usize>,
    src_col: Vec<f64>,
    /// `(a_src, b_src, a_dst, b_dst)` per destination column.
    bounds: Vec<(f64, f64, f64, f64)>,
}

impl WarpField {
    /// Builds the field taking destination wall `i` from source wall
    /// `pairing[i]` (identity when `None`).
    pub fn build(
        src_layout: &Layout,
        dst_layout: &Layout,
        height: usize,
        width: usize,
        opts: &AlignOptions,
        pairing: Option<&[usize]>,
    ) -> Result<Self> {
        opts.vertical.validate()?;
        let t = dst_layout.wall_count();
        if src_layout.wall_count() != t {
            return Err(Error::IncompatibleSamples(format!(
                "source layout has {} walls, destination has {t}",
                src_layout.wall_count()
            )));
        }
        let identity: Vec<usize> = (0..t).collect();
        let pairing = pairing.unwrap_or(&identity);
        check_permutation(pairing, t)?;

        let src_plan = layout_to_plan(src_layout, height, width)?;
        let dst_plan = layout_to_plan(dst_layout, height, width)?;
        let owners = column_owners(dst_layout, width)?;
        let pairs = (0..t)
            .map(|i| wall_pair(&src_plan, src_layout, pairing[i], &dst_plan, dst_layout, i))
            .collect::<Result<Vec<_>>>()?;

        let mut src_col = Vec::with_capacity(width);
        let mut bounds = Vec::with_capacity(width);
        for (c, &i) in owners.iter().enumerate() {
            let j = pairing[i];
            let pair = &pairs[i];
            let sc = match opts.horizontal {
                HorizontalMode::PlanFraction => horizontal_map(c as f64, pair, width),
                HorizontalMode::Linear => linear_map(c as f64, pair, width),
            }
            .map_err(|e| Error::Geometry(format!("column {c}, wall {i}: {e}")))?;
            let (a_dst, b_dst) = dst_plan.boundary_rows_on_wall(i, col_to_lon(c as f64, width), height)?;
            let (a_src, b_src) = src_plan.boundary_rows_on_wall(j, col_to_lon(sc, width), height)?;
            src_col.push(sc);
            bounds.push((a_src, b_src, a_dst, b_dst));
        }
        Ok(Self {
            height,
            policy: opts.vertical,
            dst_wall: owners,
            src_col,
            bounds,
        })
    }

    pub fn width(&self) -> usize {
        self.src_col.len()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Wall of the destination layout that owns column `col`.
    pub fn dst_wall(&self, col: usize) -> usize {
        self.dst_wall[col]
    }

    pub fn src_col(&self, col: usize) -> f64 {
        self.src_col[col]
    }

    /// `(a_src, b_src, a_dst, b_dst)` boundary rows at destination column `col`.
    pub fn bounds(&self, col: usize) -> (f64, f64, f64, f64) {
        self.bounds[col]
    }

    /// Source `(col, row)` for destination pixel `(col, row)`.
    #[inline]
    pub fn source(&self, col: usize, row: usize) -> Result<(f64, f64)> {
        let (a_src, b_src, a_dst, b_dst) = self.bounds[col];
        let r = vertical_source_row(row as f64, a_src, b_src, a_dst, b_dst, &self.policy, self.height)?;
        Ok((self.src_col[col], r))
    }
}

fn check_permutation(pairing: &[usize], t: usize) -> Result<()> {
    let mut seen = vec![false; t];
    if pairing.len() != t {
        return Err(Error::Config(format!(
            "wall pairing has {} entries for {t} walls",
            pairing.len()
        )));
    }
    for &j in pairing {
        if j >= t || seen[j] {
            return Err(Error::Config(format!("wall pairing {pairing:?} is not a permutation")));
        }
        seen[j] = true;
    }
    Ok(())
}

fn wall_pair(
    src_plan: &PlanModel,
    src_layout: &Layout,
    j: usize,
    dst_plan: &PlanModel,
    dst_layout: &Layout,
    i: usize,
) -> Result<WallPair> {
    let span = |l: &Layout, k: usize| {
        let c = l.corners();
        (c[k].column, c[(k + 1) % c.len()].column)
    };
    WallPair::new(
        src_plan.wall(j),
        dst_plan.wall(i),
        span(src_layout, j),
        span(dst_layout, i),
    )
}

/// Warps a sample onto `target` wall by wall.
///
/// Masks are sampled nearest-neighbour, except that a lookup falling between
/// the two rows of a ceiling|wall or wall|floor transition is decided by the
/// source's analytic boundary, which keeps structure edges on the target
/// boundaries when a band is stretched. Image pixels are sampled bilinearly
/// from only those neighbours that share the sampled mask label, so colors
/// never bleed across semantic edges.
pub fn align_sample(sample: &Sample, target: &Layout, opts: &AlignOptions) -> Result<(Panorama, SemanticMask)> {
    let (h, w) = (sample.height(), sample.width());
    let field = WarpField::build(&sample.layout, target, h, w, opts, None)?;
    warp_with_field(sample, &field)
}

/// Label at source `(x, y)` as described on [`align_sample`].
fn structure_aware_label(
    mask: &SemanticMask,
    x: f64,
    y: f64,
    (a_src, b_src): (f64, f64),
    structure: Option<[u8; 3]>,
) -> (usize, usize, u8) {
    let (h, w) = (mask.height(), mask.width());
    let (nc, nr) = nearest_index(x, y, w, h);
    let label = mask.get(nc, nr);
    let Some([ceiling, wall, floor]) = structure else {
        return (nc, nr, label);
    };
    let k0 = y.floor();
    if k0 < 0.0 || k0 + 1.0 > (h - 1) as f64 || k0 == y {
        return (nc, nr, label);
    }
    let (r0, r1) = (k0 as usize, k0 as usize + 1);
    let (l0, l1) = (mask.get(nc, r0), mask.get(nc, r1));
    let edge = k0 + 0.5;
    let boundary = if (l0, l1) == (ceiling, wall) {
        a_src
    } else if (l0, l1) == (wall, floor) {
        b_src
    } else {
        return (nc, nr, label);
    };
    if (edge - boundary).abs() > 1.0 {
        return (nc, nr, label);
    }
    if y < boundary {
        (nc, r0, l0)
    } else {
        (nc, r1, l1)
    }
}

pub(crate) fn warp_with_field(sample: &Sample, field: &WarpField) -> Result<(Panorama, SemanticMask)> {
    let (h, w) = (sample.height(), sample.width());
    let m = &sample.mask;
    let structure = match (m.class_index("ceiling"), m.class_index("wall"), m.class_index("floor")) {
        (Some(c), Some(wl), Some(f)) => Some([c, wl, f]),
        _ => None,
    };
    let mut image = Panorama::filled(h, w, [0.0; 3]);
    let mut labels = vec![0u8; h * w];
    image
        .data_mut()
        .par_chunks_mut(w * 3)
        .zip(labels.par_chunks_mut(w))
        .enumerate()
        .try_for_each(|(r, (img_row, mask_row))| -> Result<()> {
            for c in 0..w {
                let (x, y) = field.source(c, r)?;
                let (a_src, b_src, _, _) = field.bounds[c];
                let (nc, nr, label) = structure_aware_label(m, x, y, (a_src, b_src), structure);
                let px = sample_bilinear_where(&sample.image, x, y, |cc, rr| sample.mask.get(cc, rr) == label)?
                    .unwrap_or_else(|| sample.image.get(nc, nr));
                img_row[c * 3..c * 3 + 3].copy_from_slice(&px);
                mask_row[c] = label;
            }
            Ok(())
        })?;
    let mask = SemanticMask::new(h, w, labels, sample.mask.classes().to_vec())?;
    Ok((image, mask))
}
