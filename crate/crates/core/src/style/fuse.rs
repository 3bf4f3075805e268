use super::regions::{build_reference_mask, build_structure_mask, Region, RegionMask};
use super::stats::{extract_region_stats, ColorSpace, RegionStat, RegionStats};
use crate::error::{Error, Result};
use crate::furniture::{AlignOptions, WarpField};
use crate::pano::{sample_bilinear_where, Layout, Panorama, Rgb, Sample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StyleStrategy {
    /// Warp the style sample's background onto the structure layout.
    #[default]
    WarpAlign,
    /// Fill each region with the style region's mean plus matched noise.
    FlatStat,
}

/// How `warp_align` fills pixels whose source was foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    /// Interpolate along the column between the nearest filled pixels of the
    /// same region; falls back to region statistics.
    #[default]
    ColumnInterpolate,
    RegionStatFill,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StyleFuserConfig {
    pub strategy: StyleStrategy,
    pub color_space: ColorSpace,
    pub noise_seed: u64,
    pub fill_policy: FillPolicy,
    /// Structure wall `i` takes its style from style wall `wall_permutation[i]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_permutation: Option<Vec<usize>>,
}

impl Default for StyleFuserConfig {
    fn default() -> Self {
        Self {
            strategy: StyleStrategy::WarpAlign,
            color_space: ColorSpace::LinearRgb,
            noise_seed: 0,
            fill_policy: FillPolicy::ColumnInterpolate,
            wall_permutation: None,
        }
    }
}

/// Produces a foreground-free image with the style sample's background
/// appearance laid out on `structure_layout`.
pub trait StyleFuser: Send + Sync {
    fn fuse(&self, style: &Sample, structure_layout: &Layout) -> Result<Panorama>;
}

pub struct FlatStatFuser {
    pub config: StyleFuserConfig,
    pub others_classes: Vec<String>,
}

pub struct WarpAlignFuser {
    pub config: StyleFuserConfig,
    pub others_classes: Vec<String>,
    pub align: AlignOptions,
}

/// Built-in fuser selected by `cfg.strategy`.
pub fn fuser_for(cfg: &StyleFuserConfig, others_classes: &[String], align: &AlignOptions) -> Box<dyn StyleFuser> {
    match cfg.strategy {
        StyleStrategy::FlatStat => Box::new(FlatStatFuser {
            config: cfg.clone(),
            others_classes: others_classes.to_vec(),
        }),
        StyleStrategy::WarpAlign => Box::new(WarpAlignFuser {
            config: cfg.clone(),
            others_classes: others_classes.to_vec(),
            align: *align,
        }),
    }
}

pub fn fuse_style(
    style: &Sample,
    structure_layout: &Layout,
    cfg: &StyleFuserConfig,
    others_classes: &[String],
    align: &AlignOptions,
) -> Result<Panorama> {
    fuser_for(cfg, others_classes, align).fuse(style, structure_layout)
}

/// Everything both strategies need about the style and target regions.
struct Prepared {
    target: RegionMask,
    reference: RegionMask,
    stats: RegionStats,
    pairing: Vec<usize>,
}

impl Prepared {
    fn new(style: &Sample, structure_layout: &Layout, cfg: &StyleFuserConfig, others: &[String]) -> Result<Self> {
        let t = structure_layout.wall_count();
        if style.layout.wall_count() != t {
            return Err(Error::IncompatibleSamples(format!(
                "style layout has {} walls, structure layout has {t}",
                style.layout.wall_count()
            )));
        }
        let pairing = cfg.wall_permutation.clone().unwrap_or_else(|| (0..t).collect());
        let mut seen = vec![false; t];
        if pairing.len() != t || pairing.iter().any(|&j| j >= t || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::Config(format!("wall permutation {pairing:?} is not a permutation of 0..{t}")));
        }
        let target = build_structure_mask(structure_layout, style.height(), style.width())?;
        let reference = build_reference_mask(style, others)?;
        let stats = extract_region_stats(&style.image, &reference, cfg.color_space)?;
        let prepared = Self {
            target,
            reference,
            stats,
            pairing,
        };
        for code in 0..prepared.target.background_regions() as u16 {
            let dst = Region::from_code(code, t);
            if prepared.target.count(dst) == 0 {
                continue;
            }
            let src = prepared.source_region(dst);
            if prepared.stats.get(src).is_none_or(RegionStat::is_empty) {
                return Err(Error::EmptyStyleRegion(src.to_string()));
            }
        }
        Ok(prepared)
    }

    fn source_region(&self, dst: Region) -> Region {
        match dst {
            Region::Wall(i) => Region::Wall(self.pairing[i]),
            other => other,
        }
    }

    fn source_stat(&self, dst_code: u16) -> &RegionStat {
        let dst = Region::from_code(dst_code, self.target.wall_count());
        self.stats
            .get(self.source_region(dst))
            .expect("background region has statistics")
    }
}

/// Deterministic per-region noise stream.
fn region_rng(seed: u64, code: u16) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(code as u64);
    rng
}

fn draw(stat: &RegionStat, cs: ColorSpace, rng: &mut ChaCha8Rng) -> Rgb {
    let mut v = stat.mean;
    for (x, &s) in v.iter_mut().zip(&stat.std) {
        if s > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            *x += s * z;
        }
    }
    cs.to_rgb(v).map(|x| x.clamp(0.0, 1.0))
}

/// Pixel indices of every background region of `mask`, in raster order.
fn region_pixels(mask: &RegionMask) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); mask.background_regions()];
    for (p, &code) in mask.codes().iter().enumerate() {
        if let Some(list) = out.get_mut(code as usize) {
            list.push(p);
        }
    }
    out
}

/// Fills the listed pixels of each region with seeded draws from the style
/// statistics. Regions are independent, so they run in parallel.
fn stat_fill(out: &mut Panorama, prep: &Prepared, per_region: &[Vec<usize>], cfg: &StyleFuserConfig) {
    let fills: Vec<Vec<Rgb>> = per_region
        .par_iter()
        .enumerate()
        .map(|(code, pixels)| {
            if pixels.is_empty() {
                return Vec::new();
            }
            let stat = prep.source_stat(code as u16);
            let mut rng = region_rng(cfg.noise_seed, code as u16);
            pixels.iter().map(|_| draw(stat, cfg.color_space, &mut rng)).collect()
        })
        .collect();
    let w = out.width();
    for (pixels, colors) in per_region.iter().zip(fills) {
        for (&p, color) in pixels.iter().zip(colors) {
            out.set(p % w, p / w, color);
        }
    }
}

impl StyleFuser for FlatStatFuser {
    fn fuse(&self, style: &Sample, structure_layout: &Layout) -> Result<Panorama> {
        let prep = Prepared::new(style, structure_layout, &self.config, &self.others_classes)?;
        let mut out = Panorama::filled(style.height(), style.width(), [0.0; 3]);
        stat_fill(&mut out, &prep, &region_pixels(&prep.target), &self.config);
        Ok(out)
    }
}

impl StyleFuser for WarpAlignFuser {
    fn fuse(&self, style: &Sample, structure_layout: &Layout) -> Result<Panorama> {
        let prep = Prepared::new(style, structure_layout, &self.config, &self.others_classes)?;
        let (h, w) = (style.height(), style.width());
        let field = WarpField::build(&style.layout, structure_layout, h, w, &self.align, Some(&prep.pairing))?;
        let t = structure_layout.wall_count();

        // sample each target region only from the same style region
        let mut out = Panorama::filled(h, w, [0.0; 3]);
        let mut filled = vec![false; h * w];
        out.data_mut()
            .par_chunks_mut(w * 3)
            .zip(filled.par_chunks_mut(w))
            .enumerate()
            .try_for_each(|(r, (img_row, ok_row))| -> Result<()> {
                for c in 0..w {
                    let dst = Region::from_code(prep.target.code(c, r), t);
                    let want = prep.source_region(dst).code(t);
                    let (x, y) = field.source(c, r)?;
                    if let Some(px) =
                        sample_bilinear_where(&style.image, x, y, |cc, rr| prep.reference.code(cc, rr) == want)?
                    {
                        img_row[c * 3..c * 3 + 3].copy_from_slice(&px);
                        ok_row[c] = true;
                    }
                }
                Ok(())
            })?;

        let holes = match self.config.fill_policy {
            FillPolicy::ColumnInterpolate => column_interpolate(&mut out, &mut filled, &prep.target),
            FillPolicy::RegionStatFill => (0..h * w).filter(|&p| !filled[p]).collect(),
        };
        let mut per_region = vec![Vec::new(); prep.target.background_regions()];
        for p in holes {
            per_region[prep.target.codes()[p] as usize].push(p);
        }
        stat_fill(&mut out, &prep, &per_region, &self.config);
        Ok(out)
    }
}

/// Linearly interpolates unfilled pixels along each column between the
/// nearest filled pixels of the same region. Returns the pixels that had no
/// such neighbour in their column, in raster order.
fn column_interpolate(out: &mut Panorama, filled: &mut [bool], regions: &RegionMask) -> Vec<usize> {
    let (h, w) = (out.height(), out.width());
    let mut leftover = Vec::new();
    for c in 0..w {
        let mut r = 0;
        while r < h {
            if filled[r * w + c] {
                r += 1;
                continue;
            }
            let code = regions.code(c, r);
            let start = r;
            while r < h && !filled[r * w + c] && regions.code(c, r) == code {
                r += 1;
            }
            let end = r; // exclusive
            let above = (start > 0 && regions.code(c, start - 1) == code && filled[(start - 1) * w + c]).then(|| start - 1);
            let below = (end < h && regions.code(c, end) == code && filled[end * w + c]).then_some(end);
            match (above, below) {
                (Some(a), Some(b)) => {
                    let (ca, cb) = (out.get(c, a), out.get(c, b));
                    for rr in start..end {
                        let f = (rr - a) as f64 / (b - a) as f64;
                        let color = if ca == cb {
                            ca
                        } else {
                            [0, 1, 2].map(|k| ca[k] + (cb[k] - ca[k]) * f)
                        };
                        out.set(c, rr, color);
                    }
                }
                (Some(a), None) => {
                    let ca = out.get(c, a);
                    (start..end).for_each(|rr| out.set(c, rr, ca));
                }
                (None, Some(b)) => {
                    let cb = out.get(c, b);
                    (start..end).for_each(|rr| out.set(c, rr, cb));
                }
                (None, None) => {
                    leftover.extend((start..end).map(|rr| rr * w + c));
                    continue;
                }
            }
            filled[start * w + c..].iter_mut().step_by(w).take(end - start).for_each(|f| *f = true);
        }
    }
    leftover.sort_unstable();
    leftover
}
