use super::regions::{Region, RegionMask};
use crate::error::{Error, Result};
use crate::pano::{Panorama, Rgb};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorSpace {
    #[default]
    LinearRgb,
    /// Luma `(r+g+b)/3` and two opponent chroma axes.
    DecorrelatedLumaChroma,
}

impl ColorSpace {
    pub fn from_rgb(self, c: Rgb) -> [f64; 3] {
        match self {
            ColorSpace::LinearRgb => c,
            ColorSpace::DecorrelatedLumaChroma => {
                let [r, g, b] = c;
                [(r + g + b) / 3.0, (r - b) / 2.0, (2.0 * g - r - b) / 4.0]
            }
        }
    }

    pub fn to_rgb(self, v: [f64; 3]) -> Rgb {
        match self {
            ColorSpace::LinearRgb => v,
            ColorSpace::DecorrelatedLumaChroma => {
                let [l, c1, c2] = v;
                [l + c1 - 2.0 * c2 / 3.0, l + 4.0 * c2 / 3.0, l - c1 - 2.0 * c2 / 3.0]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionStat {
    pub count: usize,
    pub mean: [f64; 3],
    /// Population standard deviation.
    pub std: [f64; 3],
}

impl RegionStat {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Color statistics of every background region of a [`RegionMask`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats {
    pub color_space: ColorSpace,
    wall_count: usize,
    stats: Vec<RegionStat>,
}

impl RegionStats {
    /// Stats for a background region; `None` for [`Region::Others`] or an
    /// out-of-range wall.
    pub fn get(&self, region: Region) -> Option<&RegionStat> {
        if region == Region::Others {
            return None;
        }
        self.stats.get(region.code(self.wall_count) as usize)
    }

    pub fn wall_count(&self) -> usize {
        self.wall_count
    }

    /// Background regions without a single pixel.
    pub fn empty_regions(&self) -> Vec<Region> {
        self.stats
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_empty())
            .map(|(i, _)| Region::from_code(i as u16, self.wall_count))
            .collect()
    }
}

/// Per-region mean and standard deviation, ignoring `others` pixels.
pub fn extract_region_stats(image: &Panorama, regions: &RegionMask, color_space: ColorSpace) -> Result<RegionStats> {
    if (image.height(), image.width()) != (regions.height(), regions.width()) {
        return Err(Error::DimensionMismatch(format!(
            "image is {}x{} but region mask is {}x{}",
            image.height(),
            image.width(),
            regions.height(),
            regions.width()
        )));
    }
    let n = regions.background_regions();
    let mut count = vec![0usize; n];
    let mut sum = vec![[0.0f64; 3]; n];
    let mut lo = vec![[f64::INFINITY; 3]; n];
    let mut hi = vec![[f64::NEG_INFINITY; 3]; n];
    let pixels = || {
        regions
            .codes()
            .iter()
            .enumerate()
            .filter(|(_, &code)| (code as usize) < n)
            .map(|(p, &code)| {
                let d = &image.data()[p * 3..p * 3 + 3];
                (code as usize, color_space.from_rgb([d[0], d[1], d[2]]))
            })
    };
    for (k, v) in pixels() {
        count[k] += 1;
        for ch in 0..3 {
            sum[k][ch] += v[ch];
            lo[k][ch] = lo[k][ch].min(v[ch]);
            hi[k][ch] = hi[k][ch].max(v[ch]);
        }
    }
    let mut mean = vec![[0.0f64; 3]; n];
    for k in 0..n {
        for ch in 0..3 {
            // a constant channel keeps its exact value
            mean[k][ch] = if count[k] == 0 {
                0.0
            } else if lo[k][ch] == hi[k][ch] {
                lo[k][ch]
            } else {
                sum[k][ch] / count[k] as f64
            };
        }
    }
    let mut var = vec![[0.0f64; 3]; n];
    for (k, v) in pixels() {
        for ch in 0..3 {
            let d = v[ch] - mean[k][ch];
            var[k][ch] += d * d;
        }
    }
    let stats = (0..n)
        .map(|k| RegionStat {
            count: count[k],
            mean: mean[k],
            std: if count[k] == 0 {
                [0.0; 3]
            } else {
                var[k].map(|v| (v / count[k] as f64).sqrt())
            },
        })
        .collect();
    Ok(RegionStats {
        color_space,
        wall_count: regions.wall_count(),
        stats,
    })
}
