//! Oracle helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use panomix::furniture::default_foreground;
use panomix::layout::layout_to_plan;
use panomix::style::{build_reference_mask, extract_region_stats, ColorSpace, Region};
use panomix::synth::{random_scene, render_scene, RandomSceneParams, SceneSpec};
use panomix::{Layout, Rgb, Sample, SemanticMask};

pub fn scene(seed: u64) -> SceneSpec {
    random_scene(seed, &RandomSceneParams::default()).unwrap()
}

pub fn render(seed: u64, h: usize, w: usize) -> Sample {
    render_scene(&scene(seed), h, w).unwrap()
}

/// Columns whose observable ceiling|wall and wall|floor label transitions lie
/// within `tol` rows of the analytic boundaries of `layout`. Returns
/// `(agreeing, observable)`; a column is observable when at least one of the
/// two transitions is visible (not hidden by furniture).
pub fn boundary_agreement(mask: &SemanticMask, layout: &Layout, tol: f64) -> (usize, usize) {
    let (h, w) = (mask.height(), mask.width());
    let plan = layout_to_plan(layout, h, w).unwrap();
    let ceiling = mask.class_index("ceiling").unwrap();
    let floor = mask.class_index("floor").unwrap();
    let wall = mask.class_index("wall").unwrap();
    let (mut good, mut seen) = (0, 0);
    for c in 0..w {
        let (a, b) = plan.boundary_rows_at_col(c as f64, h, w).unwrap();
        let top = (0..h).find(|&r| mask.get(c, r) != ceiling);
        let bottom = (0..h).rev().find(|&r| mask.get(c, r) != floor);
        let mut errs = Vec::new();
        if let Some(r) = top.filter(|&r| mask.get(c, r) == wall) {
            errs.push((r as f64 - 0.5 - a).abs());
        }
        if let Some(r) = bottom.filter(|&r| mask.get(c, r) == wall) {
            errs.push((r as f64 + 0.5 - b).abs());
        }
        if !errs.is_empty() {
            seen += 1;
            if errs.iter().all(|&e| e <= tol) {
                good += 1;
            }
        }
    }
    (good, seen)
}

/// Foreground pixels whose 8-neighbourhood (columns wrap, rows clamp) carries
/// the same label.
pub fn eroded_foreground(mask: &SemanticMask) -> Vec<(usize, usize)> {
    let (h, w) = (mask.height(), mask.width());
    let fg = default_foreground(mask.classes());
    let is_fg: Vec<bool> = (0..mask.class_count())
        .map(|i| fg.contains(&mask.classes()[i]))
        .collect();
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let l = mask.get(c, r);
            if !is_fg[l as usize] {
                continue;
            }
            let interior = (-1i64..=1).all(|dr| {
                (-1i64..=1).all(|dc| {
                    let rr = (r as i64 + dr).clamp(0, h as i64 - 1) as usize;
                    let cc = (c as i64 + dc).rem_euclid(w as i64) as usize;
                    mask.get(cc, rr) == l
                })
            });
            if interior {
                out.push((c, r));
            }
        }
    }
    out
}

/// Mean background color per region (ceiling, floor, walls) of `sample`,
/// regions taken from its own layout with foreground excluded.
pub fn background_means(sample: &Sample) -> Vec<(Region, Rgb)> {
    let fg = default_foreground(sample.mask.classes());
    let regions = build_reference_mask(sample, &fg).unwrap();
    let stats = extract_region_stats(&sample.image, &regions, ColorSpace::LinearRgb).unwrap();
    let t = sample.layout.wall_count();
    let mut out = Vec::new();
    for region in [Region::Ceiling, Region::Floor].into_iter().chain((0..t).map(Region::Wall)) {
        if let Some(s) = stats.get(region).filter(|s| !s.is_empty()) {
            out.push((region, s.mean));
        }
    }
    out
}

/// Background means of `sample` over the structure regions of `layout`.
pub fn background_means_on(sample: &Sample, layout: &Layout) -> Vec<(Region, Rgb)> {
    let probe = Sample::new(sample.image.clone(), sample.mask.clone(), layout.clone()).unwrap();
    background_means(&probe)
}

pub fn max_channel_diff(a: Rgb, b: Rgb) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
}
