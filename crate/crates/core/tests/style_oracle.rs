mod common;

use common::*;
use panomix::furniture::{default_foreground, AlignOptions};
use panomix::style::{
    build_reference_mask, build_structure_mask, extract_region_stats, fuse_style, ColorSpace, Region, StyleFuserConfig,
    StyleStrategy,
};
use panomix::synth::{random_scene, render_scene, RandomSceneParams, SceneSpec, Texture};
use panomix::{Error, Sample, SemanticMask};

fn no_boxes(seed: u64) -> SceneSpec {
    let params = RandomSceneParams {
        boxes: (0, 0),
        ..Default::default()
    };
    random_scene(seed, &params).unwrap()
}

fn one_box(seed: u64) -> SceneSpec {
    let params = RandomSceneParams {
        boxes: (1, 1),
        ..Default::default()
    };
    random_scene(seed, &params).unwrap()
}

fn checker(a: f64, b: f64) -> Texture {
    Texture::Checker {
        period: 0.37,
        colors: [[a, a * 0.9, a * 0.8], [b, b * 0.9, b * 0.8]],
    }
}

fn structure_label(region: Region) -> u8 {
    match region {
        Region::Ceiling => 0,
        Region::Floor => 1,
        _ => 2,
    }
}

#[test]
fn structure_mask_agrees_with_rendered_mask() {
    for seed in 0..10 {
        let s = render_scene(&no_boxes(seed), 256, 512).unwrap();
        let regions = build_structure_mask(&s.layout, 256, 512).unwrap();
        let agree = (0..256 * 512)
            .filter(|&p| structure_label(regions.get(p % 512, p / 512)) == s.mask.labels()[p])
            .count();
        assert!(agree as f64 >= 0.99 * (256.0 * 512.0), "seed {seed}: {agree}");
        assert_eq!(regions.count(Region::Others), 0);
    }
}

#[test]
fn square_room_has_six_regions() {
    let mut spec = no_boxes(1);
    spec.camera_x = 0.0;
    spec.camera_z = 0.0;
    spec.half_extent_z = spec.half_extent_x;
    let s = render_scene(&spec, 128, 256).unwrap();
    let regions = build_structure_mask(&s.layout, 128, 256).unwrap();
    for r in [Region::Ceiling, Region::Floor, Region::Wall(0), Region::Wall(1), Region::Wall(2), Region::Wall(3)] {
        assert!(regions.count(r) > 0, "{r}");
    }
}

#[test]
fn reference_mask_covers_furniture_exactly() {
    let s = render_scene(&no_boxes(2), 128, 256).unwrap();
    let fg = default_foreground(s.mask.classes());
    assert_eq!(build_reference_mask(&s, &fg).unwrap(), build_structure_mask(&s.layout, 128, 256).unwrap());

    for seed in 0..5 {
        let spec = one_box(seed);
        let s = render_scene(&spec, 256, 512).unwrap();
        let label = s.mask.class_index(&spec.furniture[0].class).unwrap();
        let box_area = s.mask.labels().iter().filter(|&&l| l == label).count();
        let refs = build_reference_mask(&s, &fg).unwrap();
        assert_eq!(refs.count(Region::Others), box_area, "seed {seed}");
    }
}

#[test]
fn total_covering_empties_every_region() {
    let s = render(4, 64, 128);
    let bed = s.mask.class_index("bed").unwrap();
    let mask = SemanticMask::filled(64, 128, bed, s.mask.classes().to_vec());
    let covered = Sample::new(s.image.clone(), mask, s.layout.clone()).unwrap();
    let fg = default_foreground(s.mask.classes());
    let refs = build_reference_mask(&covered, &fg).unwrap();
    assert_eq!(refs.count(Region::Others), 64 * 128);
    let stats = extract_region_stats(&s.image, &refs, ColorSpace::LinearRgb).unwrap();
    assert_eq!(stats.empty_regions().len(), 2 + s.layout.wall_count());
    let err = fuse_style(&covered, &s.layout, &StyleFuserConfig::default(), &fg, &AlignOptions::default()).unwrap_err();
    assert!(matches!(err, Error::EmptyStyleRegion(_)), "{err}");
    assert!(build_reference_mask(&s, &["lamp".to_string()]).is_err());
}

#[test]
fn flat_wall_statistics() {
    let s = render_scene(&no_boxes(5), 128, 256).unwrap();
    let spec = no_boxes(5);
    let stats = extract_region_stats(&s.image, &build_structure_mask(&s.layout, 128, 256).unwrap(), ColorSpace::LinearRgb).unwrap();
    let Texture::Flat(ceiling) = spec.ceiling else { unreachable!() };
    let st = stats.get(Region::Ceiling).unwrap();
    assert_eq!(st.mean, ceiling);
    assert_eq!(st.std, [0.0; 3]);
}

#[test]
fn checker_wall_matches_closed_form() {
    let mut spec = no_boxes(6);
    let tex = checker(0.3, 0.6);
    let Texture::Checker { colors: [c0, c1], .. } = tex.clone() else { unreachable!() };
    spec.walls[0] = tex;
    let (h, w) = (256, 512);
    let s = render_scene(&spec, h, w).unwrap();
    let regions = build_structure_mask(&s.layout, h, w).unwrap();
    let wall = regions.get(w / 2, h / 2);
    let pixels: Vec<[f64; 3]> = (0..h * w)
        .filter(|&p| regions.get(p % w, p / w) == wall)
        .map(|p| s.image.get(p % w, p / w))
        .collect();
    assert!(pixels.iter().all(|&p| p == c0 || p == c1));
    let p0 = pixels.iter().filter(|&&p| p == c0).count() as f64 / pixels.len() as f64;
    let st = extract_region_stats(&s.image, &regions, ColorSpace::LinearRgb).unwrap();
    let st = st.get(wall).unwrap();
    for k in 0..3 {
        let mean = p0 * c0[k] + (1.0 - p0) * c1[k];
        let std = (c0[k] - c1[k]).abs() * (p0 * (1.0 - p0)).sqrt();
        assert!((st.mean[k] - mean).abs() < 1e-6 && (st.std[k] - std).abs() < 1e-6);
    }
}

#[test]
fn flat_stat_on_flat_room_paints_exact_colors() {
    let style = render(7, 128, 256);
    let target = render(8, 128, 256);
    let cfg = StyleFuserConfig {
        strategy: StyleStrategy::FlatStat,
        ..Default::default()
    };
    let fg = default_foreground(style.mask.classes());
    let out = fuse_style(&style, &target.layout, &cfg, &fg, &AlignOptions::default()).unwrap();
    let want = background_means(&style);
    let regions = build_structure_mask(&target.layout, 128, 256).unwrap();
    for p in 0..128 * 256 {
        let (c, r) = (p % 256, p / 256);
        let mean = want.iter().find(|(reg, _)| *reg == regions.get(c, r)).unwrap().1;
        assert_eq!(out.get(c, r), mean);
    }
}

#[test]
fn flat_stat_matches_region_spread_and_is_seeded() {
    let mut spec = no_boxes(9);
    spec.ceiling = checker(0.3, 0.6);
    spec.floor = checker(0.25, 0.55);
    spec.walls = [checker(0.3, 0.6), checker(0.35, 0.7), checker(0.2, 0.5), checker(0.4, 0.65)];
    let (h, w) = (256, 512);
    let style = render_scene(&spec, h, w).unwrap();
    let target = render(10, h, w);
    let cfg = StyleFuserConfig {
        strategy: StyleStrategy::FlatStat,
        noise_seed: 77,
        ..Default::default()
    };
    let fg = default_foreground(style.mask.classes());
    let out = fuse_style(&style, &target.layout, &cfg, &fg, &AlignOptions::default()).unwrap();
    assert_eq!(out, fuse_style(&style, &target.layout, &cfg, &fg, &AlignOptions::default()).unwrap());

    let src = extract_region_stats(&style.image, &build_structure_mask(&style.layout, h, w).unwrap(), ColorSpace::LinearRgb).unwrap();
    let dst_regions = build_structure_mask(&target.layout, h, w).unwrap();
    let dst = extract_region_stats(&out, &dst_regions, ColorSpace::LinearRgb).unwrap();
    for region in [Region::Ceiling, Region::Floor].into_iter().chain((0..4).map(Region::Wall)) {
        let (a, b) = (src.get(region).unwrap(), dst.get(region).unwrap());
        if b.count < 1000 {
            continue;
        }
        for k in 0..3 {
            assert!((b.std[k] - a.std[k]).abs() <= 0.15 * a.std[k], "{region} ch{k}: {} vs {}", b.std[k], a.std[k]);
        }
    }
}

#[test]
fn warp_align_on_itself_reproduces_background() {
    for seed in 11..15 {
        let s = render(seed, 128, 256);
        let fg = default_foreground(s.mask.classes());
        let out = fuse_style(&s, &s.layout, &StyleFuserConfig::default(), &fg, &AlignOptions::default()).unwrap();
        let refs = build_reference_mask(&s, &fg).unwrap();
        let (mut diff, mut n) = (0.0, 0usize);
        for p in 0..128 * 256 {
            let (c, r) = (p % 256, p / 256);
            if refs.get(c, r) == Region::Others {
                continue;
            }
            let (a, b) = (out.get(c, r), s.image.get(c, r));
            diff += (0..3).map(|k| (a[k] - b[k]).abs()).sum::<f64>() / 3.0;
            n += 1;
        }
        assert!(diff / n as f64 <= 2.0 / 255.0, "seed {seed}");
    }
}

#[test]
fn fused_background_never_shows_furniture_colors() {
    for seed in 20..26 {
        let spec = scene(seed);
        let style = render_scene(&spec, 128, 256).unwrap();
        let target = render(seed + 100, 128, 256);
        let fg = default_foreground(style.mask.classes());
        let out = fuse_style(&style, &target.layout, &StyleFuserConfig::default(), &fg, &AlignOptions::default()).unwrap();
        let furniture: Vec<[f64; 3]> = spec.furniture_palette();
        assert!(out.data().chunks(3).all(|p| !furniture.contains(&[p[0], p[1], p[2]])), "seed {seed}");
    }
}

#[test]
fn fused_region_edges_follow_target_boundaries() {
    let style = render_scene(&no_boxes(30), 256, 512).unwrap();
    let target = render(31, 256, 512);
    let fg = default_foreground(style.mask.classes());
    let out = fuse_style(&style, &target.layout, &StyleFuserConfig::default(), &fg, &AlignOptions::default()).unwrap();
    let palette = no_boxes(30).structure_palette();
    let label = |c: usize, r: usize| {
        let px = out.get(c, r);
        match palette.iter().position(|&p| p == px) {
            Some(0) => 0u8,
            Some(1) => 1,
            _ => 2,
        }
    };
    let labels = (0..256 * 512).map(|p| label(p % 512, p / 512)).collect();
    let mask = SemanticMask::new(256, 512, labels, style.mask.classes().to_vec()).unwrap();
    let (good, seen) = boundary_agreement(&mask, &target.layout, 1.0);
    assert!(good as f64 >= 0.99 * seen as f64, "{good}/{seen}");
}

#[test]
fn wall_count_mismatch_is_incompatible() {
    let s = render(40, 64, 128);
    let three = panomix::Layout::new(s.layout.corners()[..3].to_vec());
    let fg = default_foreground(s.mask.classes());
    let err = fuse_style(&s, &three, &StyleFuserConfig::default(), &fg, &AlignOptions::default()).unwrap_err();
    assert!(matches!(err, Error::IncompatibleSamples(_)), "{err}");
}
