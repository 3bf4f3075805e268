//! Procedural cuboid rooms rendered by ray casting.
//!
//! Rooms are axis-aligned boxes `[-sx, sx] x [-sz, sz]` in plan with the floor
//! one unit below the camera. Surfaces are unshaded, so every rendered color
//! comes straight from the scene palette and pixel provenance can be read
//! back by exact color lookup.

use crate::error::{Error, Result};
use crate::furniture::STRUCTURE_CLASSES;
use crate::layout::{project_corner, PlanPoint};
use crate::pano::equirect::{col_to_lon, direction, row_to_lat};
use crate::pano::{Corner, Layout, Panorama, Rgb, Sample, SemanticMask};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub enum Texture {
    Flat(Rgb),
    /// Axis-aligned checkerboard in surface coordinates.
    Checker { period: f64, colors: [Rgb; 2] },
    /// Walls blend from `bottom` at the floor to `top` at the ceiling; the
    /// floor shows `bottom` and the ceiling `top`.
    VerticalGradient { bottom: Rgb, top: Rgb },
}

impl Texture {
    fn colors(&self) -> Vec<Rgb> {
        match self {
            Texture::Flat(c) => vec![*c],
            Texture::Checker { colors, .. } => colors.to_vec(),
            Texture::VerticalGradient { bottom, top } => vec![*bottom, *top],
        }
    }
}

/// Axis-aligned furniture box in room coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FurnitureBox {
    pub x_min: f64,
    pub x_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// Bottom and top heights above the floor.
    pub base: f64,
    pub top: f64,
    pub color: Rgb,
    pub class: String,
}

/// The four walls in the order stored in [`SceneSpec::walls`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallSide {
    PosZ,
    PosX,
    NegZ,
    NegX,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub half_extent_x: f64,
    pub half_extent_z: f64,
    /// Camera plan position relative to the room centre.
    pub camera_x: f64,
    pub camera_z: f64,
    /// Ceiling height above the camera; the floor is one unit below it.
    pub ceiling_height: f64,
    pub ceiling: Texture,
    pub floor: Texture,
    /// Indexed by [`WallSide`] as `+z, +x, −z, −x`.
    pub walls: [Texture; 4],
    pub furniture: Vec<FurnitureBox>,
    pub classes: Vec<String>,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let (sx, sz) = (self.half_extent_x, self.half_extent_z);
        if !(sx > 0.0 && sz > 0.0 && self.ceiling_height > 0.0) {
            return Err(Error::Config("room extents and ceiling height must be positive".into()));
        }
        if !(self.camera_x.abs() < sx && self.camera_z.abs() < sz) {
            return Err(Error::Config("camera must be strictly inside the room".into()));
        }
        if self.classes.len() > 255 {
            return Err(Error::Config("at most 255 classes fit an 8-bit mask".into()));
        }
        for name in STRUCTURE_CLASSES {
            if !self.classes.iter().any(|c| c == name) {
                return Err(Error::Config(format!("class vocabulary lacks `{name}`")));
            }
        }
        let room_h = 1.0 + self.ceiling_height;
        for (i, b) in self.furniture.iter().enumerate() {
            if !(b.x_min > -sx && b.x_max < sx && b.z_min > -sz && b.z_max < sz)
                || !(b.x_min < b.x_max && b.z_min < b.z_max)
                || !(b.base >= 0.0 && b.base < b.top && b.top < room_h)
            {
                return Err(Error::Config(format!("box {i} is not strictly inside the room")));
            }
            if !self.classes.contains(&b.class) {
                return Err(Error::Config(format!("box {i} has unknown class `{}`", b.class)));
            }
            let cam_in_plan = b.x_min <= self.camera_x
                && self.camera_x <= b.x_max
                && b.z_min <= self.camera_z
                && self.camera_z <= b.z_max;
            if cam_in_plan && b.base <= 1.0 && 1.0 <= b.top {
                return Err(Error::Config(format!("camera is inside box {i}")));
            }
            for (j, o) in self.furniture.iter().enumerate().skip(i + 1) {
                let plan_overlap = b.x_min < o.x_max && o.x_min < b.x_max && b.z_min < o.z_max && o.z_min < b.z_max;
                if plan_overlap && b.base < o.top && o.base < b.top {
                    return Err(Error::Config(format!("boxes {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Room corners relative to the camera.
    pub fn plan_corners(&self) -> [PlanPoint; 4] {
        let (sx, sz, cx, cz) = (self.half_extent_x, self.half_extent_z, self.camera_x, self.camera_z);
        [
            PlanPoint::new(sx - cx, sz - cz),
            PlanPoint::new(-sx - cx, sz - cz),
            PlanPoint::new(-sx - cx, -sz - cz),
            PlanPoint::new(sx - cx, -sz - cz),
        ]
    }

    /// Every color the renderer can emit for structure surfaces.
    pub fn structure_palette(&self) -> Vec<Rgb> {
        let mut out = self.ceiling.colors();
        out.extend(self.floor.colors());
        for w in &self.walls {
            out.extend(w.colors());
        }
        out
    }

    pub fn furniture_palette(&self) -> Vec<Rgb> {
        self.furniture.iter().map(|b| b.color).collect()
    }

    /// The same room scaled by `kx` along x and `kz` along z.
    pub fn scaled(&self, kx: f64, kz: f64) -> SceneSpec {
        let mut s = self.clone();
        s.half_extent_x *= kx;
        s.half_extent_z *= kz;
        s.camera_x *= kx;
        s.camera_z *= kz;
        for b in &mut s.furniture {
            b.x_min *= kx;
            b.x_max *= kx;
            b.z_min *= kz;
            b.z_max *= kz;
        }
        s
    }

    fn class_index(&self, name: &str) -> u8 {
        self.classes.iter().position(|c| c == name).expect("validated class") as u8
    }
}

/// Analytic layout of the scene's room.
pub fn scene_layout(spec: &SceneSpec, height: usize, width: usize) -> Result<Layout> {
    let corners = spec
        .plan_corners()
        .iter()
        .map(|&p| {
            let (col, floor) = project_corner(p, -1.0, height, width)?;
            let (_, ceil) = project_corner(p, spec.ceiling_height, height, width)?;
            Ok(Corner::new(col, ceil, floor))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Layout::new(corners))
}

#[derive(Debug, Clone, Copy)]
enum Hit {
    Ceiling,
    Floor,
    Wall(WallSide),
    Furniture(usize),
}

/// Entry distance of a ray from the origin into an axis-aligned box, if any.
fn slab_entry(dir: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> Option<f64> {
    let mut t_in = f64::NEG_INFINITY;
    let mut t_out = f64::INFINITY;
    for k in 0..3 {
        if dir[k] == 0.0 {
            if lo[k] > 0.0 || hi[k] < 0.0 {
                return None;
            }
            continue;
        }
        let (a, b) = (lo[k] / dir[k], hi[k] / dir[k]);
        t_in = t_in.max(a.min(b));
        t_out = t_out.min(a.max(b));
    }
    (t_in <= t_out && t_in > 0.0).then_some(t_in)
}

fn cast(spec: &SceneSpec, dir: [f64; 3]) -> (Hit, [f64; 3]) {
    let (sx, sz, cx, cz) = (spec.half_extent_x, spec.half_extent_z, spec.camera_x, spec.camera_z);
    let mut best = (f64::INFINITY, Hit::Floor);
    let mut consider = |t: f64, hit: Hit| {
        if t > 0.0 && t < best.0 {
            best = (t, hit);
        }
    };
    if dir[0] > 0.0 {
        consider((sx - cx) / dir[0], Hit::Wall(WallSide::PosX));
    } else if dir[0] < 0.0 {
        consider((-sx - cx) / dir[0], Hit::Wall(WallSide::NegX));
    }
    if dir[2] > 0.0 {
        consider((sz - cz) / dir[2], Hit::Wall(WallSide::PosZ));
    } else if dir[2] < 0.0 {
        consider((-sz - cz) / dir[2], Hit::Wall(WallSide::NegZ));
    }
    if dir[1] > 0.0 {
        consider(spec.ceiling_height / dir[1], Hit::Ceiling);
    } else if dir[1] < 0.0 {
        consider(-1.0 / dir[1], Hit::Floor);
    }
    for (i, b) in spec.furniture.iter().enumerate() {
        let lo = [b.x_min - cx, b.base - 1.0, b.z_min - cz];
        let hi = [b.x_max - cx, b.top - 1.0, b.z_max - cz];
        if let Some(t) = slab_entry(dir, lo, hi) {
            consider(t, Hit::Furniture(i));
        }
    }
    let t = best.0;
    (best.1, [t * dir[0], t * dir[1], t * dir[2]])
}

fn texture_color(tex: &Texture, a: f64, b: f64, height_frac: f64) -> Rgb {
    match tex {
        Texture::Flat(c) => *c,
        Texture::Checker { period, colors } => {
            let parity = ((a / period).floor() + (b / period).floor()).rem_euclid(2.0);
            colors[parity as usize]
        }
        Texture::VerticalGradient { bottom, top } => {
            let f = height_frac.clamp(0.0, 1.0);
            [0, 1, 2].map(|k| bottom[k] + (top[k] - bottom[k]) * f)
        }
    }
}

fn shade(spec: &SceneSpec, hit: Hit, p: [f64; 3]) -> (Rgb, u8) {
    let (wx, wz) = (p[0] + spec.camera_x, p[2] + spec.camera_z);
    let above_floor = p[1] + 1.0;
    let frac = above_floor / (1.0 + spec.ceiling_height);
    match hit {
        Hit::Ceiling => (texture_color(&spec.ceiling, wx, wz, 1.0), spec.class_index("ceiling")),
        Hit::Floor => (texture_color(&spec.floor, wx, wz, 0.0), spec.class_index("floor")),
        Hit::Wall(side) => {
            let along = match side {
                WallSide::PosZ | WallSide::NegZ => wx,
                WallSide::PosX | WallSide::NegX => wz,
            };
            (texture_color(&spec.walls[side as usize], along, above_floor, frac), spec.class_index("wall"))
        }
        Hit::Furniture(i) => {
            let b = &spec.furniture[i];
            (b.color, spec.class_index(&b.class))
        }
    }
}

/// Renders the scene at every pixel centre; the layout comes from projecting
/// the room corners analytically.
pub fn render_scene(spec: &SceneSpec, height: usize, width: usize) -> Result<Sample> {
    spec.validate()?;
    let mut image = Panorama::filled(height, width, [0.0; 3]);
    let mut labels = vec![0u8; height * width];
    image
        .data_mut()
        .par_chunks_mut(width * 3)
        .zip(labels.par_chunks_mut(width))
        .enumerate()
        .for_each(|(r, (img_row, mask_row))| {
            let lat = row_to_lat(r as f64, height);
            for c in 0..width {
                let dir = direction(col_to_lon(c as f64, width), lat);
                let (hit, p) = cast(spec, dir);
                let (color, label) = shade(spec, hit, p);
                img_row[c * 3..c * 3 + 3].copy_from_slice(&color);
                mask_row[c] = label;
            }
        });
    let mask = SemanticMask::new(height, width, labels, spec.classes.clone())?;
    Sample::new(image, mask, scene_layout(spec, height, width)?)
}

/// Ranges for [`random_scene`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSceneParams {
    pub half_extent: (f64, f64),
    /// Maximum camera offset as a fraction of the half extent.
    pub camera_offset: f64,
    pub ceiling_height: (f64, f64),
    pub boxes: (usize, usize),
    pub box_size: (f64, f64),
    /// Range of box top heights above the floor.
    pub box_height: (f64, f64),
    /// One distinct class per box is drawn from this list.
    pub furniture_classes: Vec<String>,
}

impl Default for RandomSceneParams {
    fn default() -> Self {
        Self {
            half_extent: (1.6, 3.2),
            camera_offset: 0.35,
            ceiling_height: (1.2, 1.9),
            boxes: (0, 4),
            box_size: (0.4, 1.1),
            box_height: (0.35, 1.6),
            furniture_classes: ["bed", "table", "cabinet", "sofa"].iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl RandomSceneParams {
    fn validate(&self) -> Result<()> {
        let range_ok = |(lo, hi): (f64, f64)| lo > 0.0 && lo <= hi && hi.is_finite();
        if !range_ok(self.half_extent) || !range_ok(self.ceiling_height) || !range_ok(self.box_size) || !range_ok(self.box_height) {
            return Err(Error::Config("scene ranges must be positive with min <= max".into()));
        }
        if !(0.0..0.95).contains(&self.camera_offset) {
            return Err(Error::Config("camera offset fraction must lie in [0, 0.95)".into()));
        }
        if self.boxes.0 > self.boxes.1 || self.boxes.1 > self.furniture_classes.len() {
            return Err(Error::Config(format!(
                "box count range {:?} needs min <= max <= {} furniture classes",
                self.boxes,
                self.furniture_classes.len()
            )));
        }
        if self.box_height.1 >= 1.0 + self.ceiling_height.0 {
            return Err(Error::Config("boxes must stay below the lowest ceiling".into()));
        }
        if self.boxes.1 > 0 && self.box_size.0 >= 2.0 * self.half_extent.0 - 0.1 {
            return Err(Error::Config("boxes cannot fit in the smallest room".into()));
        }
        Ok(())
    }
}

/// Distinct 8-bit-representable colors, pairwise at least `gap / 255` apart
/// in every case on some channel.
fn distinct_colors(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rgb> {
    const GAP: i32 = 40;
    let mut chosen: Vec<[i32; 3]> = Vec::with_capacity(n);
    while chosen.len() < n {
        let c = [0; 3].map(|_: i32| rng.random_range(16..=240));
        if chosen.iter().all(|o| (0..3).any(|k| (o[k] - c[k]).abs() >= GAP)) {
            chosen.push(c);
        }
    }
    chosen.into_iter().map(|c| c.map(|v| v as f64 / 255.0)).collect()
}

/// Seed of the `index`-th scene of a seeded collection.
pub fn scene_seed(seed: u64, index: u64) -> u64 {
    crate::pipeline::splitmix64(seed ^ crate::pipeline::splitmix64(index))
}

/// Seeded random cuboid room with flat, mutually distinct colors and up to
/// `params.boxes.1` non-overlapping boxes.
pub fn random_scene(seed: u64, params: &RandomSceneParams) -> Result<SceneSpec> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = |(lo, hi): (f64, f64), rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.random_range(lo..hi) };
    let sx = uniform(params.half_extent, &mut rng);
    let sz = uniform(params.half_extent, &mut rng);
    let off = params.camera_offset;
    let cx = if off > 0.0 { rng.random_range(-off..off) * sx } else { 0.0 };
    let cz = if off > 0.0 { rng.random_range(-off..off) * sz } else { 0.0 };
    let ceiling_height = uniform(params.ceiling_height, &mut rng);
    let n_boxes = rng.random_range(params.boxes.0..=params.boxes.1);

    let mut classes = params.furniture_classes.clone();
    classes.shuffle(&mut rng);

    const WALL_GAP: f64 = 0.02;
    const BOX_GAP: f64 = 0.05;
    const CAMERA_CLEARANCE: f64 = 0.3;
    let mut boxes: Vec<FurnitureBox> = Vec::new();
    for class in classes.iter().take(n_boxes) {
        for _attempt in 0..100 {
            let wx = uniform(params.box_size, &mut rng).min(2.0 * sx - 3.0 * WALL_GAP);
            let wz = uniform(params.box_size, &mut rng).min(2.0 * sz - 3.0 * WALL_GAP);
            let x_min = rng.random_range(-sx + WALL_GAP..sx - WALL_GAP - wx);
            let z_min = rng.random_range(-sz + WALL_GAP..sz - WALL_GAP - wz);
            let (x_max, z_max) = (x_min + wx, z_min + wz);
            let near_camera = x_min - CAMERA_CLEARANCE < cx
                && cx < x_max + CAMERA_CLEARANCE
                && z_min - CAMERA_CLEARANCE < cz
                && cz < z_max + CAMERA_CLEARANCE;
            let collides = boxes.iter().any(|o| {
                x_min - BOX_GAP < o.x_max && o.x_min < x_max + BOX_GAP && z_min - BOX_GAP < o.z_max && o.z_min < z_max + BOX_GAP
            });
            if near_camera || collides {
                continue;
            }
            let top = uniform(params.box_height, &mut rng);
            boxes.push(FurnitureBox {
                x_min,
                x_max,
                z_min,
                z_max,
                base: 0.0,
                top,
                color: [0.0; 3],
                class: class.clone(),
            });
            break;
        }
    }

    let colors = distinct_colors(&mut rng, 6 + boxes.len());
    for (b, c) in boxes.iter_mut().zip(&colors[6..]) {
        b.color = *c;
    }
    let mut vocab: Vec<String> = STRUCTURE_CLASSES.iter().map(|s| s.to_string()).collect();
    vocab.extend(params.furniture_classes.iter().cloned());

    let spec = SceneSpec {
        half_extent_x: sx,
        half_extent_z: sz,
        camera_x: cx,
        camera_z: cz,
        ceiling_height,
        ceiling: Texture::Flat(colors[0]),
        floor: Texture::Flat(colors[1]),
        walls: [
            Texture::Flat(colors[2]),
            Texture::Flat(colors[3]),
            Texture::Flat(colors[4]),
            Texture::Flat(colors[5]),
        ],
        furniture: boxes,
        classes: vocab,
    };
    spec.validate()?;
    Ok(spec)
}
