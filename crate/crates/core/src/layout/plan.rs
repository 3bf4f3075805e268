use crate::error::{Error, Result};
use crate::pano::equirect::{col_to_lon, lat_to_row, lon_to_col, row_to_lat, wrap_col};
use crate::pano::Layout;
use std::f64::consts::TAU;

/// Relative disagreement between per-corner ceiling heights at which
/// [`layout_to_plan`] gives up.
pub const MAX_CEILING_DISAGREEMENT: f64 = 0.05;

/// Tolerance on the segment parameter when intersecting viewing rays with
/// walls.
const SEGMENT_TOL: f64 = 1e-6;

/// A floor-plan point relative to the camera, in room units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanPoint {
    pub x: f64,
    pub z: f64,
}

impl PlanPoint {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn lon(self) -> f64 {
        self.x.atan2(self.z)
    }

    fn cross(self, o: PlanPoint) -> f64 {
        self.x * o.z - self.z * o.x
    }

    pub fn lerp(self, o: PlanPoint, s: f64) -> PlanPoint {
        PlanPoint::new(self.x + (o.x - self.x) * s, self.z + (o.z - self.z) * s)
    }
}

/// Straight wall segment in the floor plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: PlanPoint,
    pub end: PlanPoint,
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.end.x - self.start.x).hypot(self.end.z - self.start.z)
    }

    /// Intersects the viewing ray at longitude `lon` with this segment.
    /// Returns `(s, t)`: the fraction along the segment and the distance along
    /// the ray. `s` is clamped to `[0, 1]` once it is within tolerance.
    pub fn intersect_ray(&self, lon: f64) -> Result<(f64, f64)> {
        let dir = PlanPoint::new(lon.sin(), lon.cos());
        let e = PlanPoint::new(self.end.x - self.start.x, self.end.z - self.start.z);
        let denom = dir.cross(e);
        if denom.abs() < 1e-12 * e.norm().max(1e-300) {
            return Err(Error::Geometry(format!(
                "ray at longitude {lon:.6} is parallel to a wall"
            )));
        }
        let t = self.start.cross(e) / denom;
        let s = self.start.cross(dir) / denom;
        if !(t > 0.0) || !(-SEGMENT_TOL..=1.0 + SEGMENT_TOL).contains(&s) {
            return Err(Error::Geometry(format!(
                "ray at longitude {lon:.6} misses wall (s = {s:.3e}, t = {t:.3e})"
            )));
        }
        Ok((s.clamp(0.0, 1.0), t))
    }
}

/// Floor plan of a room seen from a camera one unit above the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanModel {
    corners: Vec<PlanPoint>,
    corner_lons: Vec<f64>,
    ceiling_height: f64,
}

impl PlanModel {
    /// Builds a plan from corner points, ordering them by panorama column.
    pub fn new(corners: Vec<PlanPoint>, ceiling_height: f64, width: usize) -> Result<Self> {
        if corners.len() < 3 {
            return Err(Error::DegenerateLayout(format!(
                "plan has {} corners, need at least 3",
                corners.len()
            )));
        }
        if !(ceiling_height > 0.0 && ceiling_height.is_finite()) {
            return Err(Error::DegenerateLayout(format!(
                "ceiling height {ceiling_height} must be positive"
            )));
        }
        let mut keyed = Vec::with_capacity(corners.len());
        for p in corners {
            if !(p.norm() > 0.0) {
                return Err(Error::DegeneratePoint);
            }
            keyed.push((wrap_col(lon_to_col(p.lon(), width), width), p));
        }
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            corner_lons: keyed.iter().map(|(_, p)| p.lon()).collect(),
            corners: keyed.into_iter().map(|(_, p)| p).collect(),
            ceiling_height,
        })
    }

    pub fn corners(&self) -> &[PlanPoint] {
        &self.corners
    }

    pub fn corner_lons(&self) -> &[f64] {
        &self.corner_lons
    }

    pub fn ceiling_height(&self) -> f64 {
        self.ceiling_height
    }

    pub fn wall_count(&self) -> usize {
        self.corners.len()
    }

    pub fn wall(&self, i: usize) -> Segment {
        let n = self.corners.len();
        Segment {
            start: self.corners[i],
            end: self.corners[(i + 1) % n],
        }
    }

    pub fn wall_segments(&self) -> Vec<Segment> {
        (0..self.wall_count()).map(|i| self.wall(i)).collect()
    }

    /// Index of the wall whose azimuth range `[lon_i, lon_{i+1})` holds `lon`.
    pub fn wall_at_lon(&self, lon: f64) -> usize {
        let n = self.corner_lons.len();
        let mut best = (f64::INFINITY, 0);
        for i in 0..n {
            let start = self.corner_lons[i];
            let span = (self.corner_lons[(i + 1) % n] - start).rem_euclid(TAU);
            let offset = (lon - start).rem_euclid(TAU);
            if offset < span {
                return i;
            }
            let miss = (offset - span).min(TAU - offset);
            if miss < best.0 {
                best = (miss, i);
            }
        }
        best.1
    }

    /// Horizontal distance from the camera to wall `wall` along longitude
    /// `lon`.
    pub fn distance_on_wall(&self, wall: usize, lon: f64) -> Result<f64> {
        self.wall(wall)
            .intersect_ray(lon)
            .map(|(_, t)| t)
            .map_err(|e| Error::UnsupportedLayout(format!("wall {wall}: {e}")))
    }

    /// `(ceil_row, floor_row)` of the boundary curves at longitude `lon`.
    pub fn boundary_rows_at_lon(&self, lon: f64, height: usize) -> Result<(f64, f64)> {
        let wall = self.wall_at_lon(lon);
        self.boundary_rows_on_wall(wall, lon, height)
    }

    pub fn boundary_rows_on_wall(&self, wall: usize, lon: f64, height: usize) -> Result<(f64, f64)> {
        let d = self.distance_on_wall(wall, lon)?;
        Ok(rows_for_distance(d, self.ceiling_height, height))
    }

    pub fn boundary_rows_at_col(&self, col: f64, height: usize, width: usize) -> Result<(f64, f64)> {
        self.boundary_rows_at_lon(col_to_lon(col, width), height)
    }
}

#[inline]
fn rows_for_distance(d: f64, ceiling_height: f64, height: usize) -> (f64, f64) {
    let floor = lat_to_row(-(1.0 / d).atan(), height);
    let ceil = lat_to_row((ceiling_height / d).atan(), height);
    (ceil, floor)
}

/// Per-column ceiling-wall and floor-wall boundary rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMap {
    pub ceil_rows: Vec<f64>,
    pub floor_rows: Vec<f64>,
}

impl BoundaryMap {
    pub fn width(&self) -> usize {
        self.ceil_rows.len()
    }
}

/// Ceiling height implied by each corner under the unit camera height.
pub fn corner_ceiling_heights(layout: &Layout, height: usize) -> Result<Vec<f64>> {
    layout
        .corners()
        .iter()
        .enumerate()
        .map(|(i, c)| lift_corner(i, c.ceil_row, c.floor_row, height).map(|(_, hc)| hc))
        .collect()
}

fn lift_corner(i: usize, ceil_row: f64, floor_row: f64, height: usize) -> Result<(f64, f64)> {
    let v_floor = row_to_lat(floor_row, height);
    if !(v_floor < 0.0) {
        return Err(Error::DegenerateLayout(format!(
            "corner {i}: floor row {floor_row} is not below the horizon"
        )));
    }
    let v_ceil = row_to_lat(ceil_row, height);
    if !(v_ceil > 0.0) {
        return Err(Error::DegenerateLayout(format!(
            "corner {i}: ceiling row {ceil_row} is not above the horizon"
        )));
    }
    let d = 1.0 / (-v_floor).tan();
    Ok((d, d * v_ceil.tan()))
}

/// Lifts a layout to a floor plan with the camera one unit above the floor.
/// The ceiling height is the median of the per-corner estimates.
pub fn layout_to_plan(layout: &Layout, height: usize, width: usize) -> Result<PlanModel> {
    let corners = layout.corners();
    if corners.len() < 3 {
        return Err(Error::DegenerateLayout(format!(
            "layout has {} corners, need at least 3",
            corners.len()
        )));
    }
    let mut points = Vec::with_capacity(corners.len());
    let mut lons = Vec::with_capacity(corners.len());
    let mut heights = Vec::with_capacity(corners.len());
    for (i, c) in corners.iter().enumerate() {
        let (d, hc) = lift_corner(i, c.ceil_row, c.floor_row, height)?;
        let lon = col_to_lon(c.column, width);
        points.push(PlanPoint::new(d * lon.sin(), d * lon.cos()));
        lons.push(lon);
        heights.push(hc);
    }
    let hc = crate::pano::median_of(&heights);
    for (i, h) in heights.iter().enumerate() {
        if (h - hc).abs() / hc > MAX_CEILING_DISAGREEMENT {
            return Err(Error::InconsistentLayout(format!(
                "corner {i} implies ceiling height {h:.4} but the median is {hc:.4}"
            )));
        }
    }
    Ok(PlanModel {
        corners: points,
        corner_lons: lons,
        ceiling_height: hc,
    })
}

/// Rasterizes the ceiling and floor boundary curves at every pixel column.
pub fn plan_to_boundaries(plan: &PlanModel, height: usize, width: usize) -> Result<BoundaryMap> {
    let mut ceil_rows = Vec::with_capacity(width);
    let mut floor_rows = Vec::with_capacity(width);
    for c in 0..width {
        let (a, b) = plan.boundary_rows_at_col(c as f64, height, width)?;
        ceil_rows.push(a);
        floor_rows.push(b);
    }
    Ok(BoundaryMap {
        ceil_rows,
        floor_rows,
    })
}

/// Projects a plan point at `height` above the camera to `(col, row)`.
pub fn project_corner(p: PlanPoint, height: f64, img_height: usize, width: usize) -> Result<(f64, f64)> {
    let r = p.norm();
    if !(r > 0.0) {
        return Err(Error::DegeneratePoint);
    }
    let lon = p.lon();
    let lat = (height / r).atan();
    Ok((wrap_col(lon_to_col(lon, width), width), lat_to_row(lat, img_height)))
}
