//! Equirectangular pixel conventions.
//!
//! Pixel `(c, r)` has its center at continuous position `(c + 0.5, r + 0.5)`.
//! Longitude runs from −π at the left edge to π at the right edge, latitude
//! from π/2 at the top edge to −π/2 at the bottom. Longitude 0 looks along
//! +z, +x is at longitude π/2 and +y is up.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Longitude of a (possibly fractional) column index.
#[inline]
pub fn col_to_lon(col: f64, width: usize) -> f64 {
    TAU * (col + 0.5) / width as f64 - PI
}

#[inline]
pub fn lon_to_col(lon: f64, width: usize) -> f64 {
    (lon + PI) * width as f64 / TAU - 0.5
}

/// Latitude of a (possibly fractional) row index.
#[inline]
pub fn row_to_lat(row: f64, height: usize) -> f64 {
    FRAC_PI_2 - PI * (row + 0.5) / height as f64
}

#[inline]
pub fn lat_to_row(lat: f64, height: usize) -> f64 {
    (FRAC_PI_2 - lat) * height as f64 / PI - 0.5
}

/// Unit viewing direction `(x, y, z)` for a longitude/latitude pair.
#[inline]
pub fn direction(lon: f64, lat: f64) -> [f64; 3] {
    let (sv, cv) = lat.sin_cos();
    let (su, cu) = lon.sin_cos();
    [cv * su, sv, cv * cu]
}

/// Wraps a column into `[0, width)`.
#[inline]
pub fn wrap_col(col: f64, width: usize) -> f64 {
    let w = width as f64;
    let c = col.rem_euclid(w);
    // rem_euclid can round up to exactly w for tiny negative inputs
    if c >= w {
        0.0
    } else {
        c
    }
}

/// Wraps a longitude into `(−π, π]`.
#[inline]
pub fn wrap_lon(lon: f64) -> f64 {
    let l = (lon + PI).rem_euclid(TAU) - PI;
    if l <= -PI {
        l + TAU
    } else {
        l
    }
}
