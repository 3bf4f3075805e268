//! Panorama stretching: scale the room by `kx` along x and `kz` along z and
//! reproject. A viewing direction `(x, y, z)` becomes `(kx·x, y, kz·z)`.

use crate::error::{Error, Result};
use crate::pano::equirect::{col_to_lon, lat_to_row, lon_to_col, row_to_lat, wrap_col};
use crate::pano::{sample_bilinear, sample_nearest, Corner, Layout, Panorama, Sample, SemanticMask};
use rayon::prelude::*;

fn check_factors(kx: f64, kz: f64) -> Result<()> {
    if kx > 0.0 && kz > 0.0 && kx.is_finite() && kz.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidFactor { kx, kz })
    }
}

/// Maps a viewing direction through the room scaling `(kx, kz)`.
/// The inverse is the same map with `(1/kx, 1/kz)`.
pub fn panostretch_dir(lon: f64, lat: f64, kx: f64, kz: f64) -> Result<(f64, f64)> {
    check_factors(kx, kz)?;
    Ok(stretch_unchecked(lon, lat, kx, kz))
}

#[inline]
fn stretch_unchecked(lon: f64, lat: f64, kx: f64, kz: f64) -> (f64, f64) {
    let (su, cu) = lon.sin_cos();
    let x = kx * su;
    let z = kz * cu;
    let (sv, cv) = lat.sin_cos();
    (x.atan2(z), sv.atan2(cv * x.hypot(z)))
}

/// Moves every corner to where the scaled room puts it.
pub fn panostretch_layout(layout: &Layout, kx: f64, kz: f64, height: usize, width: usize) -> Result<Layout> {
    check_factors(kx, kz)?;
    Ok(Layout::new(
        layout
            .corners()
            .iter()
            .map(|c| {
                let lon = col_to_lon(c.column, width);
                let (lon2, ceil) = stretch_unchecked(lon, row_to_lat(c.ceil_row, height), kx, kz);
                let (_, floor) = stretch_unchecked(lon, row_to_lat(c.floor_row, height), kx, kz);
                Corner::new(
                    wrap_col(lon_to_col(lon2, width), width),
                    lat_to_row(ceil, height),
                    lat_to_row(floor, height),
                )
            })
            .collect(),
    ))
}

/// Stretches a whole sample: image bilinear, mask nearest, layout forward
/// transformed.
pub fn panostretch_image(sample: &Sample, kx: f64, kz: f64) -> Result<Sample> {
    check_factors(kx, kz)?;
    let (h, w) = (sample.height(), sample.width());
    let (ix, iz) = (1.0 / kx, 1.0 / kz);

    // the source longitude and the latitude scale depend on the column only
    let columns: Vec<(f64, f64)> = (0..w)
        .map(|c| {
            let (su, cu) = col_to_lon(c as f64, w).sin_cos();
            let (x, z) = (ix * su, iz * cu);
            (lon_to_col(x.atan2(z), w), x.hypot(z))
        })
        .collect();

    let mut image = Panorama::filled(h, w, [0.0; 3]);
    let mut labels = vec![0u8; h * w];
    image
        .data_mut()
        .par_chunks_mut(w * 3)
        .zip(labels.par_chunks_mut(w))
        .enumerate()
        .try_for_each(|(r, (img_row, mask_row))| -> Result<()> {
            let (sv, cv) = row_to_lat(r as f64, h).sin_cos();
            for (c, &(src_col, scale)) in columns.iter().enumerate() {
                let src_row = lat_to_row(sv.atan2(cv * scale), h);
                let px = sample_bilinear(&sample.image, src_col, src_row)?;
                img_row[c * 3..c * 3 + 3].copy_from_slice(&px);
                mask_row[c] = sample_nearest(&sample.mask, src_col, src_row)?;
            }
            Ok(())
        })?;

    let mask = SemanticMask::new(h, w, labels, sample.mask.classes().to_vec())?;
    let layout = panostretch_layout(&sample.layout, kx, kz, h, w)?;
    Sample::new(image, mask, layout)
}
