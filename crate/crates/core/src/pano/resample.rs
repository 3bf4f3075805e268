use super::{Panorama, Rgb, SemanticMask};
use crate::error::{Error, Result};

/// The four lattice neighbours of `(x, y)` with their bilinear weights.
/// Columns wrap modulo `width`; rows clamp to `[0, height − 1]`.
#[inline]
fn footprint(x: f64, y: f64, width: usize, height: usize) -> [(usize, usize, f64); 4] {
    let y = y.clamp(0.0, (height - 1) as f64);
    let x0 = x.floor();
    let fx = x - x0;
    let y0 = y.floor();
    let fy = y - y0;
    let w = width as i64;
    let c0 = (x0 as i64).rem_euclid(w) as usize;
    let c1 = (c0 + 1) % width;
    let r0 = y0 as usize;
    let r1 = (r0 + 1).min(height - 1);
    [
        (c0, r0, (1.0 - fx) * (1.0 - fy)),
        (c1, r0, fx * (1.0 - fy)),
        (c0, r1, (1.0 - fx) * fy),
        (c1, r1, fx * fy),
    ]
}

#[inline]
fn check(x: f64, y: f64) -> Result<()> {
    if x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidCoordinate { x, y })
    }
}

/// Weighted mean of colors. When every contributing color is identical the
/// color is returned unchanged, so flat regions survive resampling bit-exact.
#[inline]
fn blend(taps: &[(Rgb, f64)]) -> Option<Rgb> {
    let mut total = 0.0;
    let mut acc = [0.0; 3];
    let mut first: Option<Rgb> = None;
    let mut uniform = true;
    for &(color, w) in taps {
        if w <= 0.0 {
            continue;
        }
        match first {
            None => first = Some(color),
            Some(f) if f != color => uniform = false,
            _ => {}
        }
        total += w;
        for k in 0..3 {
            acc[k] += w * color[k];
        }
    }
    let first = first?;
    if uniform {
        return Some(first);
    }
    Some([acc[0] / total, acc[1] / total, acc[2] / total])
}

/// Bilinear sample with circular columns and clamped rows.
pub fn sample_bilinear(img: &Panorama, x: f64, y: f64) -> Result<Rgb> {
    check(x, y)?;
    let fp = footprint(x, y, img.width(), img.height());
    let taps = fp.map(|(c, r, w)| (img.get(c, r), w));
    // at least one weight is positive for finite coordinates
    Ok(blend(&taps).expect("bilinear footprint has positive weight"))
}

/// Bilinear sample restricted to lattice neighbours accepted by `keep`; the
/// accepted weights are renormalized. Returns `None` when no neighbour with
/// positive weight is accepted.
pub fn sample_bilinear_where(
    img: &Panorama,
    x: f64,
    y: f64,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Option<Rgb>> {
    check(x, y)?;
    let fp = footprint(x, y, img.width(), img.height());
    let mut taps = [([0.0; 3], 0.0); 4];
    for (slot, (c, r, w)) in taps.iter_mut().zip(fp) {
        if keep(c, r) {
            *slot = (img.get(c, r), w);
        }
    }
    Ok(blend(&taps))
}

/// Lattice position nearest to `(x, y)` (ties round up), wrapped and clamped.
#[inline]
pub(crate) fn nearest_index(x: f64, y: f64, width: usize, height: usize) -> (usize, usize) {
    let c = ((x + 0.5).floor() as i64).rem_euclid(width as i64) as usize;
    let r = (y + 0.5).floor().clamp(0.0, (height - 1) as f64) as usize;
    (c, r)
}

/// Nearest-neighbour label lookup; never invents a label.
pub fn sample_nearest(mask: &SemanticMask, x: f64, y: f64) -> Result<u8> {
    check(x, y)?;
    let (c, r) = nearest_index(x, y, mask.width(), mask.height());
    Ok(mask.get(c, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(h: usize) -> Panorama {
        Panorama::from_fn(h, 2 * h, |c, r| [c as f64 * 0.01, r as f64 * 0.02, 0.5])
    }

    #[test]
    fn lattice_points_are_exact() {
        let img = ramp(8);
        for r in 0..8 {
            for c in 0..16 {
                assert_eq!(sample_bilinear(&img, c as f64, r as f64).unwrap(), img.get(c, r));
            }
        }
    }

    #[test]
    fn seam_midpoint_averages_edge_columns() {
        let img = ramp(8);
        let v = sample_bilinear(&img, 15.5, 2.0).unwrap();
        let a = img.get(15, 2);
        let b = img.get(0, 2);
        for k in 0..3 {
            assert!((v[k] - 0.5 * (a[k] + b[k])).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_image_is_constant() {
        let img = Panorama::filled(8, 16, [0.3, 0.6, 0.9]);
        for &(x, y) in &[(0.1, 0.2), (15.7, 6.9), (-3.3, 100.0), (7.77, -2.0)] {
            assert_eq!(sample_bilinear(&img, x, y).unwrap(), [0.3, 0.6, 0.9]);
        }
    }

    #[test]
    fn rows_clamp_to_edges() {
        let img = ramp(8);
        assert_eq!(sample_bilinear(&img, 3.0, -5.0).unwrap(), img.get(3, 0));
        assert_eq!(sample_bilinear(&img, 3.0, 50.0).unwrap(), img.get(3, 7));
    }

    #[test]
    fn non_finite_coordinates_are_rejected() {
        let img = ramp(8);
        assert!(matches!(
            sample_bilinear(&img, f64::NAN, 1.0),
            Err(Error::InvalidCoordinate { .. })
        ));
        let mask = SemanticMask::filled(8, 16, 0, vec!["a".into()]);
        assert!(sample_nearest(&mask, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn nearest_rounds_half_up() {
        let labels = (0..8 * 16).map(|i| (i % 16) as u8).collect();
        let names = (0..16).map(|i| i.to_string()).collect();
        let mask = SemanticMask::new(8, 16, labels, names).unwrap();
        assert_eq!(sample_nearest(&mask, 4.0, 3.0).unwrap(), 4);
        assert_eq!(sample_nearest(&mask, 4.49, 3.0).unwrap(), 4);
        assert_eq!(sample_nearest(&mask, 4.5, 3.0).unwrap(), 5);
        assert_eq!(sample_nearest(&mask, 15.6, 3.0).unwrap(), 0);
        assert_eq!(sample_nearest(&mask, -0.6, 3.0).unwrap(), 15);
    }

    #[test]
    fn restricted_sampling_skips_rejected_taps() {
        let img = Panorama::from_fn(8, 16, |c, _| if c < 4 { [1.0; 3] } else { [0.0; 3] });
        let v = sample_bilinear_where(&img, 3.5, 2.0, |c, _| c < 4).unwrap();
        assert_eq!(v, Some([1.0; 3]));
        let none = sample_bilinear_where(&img, 3.0, 2.0, |c, _| c >= 4).unwrap();
        assert_eq!(none, None);
    }

    proptest! {
        #[test]
        fn ramp_is_reproduced(x in 0.0f64..14.999, y in 0.0f64..6.999) {
            let img = ramp(8);
            let v = sample_bilinear(&img, x, y).unwrap();
            prop_assert!((v[0] - x * 0.01).abs() <= 1e-9);
            prop_assert!((v[1] - y * 0.02).abs() <= 1e-9);
        }

        #[test]
        fn nearest_never_invents_labels(x in -50.0f64..50.0, y in -5.0f64..15.0) {
            let labels = (0..8 * 16).map(|i| if (i / 16) < 4 { 2 } else { 5 }).collect();
            let names = (0..6).map(|i| i.to_string()).collect();
            let mask = SemanticMask::new(8, 16, labels, names).unwrap();
            let l = sample_nearest(&mask, x, y).unwrap();
            prop_assert!(l == 2 || l == 5);
        }
    }
}
