use super::manifest::SampleEntry;
use crate::error::{Error, Result};
use crate::pano::{Corner, Layout};
use std::fmt::Write as _;
use std::path::Path;

fn parse_points(text: &str) -> Result<Vec<(f64, f64)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Adapter(format!("line {}: {e}", n + 1)))?;
            match nums[..] {
                [x, y] if x.is_finite() && y.is_finite() => Ok((x, y)),
                _ => Err(Error::Adapter(format!("line {}: expected two numbers `x y`", n + 1))),
            }
        })
        .collect()
}

/// Parses interleaved `x y` lines: each consecutive pair is one corner's
/// ceiling point followed by its floor point.
pub fn parse_corner_txt(text: &str) -> Result<Layout> {
    let pts = parse_points(text)?;
    if pts.len() % 2 != 0 {
        return Err(Error::Adapter(format!("{} points; corner files need an even count", pts.len())));
    }
    let t = pts.len() / 2;
    let mut corners = Vec::with_capacity(t);
    for (i, pair) in pts.chunks(2).enumerate() {
        let ((xc, yc), (xf, yf)) = (pair[0], pair[1]);
        if xc != xf {
            let blocked = t > 0 && (0..t).all(|k| pts[k].0 == pts[k + t].0);
            let hint = if blocked {
                "; the file looks like all ceiling points followed by all floor points, reorder it to interleaved pairs"
            } else {
                ""
            };
            return Err(Error::Adapter(format!("corner {i}: x {xc} and {xf} differ{hint}")));
        }
        if yf <= yc {
            return Err(Error::Adapter(format!("corner {i}: floor row {yf} is not below ceiling row {yc}")));
        }
        corners.push(Corner::new(xc, yc, yf));
    }
    let layout = Layout::new(corners);
    if layout.corners().windows(2).any(|p| p[0].column >= p[1].column) {
        return Err(Error::Adapter("corner columns are not distinct".into()));
    }
    Ok(layout)
}

/// Builds a manifest entry from a corner file; image and mask paths are stored
/// as given.
pub fn adapt_corner_txt(txt: &Path, image: &str, mask: &str, id: &str) -> Result<SampleEntry> {
    let text = std::fs::read_to_string(txt).map_err(|source| Error::Io {
        path: txt.display().to_string(),
        source,
    })?;
    let layout = parse_corner_txt(&text).map_err(|e| match e {
        Error::Adapter(m) => Error::Adapter(format!("{}: {m}", txt.display())),
        other => other,
    })?;
    Ok(SampleEntry {
        id: id.to_string(),
        image: image.to_string(),
        mask: mask.to_string(),
        layout: SampleEntry::layout_rows(&layout),
        sources: None,
    })
}

/// Interleaved corner text; values use the shortest exact decimal form.
pub fn format_corner_txt(layout: &Layout) -> String {
    let mut out = String::new();
    for c in layout.corners() {
        let _ = writeln!(out, "{} {}", c.column, c.ceil_row);
        let _ = writeln!(out, "{} {}", c.column, c.floor_row);
    }
    out
}

pub fn write_corner_txt(layout: &Layout, path: &Path) -> Result<()> {
    std::fs::write(path, format_corner_txt(layout)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
