use crate::error::{Error, Result};
use crate::furniture::foreground_table;
use crate::layout::{column_owners, layout_to_plan};
use crate::pano::equirect::col_to_lon;
use crate::pano::{Layout, Sample};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Ceiling,
    Floor,
    Wall(usize),
    Others,
}

impl Region {
    /// Dense index: ceiling 0, floor 1, walls `2..2+T`, others `2+T`.
    pub fn code(self, wall_count: usize) -> u16 {
        match self {
            Region::Ceiling => 0,
            Region::Floor => 1,
            Region::Wall(i) => 2 + i as u16,
            Region::Others => 2 + wall_count as u16,
        }
    }

    pub fn from_code(code: u16, wall_count: usize) -> Region {
        match code {
            0 => Region::Ceiling,
            1 => Region::Floor,
            c if (c as usize) < 2 + wall_count => Region::Wall(c as usize - 2),
            _ => Region::Others,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Ceiling => f.write_str("ceiling"),
            Region::Floor => f.write_str("floor"),
            Region::Wall(i) => write!(f, "wall_{i}"),
            Region::Others => f.write_str("others"),
        }
    }
}

/// Per-pixel region labels for one layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    height: usize,
    width: usize,
    wall_count: usize,
    codes: Vec<u16>,
}

impl RegionMask {
    pub fn new(height: usize, width: usize, wall_count: usize, codes: Vec<u16>) -> Result<Self> {
        if codes.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "region buffer has {} labels, expected {height}x{width}",
                codes.len()
            )));
        }
        let others = Region::Others.code(wall_count);
        if let Some(bad) = codes.iter().find(|&&c| c > others) {
            return Err(Error::Config(format!("region code {bad} exceeds {others}")));
        }
        Ok(Self {
            height,
            width,
            wall_count,
            codes,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn wall_count(&self) -> usize {
        self.wall_count
    }

    /// Number of background regions (ceiling, floor and walls).
    pub fn background_regions(&self) -> usize {
        self.wall_count + 2
    }

    #[inline]
    pub fn code(&self, col: usize, row: usize) -> u16 {
        self.codes[row * self.width + col]
    }

    pub fn get(&self, col: usize, row: usize) -> Region {
        Region::from_code(self.code(col, row), self.wall_count)
    }

    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    pub fn count(&self, region: Region) -> usize {
        let code = region.code(self.wall_count);
        self.codes.iter().filter(|&&c| c == code).count()
    }
}

/// Rasterizes a layout: rows above the ceiling boundary are ceiling, rows
/// below the floor boundary are floor, the rest belong to the column's wall.
pub fn build_structure_mask(layout: &Layout, height: usize, width: usize) -> Result<RegionMask> {
    let plan = layout_to_plan(layout, height, width)?;
    let owners = column_owners(layout, width)?;
    let t = layout.wall_count();
    let mut codes = vec![0u16; height * width];
    for (c, &wall) in owners.iter().enumerate() {
        let (a, b) = plan.boundary_rows_on_wall(wall, col_to_lon(c as f64, width), height)?;
        let wall_code = Region::Wall(wall).code(t);
        for r in 0..height {
            let rf = r as f64;
            codes[r * width + c] = if rf < a {
                0
            } else if rf > b {
                1
            } else {
                wall_code
            };
        }
    }
    Ok(RegionMask {
        height,
        width,
        wall_count: t,
        codes,
    })
}

/// Structure mask of the style sample with every pixel whose semantic class
/// is in `others_classes` relabeled [`Region::Others`].
pub fn build_reference_mask(style: &Sample, others_classes: &[String]) -> Result<RegionMask> {
    let table = foreground_table(others_classes, style.mask.classes())?;
    let mut mask = build_structure_mask(&style.layout, style.height(), style.width())?;
    if (mask.height, mask.width) != (style.mask.height(), style.mask.width()) {
        return Err(Error::DimensionMismatch("style mask does not match its image".into()));
    }
    let others = Region::Others.code(mask.wall_count);
    for (code, &label) in mask.codes.iter_mut().zip(style.mask.labels()) {
        if table[label as usize] {
            *code = others;
        }
    }
    Ok(mask)
}
