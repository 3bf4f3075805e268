//! Background style transfer onto a new layout.
//!
//! The structure layout is rasterized into a region mask (ceiling, floor and
//! one region per wall); the style sample gets the same treatment from its
//! own layout, with its foreground classes covered by an `others` region.
//! A [`StyleFuser`] then paints every structure region from the matching
//! style region, never from `others`.

mod fuse;
mod regions;
mod stats;

pub use fuse::{fuse_style, fuser_for, FillPolicy, FlatStatFuser, StyleFuser, StyleFuserConfig, StyleStrategy, WarpAlignFuser};
pub use regions::{build_reference_mask, build_structure_mask, Region, RegionMask};
pub use stats::{extract_region_stats, ColorSpace, RegionStat, RegionStats};
