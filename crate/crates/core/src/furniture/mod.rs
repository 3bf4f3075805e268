//! Furniture alignment and compositing: warp a furniture sample onto a target
//! layout wall by wall, then paste its foreground over a styled background.

mod align;
mod composite;
mod horizontal;
mod vertical;

pub use align::{align_sample, AlignOptions, WarpField};
pub use composite::{composite, default_foreground, foreground_table, STRUCTURE_CLASSES};
pub use horizontal::{horizontal_map, linear_map, HorizontalMode, WallPair};
pub use vertical::{vertical_source_row, OutOfRange, VerticalMode, VerticalPolicy};
