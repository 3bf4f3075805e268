//! Geometry derived from a [`Layout`](crate::Layout): lifting corners to a
//! floor plan, rasterizing ceiling/floor boundary curves, splitting columns
//! into per-wall groups, and whole-panorama stretching.

mod groups;
mod plan;
mod stretch;

pub use groups::{column_owners, group_boundaries, split_column_groups, ColumnGroup, ColumnSplit};
pub use plan::{
    corner_ceiling_heights, layout_to_plan, plan_to_boundaries, project_corner, BoundaryMap,
    PlanModel, PlanPoint, Segment,
};
pub use stretch::{panostretch_dir, panostretch_image, panostretch_layout};
