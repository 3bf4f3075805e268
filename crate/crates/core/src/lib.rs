//! Layout/style/furniture mixing augmentation for indoor equirectangular
//! panoramas.
//!
//! An augmented sample takes its room layout from a *structure* sample, its
//! background appearance from a *style* sample and its furniture from a
//! *furniture* sample:
//!
//! 1. [`style::fuse_style`] renders a foreground-free image of the style
//!    sample's background on the structure layout.
//! 2. [`furniture::align_sample`] warps the furniture sample onto the
//!    structure layout wall by wall (horizontal plan-fraction alignment, then
//!    a three-band vertical row warp).
//! 3. [`furniture::composite`] pastes the aligned foreground over the styled
//!    image.
//!
//! [`pipeline`] strings these together and handles seeded batch generation,
//! [`synth`] renders procedural cuboid rooms with known ground truth, and
//! [`io`] owns the on-disk manifest and PNG formats.

// Negated float comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod furniture;
pub mod io;
pub mod layout;
pub mod pano;
pub mod pipeline;
pub mod style;
pub mod synth;

pub use error::{Error, Result};
pub use pano::{Corner, Layout, Panorama, Rgb, Sample, SemanticMask};
