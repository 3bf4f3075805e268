//! On-disk dataset format: a JSON manifest next to 8-bit PNG images and
//! masks, plus an adapter for corner-list text annotations.

mod corner_txt;
mod manifest;
mod png;

pub use corner_txt::{adapt_corner_txt, format_corner_txt, parse_corner_txt, write_corner_txt};
pub use manifest::{read_manifest, write_manifest, DatasetManifest, Failure, Provenance, SampleEntry, Sources};
pub use png::{load_image, load_mask, load_sample, store_sample, Dataset, UNLABELED};
