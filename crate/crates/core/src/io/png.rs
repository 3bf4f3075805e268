use super::manifest::{read_manifest, DatasetManifest, SampleEntry};
use crate::error::{Error, Result};
use crate::pano::{Panorama, Sample, SemanticMask};
use image::{DynamicImage, GrayImage, RgbImage};
use std::path::{Path, PathBuf};

/// Mask value reserved for unlabeled pixels.
pub const UNLABELED: u8 = 255;

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|source| Error::Image {
        path: path.display().to_string(),
        source,
    })
}

fn check_size(path: &Path, got: (u32, u32), height: usize, width: usize) -> Result<()> {
    if got != (width as u32, height as u32) {
        return Err(Error::Load(format!(
            "{} is {}x{}, manifest says {height}x{width}",
            path.display(),
            got.1,
            got.0
        )));
    }
    Ok(())
}

pub fn load_image(path: &Path, height: usize, width: usize) -> Result<Panorama> {
    let img = match open(path)? {
        DynamicImage::ImageRgb8(img) => img,
        other => {
            return Err(Error::Load(format!(
                "{} must be 8-bit RGB, found {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    check_size(path, img.dimensions(), height, width)?;
    let data = img.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
    Panorama::new(height, width, data)
}

/// Loads a class-index mask; value 255 becomes `unlabeled` when given.
pub fn load_mask(
    path: &Path,
    height: usize,
    width: usize,
    classes: &[String],
    unlabeled: Option<u8>,
) -> Result<SemanticMask> {
    let img = match open(path)? {
        DynamicImage::ImageLuma8(img) => img,
        other => {
            return Err(Error::Load(format!(
                "{} must be 8-bit single-channel, found {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    check_size(path, img.dimensions(), height, width)?;
    let mut labels = img.into_raw();
    if let Some(u) = unlabeled {
        labels.iter_mut().filter(|l| **l == UNLABELED).for_each(|l| *l = u);
    }
    let bad = labels.iter().filter(|&&l| l as usize >= classes.len()).count();
    if bad > 0 {
        return Err(Error::Load(format!(
            "{}: {bad} pixels have a class index >= {}",
            path.display(),
            classes.len()
        )));
    }
    SemanticMask::new(height, width, labels, classes.to_vec())
}

fn to_byte(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

fn save(img: impl FnOnce(&Path) -> image::ImageResult<()>, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    img(path).map_err(|source| Error::Image {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `images/<id>.png` and `masks/<id>.png` under `dir` and returns the
/// manifest entry with paths relative to `dir`.
pub fn store_sample(sample: &Sample, dir: &Path, id: &str) -> Result<SampleEntry> {
    let (h, w) = (sample.height() as u32, sample.width() as u32);
    let image_rel = format!("images/{id}.png");
    let mask_rel = format!("masks/{id}.png");
    let rgb = RgbImage::from_raw(w, h, sample.image.data().iter().map(|&v| to_byte(v)).collect())
        .expect("buffer length matches dimensions");
    save(|p| rgb.save(p), &dir.join(&image_rel))?;
    let gray = GrayImage::from_raw(w, h, sample.mask.labels().to_vec()).expect("buffer length matches dimensions");
    save(|p| gray.save(p), &dir.join(&mask_rel))?;
    Ok(SampleEntry {
        id: id.to_string(),
        image: image_rel,
        mask: mask_rel,
        layout: SampleEntry::layout_rows(&sample.layout),
        sources: None,
    })
}

/// A manifest together with the directory its paths are relative to.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
}

impl Dataset {
    pub fn open(manifest_path: &Path) -> Result<Self> {
        let manifest = read_manifest(manifest_path)?;
        let root = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { manifest, root })
    }

    pub fn new(manifest: DatasetManifest, root: PathBuf) -> Self {
        Self { manifest, root }
    }

    pub fn load(&self, id: &str) -> Result<Sample> {
        load_sample(self, id)
    }
}

pub fn load_sample(dataset: &Dataset, id: &str) -> Result<Sample> {
    let m = &dataset.manifest;
    let entry = m.entry(id)?;
    let unlabeled = m
        .unlabeled_class
        .as_ref()
        .and_then(|u| m.classes.iter().position(|c| c == u))
        .map(|i| i as u8);
    let image = load_image(&dataset.root.join(&entry.image), m.height, m.width)?;
    let mask = load_mask(&dataset.root.join(&entry.mask), m.height, m.width, &m.classes, unlabeled)?;
    Sample::new(image, mask, entry.to_layout())
}
