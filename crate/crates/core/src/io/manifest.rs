use crate::error::{Error, Result};
use crate::pano::{Corner, Layout};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

/// The three source ids of an augmented sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sources {
    pub structure: String,
    pub style: String,
    pub furniture: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleEntry {
    pub id: String,
    /// Paths are relative to the manifest's directory.
    pub image: String,
    pub mask: String,
    /// `[column, ceil_row, floor_row]` per corner, sorted by column.
    pub layout: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<Sources>,
}

impl SampleEntry {
    pub fn to_layout(&self) -> Layout {
        Layout::new(self.layout.iter().map(|&[c, a, b]| Corner::new(c, a, b)).collect())
    }

    pub fn layout_rows(layout: &Layout) -> Vec<[f64; 3]> {
        layout.corners().iter().map(|c| [c.column, c.ceil_row, c.floor_row]).collect()
    }
}

/// A spec that could not be turned into a sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Failure {
    pub index: usize,
    pub sources: Sources,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub width: usize,
    pub height: usize,
    pub classes: Vec<String>,
    /// Class that mask value 255 maps to on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unlabeled_class: Option<String>,
    pub samples: Vec<SampleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl DatasetManifest {
    pub fn new(height: usize, width: usize, classes: Vec<String>) -> Self {
        Self {
            width,
            height,
            classes,
            unlabeled_class: None,
            samples: Vec::new(),
            provenance: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DatasetManifest = serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        m.check()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        self.check()?;
        serde_json::to_string_pretty(self).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn entry(&self, id: &str) -> Result<&SampleEntry> {
        self.samples
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::Manifest(format!("no sample with id `{id}`")))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.samples.iter().map(|s| s.id.as_str())
    }

    /// Structural checks beyond the JSON schema.
    pub fn check(&self) -> Result<()> {
        let (w, h) = (self.width as f64, self.height as f64);
        if self.width != 2 * self.height || self.height == 0 {
            return Err(Error::Manifest(format!(
                "size {}x{} is not a 2:1 panorama",
                self.height, self.width
            )));
        }
        if self.classes.is_empty() || self.classes.len() > 255 {
            return Err(Error::Manifest(format!("{} classes; need 1..=255", self.classes.len())));
        }
        let mut names = HashSet::new();
        for c in &self.classes {
            if !names.insert(c) {
                return Err(Error::Manifest(format!("duplicate class `{c}`")));
            }
        }
        if let Some(u) = &self.unlabeled_class {
            if !names.contains(u) {
                return Err(Error::Manifest(format!("unlabeled class `{u}` is not in the class list")));
            }
        }
        let mut ids = HashSet::new();
        for (i, s) in self.samples.iter().enumerate() {
            let at = format!("samples[{i}] (id `{}`)", s.id);
            if !ids.insert(s.id.as_str()) {
                return Err(Error::Manifest(format!("duplicate id `{}` at samples[{i}]", s.id)));
            }
            if s.layout.len() < 3 {
                return Err(Error::Manifest(format!("{at}: layout has {} corners, need at least 3", s.layout.len())));
            }
            for (k, &[c, a, b]) in s.layout.iter().enumerate() {
                if !(c.is_finite() && a.is_finite() && b.is_finite()) {
                    return Err(Error::Manifest(format!("{at}: layout[{k}] is not finite")));
                }
                if !(0.0..w).contains(&c) {
                    return Err(Error::Manifest(format!("{at}: layout[{k}] column {c} outside [0, {w})")));
                }
                if !(0.0 <= a && a < b && b < h) {
                    return Err(Error::Manifest(format!(
                        "{at}: layout[{k}] needs 0 <= ceil_row < floor_row < {h}, got {a}, {b}"
                    )));
                }
                if k > 0 && s.layout[k - 1][0] >= c {
                    return Err(Error::Manifest(format!("{at}: layout columns must strictly increase at layout[{k}]")));
                }
            }
        }
        Ok(())
    }
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    DatasetManifest::from_json(&text).map_err(|e| match e {
        Error::Manifest(m) => Error::Manifest(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let text = manifest.to_json()?;
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
