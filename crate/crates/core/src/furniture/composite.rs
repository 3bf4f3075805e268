use crate::error::{Error, Result};
use crate::pano::{Layout, Panorama, Sample, SemanticMask};

/// Class names treated as room structure rather than foreground.
pub const STRUCTURE_CLASSES: [&str; 3] = ["ceiling", "floor", "wall"];

/// Every class of `vocab` except the structure classes.
pub fn default_foreground(vocab: &[String]) -> Vec<String> {
    vocab
        .iter()
        .filter(|c| !STRUCTURE_CLASSES.contains(&c.as_str()))
        .cloned()
        .collect()
}

/// Lookup table `label -> is foreground` for a set of class names.
pub fn foreground_table(names: &[String], vocab: &[String]) -> Result<[bool; 256]> {
    let mut table = [false; 256];
    for name in names {
        let idx = vocab
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Config(format!("unknown class `{name}`; vocabulary is {vocab:?}")))?;
        table[idx] = true;
    }
    Ok(table)
}

/// Pastes foreground pixels of the aligned furniture image over the styled
/// background. The mask is the aligned furniture mask and the layout is the
/// target layout, both unchanged.
pub fn composite(
    aligned_image: &Panorama,
    aligned_mask: &SemanticMask,
    styled: &Panorama,
    layout: &Layout,
    foreground: &[String],
) -> Result<Sample> {
    let (h, w) = (aligned_image.height(), aligned_image.width());
    if (styled.height(), styled.width()) != (h, w) || (aligned_mask.height(), aligned_mask.width()) != (h, w) {
        return Err(Error::DimensionMismatch(format!(
            "composite inputs disagree: image {h}x{w}, mask {}x{}, styled {}x{}",
            aligned_mask.height(),
            aligned_mask.width(),
            styled.height(),
            styled.width()
        )));
    }
    let is_fg = foreground_table(foreground, aligned_mask.classes())?;
    let mut out = styled.clone();
    for (p, &label) in aligned_mask.labels().iter().enumerate() {
        if is_fg[label as usize] {
            out.data_mut()[p * 3..p * 3 + 3].copy_from_slice(&aligned_image.data()[p * 3..p * 3 + 3]);
        }
    }
    Sample::new(out, aligned_mask.clone(), layout.clone())
}
