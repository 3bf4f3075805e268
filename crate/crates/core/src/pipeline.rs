//! Triple mixing, triple selection and seeded batch generation.

use crate::error::{Error, Result, Stage};
use crate::furniture::{align_sample, composite, default_foreground, foreground_table, AlignOptions, HorizontalMode, VerticalPolicy};
use crate::io::{store_sample, write_manifest, Dataset, DatasetManifest, Failure, Provenance, SampleEntry, Sources};
use crate::pano::{flip_columns, roll_columns, validate_sample, Sample};
use crate::style::{build_structure_mask, fuse_style, Region, StyleFuserConfig};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Optional label-preserving augmentations applied after mixing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtraAugment {
    /// Roll by a uniformly drawn column offset.
    pub roll: bool,
    /// Mirror left-right with probability one half.
    pub flip: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub style: StyleFuserConfig,
    pub vertical: VerticalPolicy,
    pub horizontal: HorizontalMode,
    /// Foreground class names; every non-structure class when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub foreground_classes: Option<Vec<String>>,
    /// Re-derive background labels from the structure layout instead of
    /// keeping the warped ones.
    pub relabel_background: bool,
    pub extra: ExtraAugment,
    pub seed: u64,
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl AugmentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AugmentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.vertical.validate()?;
        Ok(cfg)
    }

    pub fn align_options(&self) -> AlignOptions {
        AlignOptions {
            vertical: self.vertical,
            horizontal: self.horizontal,
        }
    }

    pub fn foreground(&self, vocab: &[String]) -> Result<Vec<String>> {
        let names = match &self.foreground_classes {
            Some(names) => names.clone(),
            None => default_foreground(vocab),
        };
        foreground_table(&names, vocab)?;
        Ok(names)
    }

    /// Config for the `index`-th spec of a batch: the seed and the style
    /// noise seed depend only on the global seed and the index.
    pub fn for_sample(&self, index: usize) -> AugmentConfig {
        let derived = splitmix64(self.seed ^ splitmix64(index as u64));
        let mut cfg = self.clone();
        cfg.seed = derived;
        cfg.style.noise_seed = splitmix64(derived);
        cfg
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

fn check_triple(structure: &Sample, style: &Sample, furniture: &Sample) -> Result<()> {
    let dims = |s: &Sample| (s.height(), s.width());
    for (name, s) in [("style", style), ("furniture", furniture)] {
        if dims(s) != dims(structure) {
            return Err(Error::IncompatibleSamples(format!(
                "{name} sample is {:?}, structure is {:?}",
                dims(s),
                dims(structure)
            )));
        }
        if s.layout.wall_count() != structure.layout.wall_count() {
            return Err(Error::IncompatibleSamples(format!(
                "{name} sample has {} walls, structure has {}",
                s.layout.wall_count(),
                structure.layout.wall_count()
            )));
        }
        if s.mask.classes() != structure.mask.classes() {
            return Err(Error::IncompatibleSamples(format!("{name} sample uses a different class vocabulary")));
        }
    }
    Ok(())
}

fn relabel_background(sample: &mut Sample, foreground: &[String]) -> Result<()> {
    let classes = sample.mask.classes().to_vec();
    let index = |name: &str| {
        sample
            .mask
            .class_index(name)
            .ok_or_else(|| Error::Config(format!("relabeling needs class `{name}` in {classes:?}")))
    };
    let (ceiling, floor, wall) = (index("ceiling")?, index("floor")?, index("wall")?);
    let is_fg = foreground_table(foreground, &classes)?;
    let regions = build_structure_mask(&sample.layout, sample.height(), sample.width())?;
    let t = sample.layout.wall_count();
    for (label, &code) in sample.mask.labels_mut().iter_mut().zip(regions.codes()) {
        if !is_fg[*label as usize] {
            *label = match Region::from_code(code, t) {
                Region::Ceiling => ceiling,
                Region::Floor => floor,
                _ => wall,
            };
        }
    }
    Ok(())
}

fn apply_extras(sample: Sample, extra: ExtraAugment, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut out = sample;
    if extra.roll {
        let k = rng.random_range(0..out.width() as i64);
        out = roll_columns(&out, k);
    }
    if extra.flip && rng.random_bool(0.5) {
        out = flip_columns(&out);
    }
    out
}

/// Mixes the structure sample's layout, the style sample's background and the
/// furniture sample's foreground into one sample.
pub fn panomixswap(structure: &Sample, style: &Sample, furniture: &Sample, cfg: &AugmentConfig) -> Result<Sample> {
    check_triple(structure, style, furniture)?;
    let vocab = structure.mask.classes();
    let foreground = cfg.foreground(vocab)?;
    let align = cfg.align_options();
    let target = &structure.layout;

    let styled = fuse_style(style, target, &cfg.style, &foreground, &align).map_err(|e| e.at_stage(Stage::StyleFusing))?;
    let (image, mask) = align_sample(furniture, target, &align).map_err(|e| e.at_stage(Stage::FurnitureAlignment))?;
    let mut out = composite(&image, &mask, &styled, target, &foreground).map_err(|e| e.at_stage(Stage::Composite))?;
    if cfg.relabel_background {
        relabel_background(&mut out, &foreground).map_err(|e| e.at_stage(Stage::Extras))?;
    }
    if cfg.extra.roll || cfg.extra.flip {
        out = apply_extras(out, cfg.extra, cfg.seed);
    }
    if let Some(v) = validate_sample(&out).first() {
        return Err(Error::InvalidSample(v.to_string()).at_stage(Stage::Validation));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSpec {
    pub structure_id: String,
    pub style_id: String,
    pub furniture_id: String,
}

impl TripleSpec {
    pub fn new(structure: &str, style: &str, furniture: &str) -> Self {
        Self {
            structure_id: structure.into(),
            style_id: style.into(),
            furniture_id: furniture.into(),
        }
    }

    pub fn sources(&self) -> Sources {
        Sources {
            structure: self.structure_id.clone(),
            style: self.style_id.clone(),
            furniture: self.furniture_id.clone(),
        }
    }
}

/// Draws `n` triples from `(id, wall_count)` pairs. The structure id is
/// uniform over the pool; style and furniture ids are uniform over samples
/// with the structure's wall count.
pub fn select_triples(pool: &[(String, usize)], n: usize, seed: u64) -> Result<Vec<TripleSpec>> {
    if pool.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (structure, t) = pool.choose(&mut rng).expect("non-empty pool");
        let same: Vec<&String> = pool.iter().filter(|(_, k)| k == t).map(|(id, _)| id).collect();
        let style = same.choose(&mut rng).expect("structure is compatible with itself");
        let furniture = same.choose(&mut rng).expect("structure is compatible with itself");
        out.push(TripleSpec::new(structure, style, furniture));
    }
    Ok(out)
}

/// Read-only access to source samples.
pub trait SampleSource: Sync {
    fn manifest(&self) -> &DatasetManifest;
    fn load(&self, id: &str) -> Result<Sample>;
}

impl SampleSource for Dataset {
    fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    fn load(&self, id: &str) -> Result<Sample> {
        Dataset::load(self, id)
    }
}

/// Destination for augmented samples. `write` is called concurrently with
/// distinct ids; `finish` receives the final (or partial) manifest.
pub trait SampleSink: Sync {
    fn write(&self, id: &str, sample: &Sample) -> Result<SampleEntry>;
    fn finish(&self, manifest: &DatasetManifest) -> Result<()>;
}

/// Writes PNGs under a directory and `manifest.json` at its root.
#[derive(Debug, Clone)]
pub struct DirSink {
    pub root: PathBuf,
}

impl DirSink {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }
}

impl SampleSink for DirSink {
    fn write(&self, id: &str, sample: &Sample) -> Result<SampleEntry> {
        store_sample(sample, &self.root, id).map_err(|e| Error::Sink(format!("writing `{id}`: {e}")))
    }

    fn finish(&self, manifest: &DatasetManifest) -> Result<()> {
        write_manifest(manifest, &self.manifest_path()).map_err(|e| Error::Sink(format!("writing manifest: {e}")))
    }
}

pub fn output_id(index: usize) -> String {
    format!("aug_{index:06}")
}

fn failure(index: usize, spec: &TripleSpec, err: &Error) -> Failure {
    let stage = match err {
        Error::Stage { stage, .. } => Some(stage.to_string()),
        _ => None,
    };
    Failure {
        index,
        sources: spec.sources(),
        stage,
        kind: err.kind().to_string(),
        message: err.to_string(),
    }
}

fn augment_one(source: &dyn SampleSource, spec: &TripleSpec, cfg: &AugmentConfig) -> Result<Sample> {
    let structure = source.load(&spec.structure_id)?;
    let style = source.load(&spec.style_id)?;
    let furniture = source.load(&spec.furniture_id)?;
    panomixswap(&structure, &style, &furniture, cfg)
}

/// Lazily augments specs in order, one at a time.
pub fn augment_stream<'a>(
    source: &'a dyn SampleSource,
    specs: &'a [TripleSpec],
    cfg: &'a AugmentConfig,
) -> impl Iterator<Item = (usize, Result<Sample>)> + 'a {
    specs
        .iter()
        .enumerate()
        .map(move |(i, spec)| (i, augment_one(source, spec, &cfg.for_sample(i))))
}

/// Result of a batch: the manifest handed to the sink. Failures are listed in
/// its provenance block.
#[derive(Debug, Clone)]
pub struct BatchReport {
    pub manifest: DatasetManifest,
}

impl BatchReport {
    pub fn failures(&self) -> &[Failure] {
        self.manifest.provenance.as_ref().map(|p| p.failures.as_slice()).unwrap_or(&[])
    }
}

/// Augments every spec with `workers` threads. Per-spec errors are recorded
/// and skipped; a sink error aborts after flushing the entries written so far.
pub fn batch_augment(
    source: &dyn SampleSource,
    specs: &[TripleSpec],
    cfg: &AugmentConfig,
    sink: &dyn SampleSink,
    workers: usize,
) -> Result<BatchReport> {
    enum Outcome {
        Written(SampleEntry),
        Failed(Failure),
        SinkError(Error),
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| match augment_one(source, spec, &cfg.for_sample(i)) {
                Ok(sample) => match sink.write(&output_id(i), &sample) {
                    Ok(mut entry) => {
                        entry.sources = Some(spec.sources());
                        Outcome::Written(entry)
                    }
                    Err(e) => Outcome::SinkError(e),
                },
                Err(e) => Outcome::Failed(failure(i, spec, &e)),
            })
            .collect()
    });

    let src = source.manifest();
    let mut manifest = DatasetManifest::new(src.height, src.width, src.classes.clone());
    let mut failures = Vec::new();
    let mut sink_error = None;
    for outcome in outcomes {
        match outcome {
            Outcome::Written(entry) => manifest.samples.push(entry),
            Outcome::Failed(f) => failures.push(f),
            Outcome::SinkError(e) => {
                sink_error.get_or_insert(e);
            }
        }
    }
    manifest.provenance = Some(Provenance {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        failures,
    });
    let finished = sink.finish(&manifest);
    match (sink_error, finished) {
        (Some(e), _) | (None, Err(e)) => Err(e),
        (None, Ok(())) => Ok(BatchReport { manifest }),
    }
}

/// Joins two manifests whose paths are relative to the same directory, as
/// when training on an original set plus its augmented copy.
pub fn concat_manifests(a: &DatasetManifest, b: &DatasetManifest) -> Result<DatasetManifest> {
    if (a.height, a.width) != (b.height, b.width) || a.classes != b.classes {
        return Err(Error::Manifest("manifests differ in size or class list".into()));
    }
    let mut out = a.clone();
    out.provenance = None;
    out.samples.extend(b.samples.iter().cloned());
    out.check()?;
    Ok(out)
}

/// Prefixes every image and mask path, for moving a manifest's samples under
/// a parent directory.
pub fn rebase_paths(manifest: &DatasetManifest, prefix: &Path) -> DatasetManifest {
    let mut out = manifest.clone();
    for s in &mut out.samples {
        s.image = prefix.join(&s.image).to_string_lossy().into_owned();
        s.mask = prefix.join(&s.mask).to_string_lossy().into_owned();
    }
    out
}

/// Batches of `batch_size` ids with half drawn from `augmented`, the rest from
/// `original`, each half shuffled without replacement per epoch.
pub fn half_batch_schedule(
    original: &[String],
    augmented: &[String],
    batch_size: usize,
    batches: usize,
    seed: u64,
) -> Result<Vec<Vec<String>>> {
    if original.is_empty() || augmented.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if batch_size < 2 {
        return Err(Error::Config("half-batch mixing needs a batch size of at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_aug = batch_size / 2;
    let draw = |ids: &[String], queue: &mut Vec<String>, k: usize, rng: &mut ChaCha8Rng| -> Vec<String> {
        (0..k)
            .map(|_| {
                if queue.is_empty() {
                    *queue = ids.to_vec();
                    queue.shuffle(rng);
                }
                queue.pop().expect("refilled")
            })
            .collect()
    };
    let (mut q_orig, mut q_aug) = (Vec::new(), Vec::new());
    Ok((0..batches)
        .map(|_| {
            let mut batch = draw(augmented, &mut q_aug, n_aug, &mut rng);
            batch.extend(draw(original, &mut q_orig, batch_size - n_aug, &mut rng));
            batch
        })
        .collect())
}
