//! `panomix` command-line front end.

use clap::{Parser, Subcommand};
use panomix::furniture::STRUCTURE_CLASSES;
use panomix::io::{
    store_sample, write_corner_txt, write_manifest, Dataset, DatasetManifest, Failure, Provenance, Sources,
};
use panomix::layout::panostretch_image;
use panomix::pano::validate_sample;
use panomix::pipeline::{batch_augment, output_id, panomixswap, select_triples, AugmentConfig, DirSink, SampleSource};
use panomix::synth::{random_scene, render_scene, scene_seed, RandomSceneParams};
use panomix::Error;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "panomix", version, about = "Layout/style/furniture mixing for indoor panoramas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mix one structure/style/furniture triple.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        structure: String,
        #[arg(long)]
        style: String,
        #[arg(long)]
        furniture: String,
        /// JSON augmentation config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw and mix `count` random triples.
    Batch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; outputs do not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Stretch one sample's room along x and z.
    Stretch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        kx: f64,
        #[arg(long)]
        kz: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render random cuboid rooms with exact ground truth.
    Synth {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check every sample of a manifest.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
}

enum Failed {
    Error(Error),
    Partial(Vec<Failure>),
    Invalid(serde_json::Value),
}

impl From<Error> for Failed {
    fn from(e: Error) -> Self {
        Failed::Error(e)
    }
}

fn load_config(path: Option<&Path>, seed: u64) -> Result<AugmentConfig, Error> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
            AugmentConfig::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => AugmentConfig::default(),
    };
    cfg.seed = seed;
    Ok(cfg)
}

fn create_dir(path: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn augment(
    manifest: &Path,
    ids: [&str; 3],
    config: Option<&Path>,
    seed: u64,
    out: &Path,
) -> Result<serde_json::Value, Failed> {
    let cfg = load_config(config, seed)?;
    let data = Dataset::open(manifest)?;
    let [structure, style, furniture] = ids.map(|id| data.load(id));
    let sample = panomixswap(&structure?, &style?, &furniture?, &cfg.for_sample(0))?;
    create_dir(out)?;
    let mut entry = store_sample(&sample, out, &output_id(0))?;
    entry.sources = Some(Sources {
        structure: ids[0].into(),
        style: ids[1].into(),
        furniture: ids[2].into(),
    });
    let src = &data.manifest;
    let mut m = DatasetManifest::new(src.height, src.width, src.classes.clone());
    m.samples.push(entry);
    m.provenance = Some(Provenance {
        config_hash: cfg.hash(),
        seed,
        failures: vec![],
    });
    write_manifest(&m, &out.join("manifest.json"))?;
    Ok(json!({ "written": 1 }))
}

fn batch(
    manifest: &Path,
    count: usize,
    config: Option<&Path>,
    seed: u64,
    out: &Path,
    workers: usize,
) -> Result<serde_json::Value, Failed> {
    let cfg = load_config(config, seed)?;
    let data = Dataset::open(manifest)?;
    let pool: Vec<(String, usize)> = data
        .manifest()
        .samples
        .iter()
        .map(|s| (s.id.clone(), s.layout.len()))
        .collect();
    let specs = select_triples(&pool, count, seed)?;
    create_dir(out)?;
    let report = batch_augment(&data, &specs, &cfg, &DirSink::new(out), workers)?;
    if !report.failures().is_empty() {
        return Err(Failed::Partial(report.failures().to_vec()));
    }
    Ok(json!({ "written": report.manifest.samples.len() }))
}

fn stretch(manifest: &Path, id: &str, kx: f64, kz: f64, out: &Path) -> Result<serde_json::Value, Failed> {
    let data = Dataset::open(manifest)?;
    let sample = panostretch_image(&data.load(id)?, kx, kz)?;
    create_dir(out)?;
    let entry = store_sample(&sample, out, id)?;
    let src = &data.manifest;
    let mut m = DatasetManifest::new(src.height, src.width, src.classes.clone());
    m.unlabeled_class = src.unlabeled_class.clone();
    m.samples.push(entry);
    write_manifest(&m, &out.join("manifest.json"))?;
    Ok(json!({ "written": 1 }))
}

fn synth(count: usize, seed: u64, height: usize, width: usize, out: &Path) -> Result<serde_json::Value, Failed> {
    if width != 2 * height || height < 8 {
        return Err(Error::Config(format!("size {height}x{width} must satisfy width = 2 * height, height >= 8")).into());
    }
    let params = RandomSceneParams::default();
    let mut vocab: Vec<String> = STRUCTURE_CLASSES.map(String::from).to_vec();
    vocab.extend(params.furniture_classes.iter().cloned());
    let mut m = DatasetManifest::new(height, width, vocab);
    create_dir(&out.join("layouts"))?;
    for i in 0..count {
        let spec = random_scene(scene_seed(seed, i as u64), &params)?;
        let sample = render_scene(&spec, height, width)?;
        let id = format!("scene_{i:06}");
        m.samples.push(store_sample(&sample, out, &id)?);
        write_corner_txt(&sample.layout, &out.join("layouts").join(format!("{id}.txt")))?;
    }
    write_manifest(&m, &out.join("manifest.json"))?;
    Ok(json!({ "written": count }))
}

fn validate(manifest: &Path) -> Result<serde_json::Value, Failed> {
    let data = Dataset::open(manifest)?;
    let mut problems = Vec::new();
    for entry in &data.manifest.samples {
        match data.load(&entry.id) {
            Ok(sample) => {
                for v in validate_sample(&sample) {
                    problems.push(json!({ "id": entry.id, "kind": format!("{:?}", v.kind), "message": v.message }));
                }
            }
            Err(e) => problems.push(json!({ "id": entry.id, "kind": e.kind(), "message": e.to_string() })),
        }
    }
    if problems.is_empty() {
        Ok(json!({ "checked": data.manifest.samples.len() }))
    } else {
        Err(Failed::Invalid(json!({ "error": "invalid-samples", "violations": problems })))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("{}", json!({ "error": "usage", "message": e.kind().to_string() }));
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Augment {
            manifest,
            structure,
            style,
            furniture,
            config,
            seed,
            out,
        } => augment(manifest, [structure, style, furniture], config.as_deref(), *seed, out),
        Command::Batch {
            manifest,
            count,
            config,
            seed,
            out,
            workers,
        } => batch(manifest, *count, config.as_deref(), *seed, out, *workers),
        Command::Stretch { manifest, id, kx, kz, out } => stretch(manifest, id, *kx, *kz, out),
        Command::Synth {
            count,
            seed,
            height,
            width,
            out,
        } => synth(*count, *seed, *height, *width, out),
        Command::Validate { manifest } => validate(manifest),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failed::Error(e)) => {
            let mut summary = json!({ "error": e.kind(), "message": e.to_string() });
            if let Error::Stage { stage, .. } = &e {
                summary["stage"] = json!(stage.to_string());
            }
            eprintln!("{summary}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
        Err(Failed::Partial(failures)) => {
            eprintln!("{}", json!({ "error": "partial-failure", "failures": failures }));
            ExitCode::from(3)
        }
        Err(Failed::Invalid(summary)) => {
            eprintln!("{summary}");
            ExitCode::from(1)
        }
    }
}
