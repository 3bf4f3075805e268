mod common;

use common::*;
use panomix::io::{DatasetManifest, SampleEntry};
use panomix::pipeline::{
    augment_stream, batch_augment, output_id, select_triples, AugmentConfig, SampleSink, SampleSource, TripleSpec,
};
use panomix::{Error, Result, Sample};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

struct Memory {
    manifest: DatasetManifest,
    samples: HashMap<String, Sample>,
}

impl Memory {
    fn new(samples: Vec<(String, Sample)>) -> Self {
        let first = &samples[0].1;
        let mut manifest = DatasetManifest::new(first.height(), first.width(), first.mask.classes().to_vec());
        for (id, s) in &samples {
            manifest.samples.push(SampleEntry {
                id: id.clone(),
                image: format!("{id}.png"),
                mask: format!("{id}_mask.png"),
                layout: SampleEntry::layout_rows(&s.layout),
                sources: None,
            });
        }
        Self {
            manifest,
            samples: samples.into_iter().collect(),
        }
    }
}

impl SampleSource for Memory {
    fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    fn load(&self, id: &str) -> Result<Sample> {
        self.samples.get(id).cloned().ok_or_else(|| Error::Load(format!("unknown id `{id}`")))
    }
}

#[derive(Default)]
struct Collect {
    written: Mutex<BTreeMap<String, Sample>>,
    finished: Mutex<Option<DatasetManifest>>,
    fail_on: Option<String>,
}

impl SampleSink for Collect {
    fn write(&self, id: &str, sample: &Sample) -> Result<SampleEntry> {
        if self.fail_on.as_deref() == Some(id) {
            return Err(Error::Sink(format!("disk full at `{id}`")));
        }
        self.written.lock().unwrap().insert(id.to_string(), sample.clone());
        Ok(SampleEntry {
            id: id.to_string(),
            image: format!("{id}.png"),
            mask: format!("{id}_mask.png"),
            layout: SampleEntry::layout_rows(&sample.layout),
            sources: None,
        })
    }

    fn finish(&self, manifest: &DatasetManifest) -> Result<()> {
        *self.finished.lock().unwrap() = Some(manifest.clone());
        Ok(())
    }
}

fn dataset() -> Memory {
    Memory::new((0..4).map(|i| (format!("s{i}"), render(400 + i, 64, 128))).collect())
}

#[test]
fn empty_spec_list_gives_empty_manifest() {
    let data = dataset();
    let sink = Collect::default();
    let report = batch_augment(&data, &[], &AugmentConfig::default(), &sink, 2).unwrap();
    assert!(report.manifest.samples.is_empty());
    assert!(report.failures().is_empty());
    assert!(sink.finished.lock().unwrap().is_some());
}

#[test]
fn a_bad_triple_is_isolated() {
    let data = dataset();
    let mut specs = select_triples(&[("s0".into(), 4), ("s1".into(), 4), ("s2".into(), 4)], 5, 3).unwrap();
    specs.insert(2, TripleSpec::new("s0", "missing", "s1"));
    let sink = Collect::default();
    let report = batch_augment(&data, &specs, &AugmentConfig::default(), &sink, 3).unwrap();
    assert_eq!(report.manifest.samples.len(), 5);
    assert_eq!(report.failures().len(), 1);
    let f = &report.failures()[0];
    assert_eq!((f.index, f.sources.style.as_str(), f.kind.as_str()), (2, "missing", "load"));
    assert!(!sink.written.lock().unwrap().contains_key(&output_id(2)));
    let prov = report.manifest.provenance.as_ref().unwrap();
    assert_eq!(prov.config_hash, AugmentConfig::default().hash());
    assert!(report.manifest.samples.iter().all(|e| e.sources.is_some()));
}

#[test]
fn stage_is_named_in_failures() {
    let data = dataset();
    let cfg = AugmentConfig {
        foreground_classes: Some(vec!["bed".into()]),
        ..Default::default()
    };
    let mut bad = cfg.clone();
    bad.vertical = panomix::furniture::VerticalPolicy::fixed(-1.0, 1.0);
    let specs = vec![TripleSpec::new("s0", "s1", "s2")];
    let report = batch_augment(&data, &specs, &bad, &Collect::default(), 1).unwrap();
    let f = &report.failures()[0];
    assert_eq!(f.kind, "config");
    assert_eq!(f.stage.as_deref(), Some("style-fusing"));
}

#[test]
fn sink_failure_aborts_with_partial_manifest() {
    let data = dataset();
    let specs = select_triples(&[("s0".into(), 4), ("s1".into(), 4)], 4, 8).unwrap();
    let sink = Collect {
        fail_on: Some(output_id(1)),
        ..Default::default()
    };
    let err = batch_augment(&data, &specs, &AugmentConfig::default(), &sink, 2).unwrap_err();
    assert!(matches!(err, Error::Sink(_)));
    let partial = sink.finished.lock().unwrap().clone().unwrap();
    assert_eq!(partial.samples.len(), 3);
    assert!(partial.samples.iter().all(|e| e.id != output_id(1)));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let data = dataset();
    let cfg = AugmentConfig {
        seed: 99,
        extra: panomix::pipeline::ExtraAugment { roll: true, flip: true },
        ..Default::default()
    };
    let ids: Vec<(String, usize)> = (0..4).map(|i| (format!("s{i}"), 4)).collect();
    let specs = select_triples(&ids, 12, 4).unwrap();
    let (one, eight) = (Collect::default(), Collect::default());
    batch_augment(&data, &specs, &cfg, &one, 1).unwrap();
    batch_augment(&data, &specs, &cfg, &eight, 8).unwrap();
    assert_eq!(*one.written.lock().unwrap(), *eight.written.lock().unwrap());
    assert_eq!(*one.finished.lock().unwrap(), *eight.finished.lock().unwrap());

    let streamed: BTreeMap<String, Sample> = augment_stream(&data, &specs, &cfg)
        .map(|(i, s)| (output_id(i), s.unwrap()))
        .collect();
    assert_eq!(streamed, *one.written.lock().unwrap());
}

#[test]
fn triple_roles_are_uniform() {
    let ids: Vec<(String, usize)> = (0..4).map(|i| (format!("s{i}"), 4)).collect();
    let triples = select_triples(&ids, 10_000, 2024).unwrap();
    for role in 0..3 {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for t in &triples {
            let id = [&t.structure_id, &t.style_id, &t.furniture_id][role];
            *counts.entry(id.as_str()).or_default() += 1;
        }
        for (id, _) in &ids {
            let n = counts[id.as_str()];
            assert!((2300..=2700).contains(&n), "role {role} {id}: {n}");
        }
    }
}
