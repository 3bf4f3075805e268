mod common;

use common::*;
use panomix::io::{
    adapt_corner_txt, read_manifest, store_sample, write_corner_txt, write_manifest, Dataset, DatasetManifest,
};
use panomix::pano::validate_sample;

#[test]
fn stored_dataset_reloads_valid() {
    let dir = tempfile::tempdir().unwrap();
    let samples: Vec<_> = (0..5).map(|i| render(600 + i, 64, 128)).collect();
    let mut m = DatasetManifest::new(64, 128, samples[0].mask.classes().to_vec());
    for (i, s) in samples.iter().enumerate() {
        m.samples.push(store_sample(s, dir.path(), &format!("r{i}")).unwrap());
    }
    let path = dir.path().join("manifest.json");
    write_manifest(&m, &path).unwrap();
    assert_eq!(read_manifest(&path).unwrap(), m);

    let data = Dataset::open(&path).unwrap();
    for (i, s) in samples.iter().enumerate() {
        let back = data.load(&format!("r{i}")).unwrap();
        assert!(validate_sample(&back).is_empty());
        assert_eq!(back.mask, s.mask);
        assert_eq!(back.layout, s.layout);
    }
}

#[test]
fn exported_corner_files_import_as_valid_layouts() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..5 {
        let s = render(700 + i, 128, 256);
        let id = format!("c{i}");
        let stored = store_sample(&s, dir.path(), &id).unwrap();
        let txt = dir.path().join(format!("{id}.txt"));
        write_corner_txt(&s.layout, &txt).unwrap();
        let entry = adapt_corner_txt(&txt, &stored.image, &stored.mask, &id).unwrap();
        assert_eq!(entry.layout, stored.layout);
        let mut m = DatasetManifest::new(128, 256, s.mask.classes().to_vec());
        m.samples.push(entry);
        let back = Dataset::new(m, dir.path().to_path_buf()).load(&id).unwrap();
        assert!(validate_sample(&back).is_empty());
    }
}

#[test]
fn manifest_errors_carry_the_file_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"width\": 16, \"height\": 8,").unwrap();
    let err = read_manifest(&path).unwrap_err().to_string();
    assert!(err.contains("bad.json") && err.contains("line"), "{err}");
}
