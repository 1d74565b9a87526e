use streetlabel::dataset::*;
use streetlabel::raster::{save_semantic_map, LabelSize, SemanticMap};
use streetlabel::semantics::CategoryTable;
use streetlabel::Error;

fn small(split: Split) -> SyntheticSpec {
    SyntheticSpec {
        image_count: 3,
        width: 320,
        height: 160,
        participant_count: 5,
        labels_per_scene: 4,
        label_size: LabelSize::new(60, 15),
        split,
        ..SyntheticSpec::default()
    }
}

#[test]
fn written_dataset_loads_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_synthetic(&small(Split::Train)).unwrap();
    let path = ds.write(dir.path(), "train.json").unwrap();
    let manifest = load_manifest(&path).unwrap();
    assert_eq!(manifest.scenes, ds.manifest.scenes);
    assert_eq!(manifest.split, Split::Train);
    for (entry, scene) in manifest.scenes.iter().zip(&ds.scenes) {
        let data = manifest.load_scene(entry).unwrap();
        let original = scene.data();
        assert_eq!(data.image, original.image);
        assert_eq!(data.semantic, original.semantic);
        assert_eq!(data.predicted_semantic, original.predicted_semantic);
        assert_eq!(data.saliency, original.saliency);
        assert_eq!(data.participants, original.participants);
        assert_eq!(data.scene, original.scene);
    }
    assert!(validate_against_maps(&manifest, &CategoryTable::default()).is_clean());
}

#[test]
fn synthetic_scenes_are_well_formed() {
    let ds = generate_synthetic(&small(Split::Test)).unwrap();
    assert_eq!(ds.scenes.len(), 3);
    for (i, s) in ds.scenes.iter().enumerate() {
        assert_eq!(s.entry.scene_id, format!("test-{i:04}"));
        let d = s.data();
        assert_eq!(d.scene.label_count(), 4);
        assert_eq!(d.participants.len(), 5);
        for p in &d.participants {
            p.check_feasible(&d.scene).unwrap();
        }
        assert!(CategoryTable::default().check_map(&d.semantic).is_empty());
    }
}

#[test]
fn unknown_category_is_reported_with_pixel_count() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_synthetic(&small(Split::Test)).unwrap();
    let path = ds.write(dir.path(), "m.json").unwrap();
    let manifest = load_manifest(&path).unwrap();
    let entry = &manifest.scenes[1];
    let mut sem = manifest.load_scene(entry).unwrap().semantic;
    for x in 0..7 {
        sem.set(x, 0, 42);
    }
    sem.set(9, 0, 255);
    save_semantic_map(&sem, manifest.resolve(&entry.semantic_map_path)).unwrap();
    let report = validate_against_maps(&manifest, &CategoryTable::default());
    assert_eq!(report.violations.len(), 1);
    let v = &report.violations[0];
    assert_eq!(v.scene_id, entry.scene_id);
    assert_eq!(v.pixel_count, Some(7));
}

#[test]
fn wrong_map_size_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_synthetic(&small(Split::Test)).unwrap();
    let path = ds.write(dir.path(), "m.json").unwrap();
    let manifest = load_manifest(&path).unwrap();
    let entry = &manifest.scenes[0];
    save_semantic_map(&SemanticMap::filled(10, 10, 8), manifest.resolve(&entry.semantic_map_path)).unwrap();
    let report = validate_against_maps(&manifest, &CategoryTable::default());
    assert!(report.violations.iter().any(|v| v.field == "semantic-map-path"));
    assert!(manifest.load_scene(entry).is_err());
}

#[test]
fn out_of_bounds_participant_names_the_field() {
    let ds = generate_synthetic(&small(Split::Test)).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&ds.manifest.to_json()).unwrap();
    json["scenes"][0]["participants"][0]["positions"][1] = serde_json::json!({ "x": 5000.0, "y": 10.0 });
    let err = parse_manifest(&json.to_string(), ".", std::path::Path::new("m.json")).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("scenes[0].participants[0].positions[1]"), "{text}");
    assert!(matches!(err, Error::Manifest { .. }));
}

#[test]
fn missing_manifest_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_manifest(dir.path().join("nope.json")).is_err());
}

#[test]
fn seeds_and_splits_change_the_data() {
    let a = generate_synthetic(&small(Split::Test)).unwrap();
    let b = generate_synthetic(&small(Split::Train)).unwrap();
    assert_ne!(a.scenes[0].image, b.scenes[0].image);
    let c = generate_synthetic(&small(Split::Test)).unwrap();
    assert_eq!(a.manifest.to_json(), c.manifest.to_json());
}
