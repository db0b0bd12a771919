use std::fs;
use std::path::{Path, PathBuf};

use nodal_atlas_cli::{run_pipeline, verify_bundle, PipelineConfig, PipelineError, SUMMARY_FILE};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn minimal(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&configs_dir().join("torus_minimal.json")).unwrap();
    cfg.output = out.to_path_buf();
    cfg
}

#[test]
fn minimal_torus_bundle_has_thirty_sound_records() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = run_pipeline(&minimal(dir.path())).unwrap();
    assert_eq!(bundle.summary.records.len(), 30);
    assert!(bundle.summary.records.iter().all(|r| r.euler_ok == Some(true)));
    assert!(bundle.summary.records.iter().all(|r| r.holds == Some(true)));
    assert!(bundle.ok(), "{:?}", bundle.summary.violations);
    let report = verify_bundle(dir.path()).unwrap();
    assert!(report.all_passed());
}

#[test]
fn k_below_two_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig { k: 1, ..minimal(dir.path()) };
    assert!(matches!(run_pipeline(&cfg), Err(PipelineError::ConfigInvalid(_))));
}

#[test]
fn same_seed_gives_identical_summaries() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_pipeline(&minimal(a.path())).unwrap();
    run_pipeline(&minimal(b.path())).unwrap();
    for file in [SUMMARY_FILE, "report.json", "traces.csv", "pairs/index.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

/// Lowers one record's face count until `v - e + f - m` drops below `1 - 2g`.
fn inject_face_fault(dir: &Path, record: usize) {
    let path = dir.join(SUMMARY_FILE);
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let genus = json["mesh"]["genus"].as_i64().unwrap();
    let r = &mut json["records"][record];
    let get = |k: &str| r[k].as_i64().unwrap();
    let lhs = get("v") - get("e") + get("f") - get("m");
    let f = get("f") - (lhs - (1 - 2 * genus)) - 1;
    r["f"] = serde_json::json!(f.max(0));
    fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
}

#[test]
fn verify_finds_exactly_the_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&minimal(dir.path())).unwrap();
    inject_face_fault(dir.path(), 7);
    let report = verify_bundle(dir.path()).unwrap();
    let failures: Vec<_> = report.failures().collect();
    assert_eq!(failures.len(), 1, "{failures:?}");
    assert_eq!(failures[0].name, "pair 7 euler");
}

#[test]
fn empty_directory_is_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(verify_bundle(dir.path()), Err(PipelineError::BundleCorrupt(_))));
}

#[test]
fn every_shipped_config_verifies() {
    let mut names: Vec<PathBuf> = fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    assert!(names.len() >= 4);
    for path in names {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = PipelineConfig::load(&path).unwrap();
        cfg.output = dir.path().to_path_buf();
        let bundle = run_pipeline(&cfg).unwrap();
        assert!(bundle.ok(), "{}: {:?}", path.display(), bundle.summary.violations);
        let report = verify_bundle(dir.path()).unwrap();
        assert!(report.all_passed(), "{}: {:?}", path.display(), report.failures().collect::<Vec<_>>());
    }
}
