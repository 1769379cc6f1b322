use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use monodyn_cli::MapSpec;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], spec: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monodyn")).args(args).arg(spec).output().unwrap()
}

fn json(args: &[&str], spec: &Path) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all, spec);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_spec(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn classify_wild_example() {
    let v = json(&["classify"], &fixture("example_wild.json"));
    assert_eq!(v["verdict"], "DEGREE_ONE_WILD");
    assert!(v["fibration"].is_null());
    assert_eq!(v["wildness"]["dense"], true);
}

#[test]
fn fibration_witness() {
    let v = json(&["fibration"], &fixture("dependent_translation.json"));
    assert_eq!(v["witness"]["b"], serde_json::json!([2, -1]));
    assert_eq!(v["witness"]["verified"], true);
}

#[test]
fn classify_cat_map() {
    let v = json(&["classify"], &fixture("cat_map.json"));
    assert_eq!(v["verdict"], "DEGREE_GT_ONE_DENSE_INVARIANTS");
    assert!(v["invariant_family"]["cycle_count"].as_u64().unwrap() >= 1);
    assert_eq!(v["density"]["verdict"], "NOT_CONTAINED");
}

#[test]
fn periodic_agrees_with_finite_model() {
    let v = json(&["periodic", "-d", "5"], &fixture("cat_map.json"));
    assert_eq!(v["finite_model_agrees"], true);
    assert_eq!(v["points"].as_array().unwrap().len(), 25);
}

#[test]
fn exit_codes() {
    let singular = temp_spec(r#"{"dimension":2,"matrix":[[1,2],[2,4]],"gamma":["1","1"]}"#);
    assert_eq!(run(&["classify"], singular.path()).status.code(), Some(2));
    let garbage = temp_spec("{ not json");
    assert_eq!(run(&["classify"], garbage.path()).status.code(), Some(2));
    let out = run(&["wild"], &fixture("cat_map.json"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dynamical degree"));
    let out = run(&["periodic", "-d", "4"], &fixture("tripling_translated.json"));
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["periodic", "-d", "6"], &fixture("tripling_translated.json"));
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["check-density", "--budget", "4", "--decisive"], &fixture("example_wild.json"));
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["check-density", "--budget", "50", "--decisive"], &fixture("example_wild.json"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fixtures_round_trip() {
    for entry in std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let once = MapSpec::from_json(&text).unwrap().canonical().unwrap();
        let printed = once.to_json();
        let twice = MapSpec::from_json(&printed).unwrap().canonical().unwrap();
        assert_eq!(once, twice);
        assert_eq!(printed, twice.to_json());
        assert_eq!(once.to_map().unwrap(), twice.to_map().unwrap());
    }
}

#[test]
fn text_output_mentions_verdict() {
    let out = run(&["classify"], &fixture("unipotent_shear.json"));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict: DEGREE_ONE_WILD"));
}
