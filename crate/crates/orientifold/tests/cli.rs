//! End-to-end tests of the `orientifold` binary: every subcommand, the
//! exit-code protocol (0 ok, 1 semantic failure, 2 input error), canonical
//! output bytes, and determinism under `--seed`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orientifold::descent::FlatEquivariantDatum;
use orientifold::group::{IndexAction, OrientifoldGroup};
use orientifold::phase::Phase;
use orientifold::scene::{
    read_json, to_canonical_json, write_json, ClassifyFile, CohomologyFile, DatumFile,
    DescendFile, FlatFile, HolonomyFile, JandlFile, SceneFile, SurfaceRef, ValidationFile,
    ValueWire, SCHEMA_FLAT, SCHEMA_SCENE,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orientifold"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn orientifold")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orientifold-cli-{tag}"));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn scene_named(surface: &str, datum: Option<&str>, seed: u64) -> SceneFile {
    SceneFile {
        schema: SCHEMA_SCENE.into(),
        surface: SurfaceRef::Name(surface.into()),
        datum: datum.map(Into::into),
        group: None,
        choice: None,
        seed,
        rank: 1,
    }
}

fn write_scene(path: &Path, scene: &SceneFile) {
    write_json(path, scene).unwrap();
}

#[test]
fn generate_validate_holonomy_pipeline() {
    let dir = workdir("pipeline");
    let scene_path = dir.join("scene.json");
    let datum_path = dir.join("datum.json");
    write_scene(&scene_path, &scene_named("klein", None, 7));

    // generate a pure-gauge datum and store it
    let out = run(&[
        "generate",
        "--scene",
        scene_path.to_str().unwrap(),
        "--out",
        datum_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "generate failed: {out:?}");

    // the stored file is canonical: reparse and reserialize byte-identically
    let bytes = fs::read(&datum_path).unwrap();
    let parsed: DatumFile = read_json(&datum_path).unwrap();
    assert_eq!(to_canonical_json(&parsed).into_bytes(), bytes);

    // a scene referencing the datum validates cleanly
    write_scene(&scene_path, &scene_named("klein", Some("datum.json"), 7));
    let out = run(&["validate", "--scene", scene_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "validate failed: {out:?}");
    let report: ValidationFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(report.clean && report.violations.is_empty());

    // exhaustive sweep: invariant over the full choice space
    let out = run(&[
        "holonomy",
        "--scene",
        scene_path.to_str().unwrap(),
        "--sweep",
        "all",
    ]);
    assert_eq!(code(&out), 0, "holonomy failed: {out:?}");
    let report: HolonomyFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(report.invariant && report.exhaustive);
    assert_eq!(report.choices_swept, 1536);
    assert!(matches!(report.value, ValueWire::Exact { .. }));
}

#[test]
fn generate_is_deterministic_under_seed() {
    let dir = workdir("determinism");
    let scene_path = dir.join("scene.json");
    write_scene(&scene_path, &scene_named("mobius", None, 0));
    let args = [
        "generate",
        "--scene",
        scene_path.to_str().unwrap(),
        "--seed",
        "42",
        "--rank",
        "2",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");

    let c = run(&[
        "generate",
        "--scene",
        scene_path.to_str().unwrap(),
        "--seed",
        "43",
        "--rank",
        "2",
    ]);
    assert_ne!(a.stdout, c.stdout, "different seeds should differ");
}

#[test]
fn twisted_generation_validates_and_bad_twists_are_refused() {
    let dir = workdir("twist");
    let scene_path = dir.join("scene.json");
    let datum_path = dir.join("twisted.json");
    write_scene(&scene_path, &scene_named("rp2", None, 3));

    let out = run(&[
        "generate",
        "--scene",
        scene_path.to_str().unwrap(),
        "--twist",
        "1/2",
        "--out",
        datum_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "twisted generate failed: {out:?}");
    write_scene(&scene_path, &scene_named("rp2", Some("twisted.json"), 3));
    let out = run(&["validate", "--scene", scene_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    // 1/3 is not a cocycle for the order-2 group: input error
    write_scene(&scene_path, &scene_named("rp2", None, 3));
    let out = run(&[
        "generate",
        "--scene",
        scene_path.to_str().unwrap(),
        "--twist",
        "1/3",
    ]);
    assert_eq!(code(&out), 2, "non-cocycle twist must be an input error");
}

#[test]
fn validate_reports_broken_data_with_exit_one() {
    let dir = workdir("broken");
    let scene_path = dir.join("scene.json");
    let datum_path = dir.join("datum.json");
    write_scene(&scene_path, &scene_named("annulus", None, 9));
    let out = run(&[
        "generate",
        "--scene",
        scene_path.to_str().unwrap(),
        "--out",
        datum_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // corrupt one stored phase
    let mut parsed: DatumFile = read_json(&datum_path).unwrap();
    let row = parsed.face_b.first_mut().expect("some face entry");
    row.2 = row.2.mul(&Phase::new(1, 5).unwrap());
    write_json(&datum_path, &parsed).unwrap();

    write_scene(&scene_path, &scene_named("annulus", Some("datum.json"), 9));
    let out = run(&["validate", "--scene", scene_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "corrupt datum must fail semantically");
    let report: ValidationFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(!report.clean && !report.violations.is_empty());

    // holonomy refuses to evaluate invalid data
    let out = run(&["holonomy", "--scene", scene_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "holonomy must refuse invalid data");
}

#[test]
fn cohomology_and_classify_match_the_small_tables() {
    let out = run(&["cohomology", "--group", "jandl", "--degree", "2"]);
    assert_eq!(code(&out), 0);
    let report: CohomologyFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.order, 2);
    assert_eq!(report.invariant_factors, vec![2]);
    assert_eq!(report.epsilon, vec![1, -1]);
    assert_eq!(report.representatives.len(), 1);

    let out = run(&["cohomology", "--group", "z2z2-projection", "--degree", "3"]);
    assert_eq!(code(&out), 0);
    let report: CohomologyFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.invariant_factors, vec![2, 2]);

    // with a reflection there are two inequivalent twists, without only one
    let out = run(&["classify", "--group", "jandl"]);
    let report: ClassifyFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.classes, 2);
    assert_eq!(report.twists.len(), 2);

    let out = run(&["classify", "--group", "cyclic-2"]);
    let report: ClassifyFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.classes, 1);
    assert_eq!(report.twists.len(), 1);

    // epsilon overrides rebuild the group: cyclic-2 with a reflection is
    // the Jandl case again
    let out = run(&[
        "classify", "--group", "cyclic-2", "--epsilon", "1,-1",
    ]);
    let report: ClassifyFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.classes, 2);
}

#[test]
fn descend_quotients_roundtrip_through_files() {
    let dir = workdir("descend");
    let flat_path = dir.join("flat.json");
    let quot_path = dir.join("quotient.json");

    let group = OrientifoldGroup::z2z2_projection();
    let perms: Vec<Vec<usize>> = vec![
        (0..8).collect(),
        (0..8).map(|i| i ^ 2).collect(),
        (0..8).map(|i| i ^ 1).collect(),
        (0..8).map(|i| i ^ 3).collect(),
    ];
    let action = IndexAction::new(&group, perms).unwrap();
    let datum = FlatEquivariantDatum::random(&group, &action, 1, true, 5).unwrap();
    write_json(
        &flat_path,
        &FlatFile { schema: SCHEMA_FLAT.into(), datum: datum.clone() },
    )
    .unwrap();

    let out = run(&[
        "descend",
        "--datum",
        flat_path.to_str().unwrap(),
        "--out",
        quot_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "descend failed: {out:?}");
    let report: DescendFile = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.kind, "jandl");
    assert!(report.clean);
    assert_eq!(report.written.as_deref(), Some(quot_path.to_str().unwrap()));

    // the written quotient is a valid flat Jandl datum, canonical on disk
    let bytes = fs::read(&quot_path).unwrap();
    let stored: JandlFile = read_json(&quot_path).unwrap();
    assert_eq!(to_canonical_json(&stored).into_bytes(), bytes);
    assert!(stored.datum.validate(0.0).is_clean());

    // a perturbed input is refused with a semantic failure
    let mut bad = datum;
    bad.g[0] = bad.g[0].mul(&Phase::new(1, 3).unwrap());
    write_json(&flat_path, &FlatFile { schema: SCHEMA_FLAT.into(), datum: bad }).unwrap();
    let out = run(&["descend", "--datum", flat_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "invalid equivariant datum must exit 1");
}

#[test]
fn input_errors_exit_two() {
    let dir = workdir("errors");

    // missing scene
    let out = run(&["validate", "--scene", "/nonexistent/scene.json"]);
    assert_eq!(code(&out), 2);

    // malformed JSON
    let p = dir.join("broken.json");
    fs::write(&p, "{ \"schema\": \"orientifold/scene/1\", ").unwrap();
    let out = run(&["validate", "--scene", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // unknown group name
    let out = run(&["cohomology", "--group", "e8", "--degree", "2"]);
    assert_eq!(code(&out), 2);

    // unknown surface model inside a scene
    let p = dir.join("scene.json");
    write_scene(&p, &scene_named("pretzel", None, 0));
    let out = run(&["holonomy", "--scene", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // epsilon override that is not a homomorphism
    let out = run(&["classify", "--group", "cyclic-3", "--epsilon", "1,-1,1"]);
    assert_eq!(code(&out), 2);
}
