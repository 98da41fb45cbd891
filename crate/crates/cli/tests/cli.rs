use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const MINIMAL: &str = r#"
[potential]
terms = [{ kind = "linear-u", a = 1.0 }]

[domain]
u_min = -1.0
u_max = 1.0
v_min = -1.0
v_max = 1.0
nu = 33
nv = 33

[run]
lambdas = []
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flatfront"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).arg("--out").arg(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

fn report(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

fn schema() -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn minimal_build_writes_mesh_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let out = tmp.path().join("out");
    let o = run(&["build", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files(&out), vec!["front_base.obj", "report.json"]);

    let obj = std::fs::read_to_string(out.join("front_base.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 33 * 33);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 32 * 32);
    // φ = u vanishes on the centre column, which is flagged singular.
    assert!(obj.contains("# singular vertices: 33"));
    let r = report(&out);
    assert_eq!(r["command"], "build");
    assert!(r["lambdas"].as_array().unwrap().is_empty());
    assert_eq!(r["base"]["singular_nodes"], 33);
}

#[test]
fn degenerate_lambda_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["deform", "--lambda", "0.25", "--lambda", "0.5"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.5"));
    let cfg = write_config(tmp.path(), "[run]\nlambdas = [0.5]\n");
    assert_eq!(code(&run(&["build", "--config", cfg.to_str().unwrap()], tmp.path())), 2);
}

#[test]
fn non_harmonic_potential_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[potential]\nterms = [{ kind = \"monomial\", a = 1.0, pu = 2, pv = 0 }]\n");
    for cmd in ["build", "validate"] {
        let o = run(&[cmd, "--config", cfg.to_str().unwrap()], &tmp.path().join(cmd));
        assert_eq!(code(&o), 3, "{cmd}");
    }
}

#[test]
fn parse_error_exits_2_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[domain]\nnu = 33\nnv = thirty\n");
    let o = run(&["build", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_config_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["build", "--config", "/nonexistent/run.toml"], tmp.path());
    assert_eq!(code(&o), 4);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let o = run(&["build", "--config", cfg.to_str().unwrap()], &blocker.join("out"));
    assert_eq!(code(&o), 4);
}

#[test]
fn lambda_zero_mesh_matches_the_base_mesh() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["deform", "--lambda", "0"], tmp.path());
    assert_eq!(code(&o), 0);
    let base = std::fs::read(tmp.path().join("front_base.obj")).unwrap();
    let zero = std::fs::read(tmp.path().join("front_lambda_0.obj")).unwrap();
    assert!(base == zero);
}

#[test]
fn deform_records_every_lambda() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["deform", "--lambda", "0.25", "--lambda", "1", "--refine", "2"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        files(tmp.path()),
        vec!["front_base.obj", "front_lambda_0.25.obj", "front_lambda_1.obj", "report.json"]
    );
    let r = report(tmp.path());
    let ls = r["lambdas"].as_array().unwrap();
    assert_eq!(ls.len(), 2);
    assert_eq!(ls[0]["lambda"], 0.25);
    assert!(ls[0]["pipeline_agreement"].as_f64().unwrap() < 1e-6);
    assert_eq!(ls[1]["branch"], "supercritical");
    assert!(ls[1]["flatness_defect_reduced"].as_f64().unwrap() < 1e-4);
    let cf = ls[1]["curved_flat_parameter"].as_array().unwrap();
    assert_eq!(cf[0], 0.0);
    assert_eq!(cf[1], 1.0);
    assert!(ls[0]["conservation_drift"]["order"].is_number());
    assert!(jsonschema::is_valid(&schema(), &r));
}

#[test]
fn validate_report_matches_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["validate"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS criterion")).count(), 10);
    let r = report(tmp.path());
    assert_eq!(r["passed"], true);
    assert_eq!(r["harmonicity"]["convention"], "laplacian");
    if let Err(e) = jsonschema::validate(&schema(), &r) {
        panic!("report does not match schema: {e}");
    }
}

#[test]
fn single_level_marks_orders_absent() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["validate", "--refine", "1"], tmp.path());
    assert_eq!(code(&o), 0);
    let r = report(tmp.path());
    assert!(r["base"]["kappa1_error"]["order"].is_null());
    let skipped: Vec<u64> = r["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"].is_null())
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert_eq!(skipped, vec![3, 4, 5, 6, 9]);
}

#[test]
fn small_grid_rejected_for_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[domain]\nu_min = -1.0\nu_max = 1.0\nv_min = -1.0\nv_max = 1.0\nnu = 5\nnv = 5\n[run]\nrefinement_levels = 1\n",
    );
    assert_eq!(code(&run(&["validate", "--config", cfg.to_str().unwrap()], tmp.path())), 2);
}

#[test]
fn export_csv_raw() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["export", "--format", "csv", "--model", "raw", "--lambda", "0.75"], tmp.path());
    assert_eq!(code(&o), 0);
    assert_eq!(files(tmp.path()), vec!["front_base.csv", "front_lambda_0.75.csv"]);
    let csv = std::fs::read_to_string(tmp.path().join("front_lambda_0.75.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 65 * 65);
    // Every row lies on the hyperboloid |f|² = −1.
    for row in csv.lines().skip(1) {
        let x: Vec<f64> = row.split(',').take(6).map(|s| s.parse().unwrap()).collect();
        let n = -x[2] * x[2] + x[3] * x[3] + x[4] * x[4] + x[5] * x[5];
        assert!((n + 1.0).abs() < 1e-6, "{n}");
    }
}

#[test]
fn schema_file_is_current() {
    assert_eq!(schema(), flatfront::validation::report_schema());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(code(&run(&["deform", "--lambda", "0.25", "--lambda", "-0.5"], d)), 0);
    }
    for f in files(&a) {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f}");
    }
}
