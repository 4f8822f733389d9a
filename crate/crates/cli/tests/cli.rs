use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: [&str; 6] = ["--alpha=-0.5", "--domain", "box:2*pi,2*pi", "--modes", "8", "--beta=3"];

fn nsh(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsh"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("nsh runs")
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"))
}

fn assert_schema(name: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} schema violations: {msgs:#?}");
    };
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn solve_small(dir: &Path) -> Value {
    let o = nsh(&[&["solve"], &SMALL[..]].concat(), dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    read_json(&dir.join("diagnostics.json"))
}

#[test]
fn constants_report_integer_roots() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nsh(&["constants", "--alpha=-1", "--beta=3", "--domain", "box:1,1", "--modes", "4"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc, read_json(&tmp.path().join("constants.json")));
    assert_schema("constants", &doc);
    let cs = &doc["constant_solutions"];
    assert!((cs["c_minus"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((cs["c_plus"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(doc["tool"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["domain"], "box:1,1");
}

#[test]
fn constants_below_threshold_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let o = nsh(&["constants", "--alpha=-1", "--beta=2", "--domain", "box:1,1"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("β ≤ 2√(1−α)"));
    assert!(!out.exists());
}

#[test]
fn invalid_configs_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    for args in [
        vec!["solve", "--alpha=0.5", "--beta=3"],
        vec!["solve", "--alpha=-0.5"],
        vec!["solve", "--alpha=-0.5", "--beta=3", "--domain", "box:1,0"],
        vec!["sweep", "--alpha=-0.5", "--beta=3"],
        vec!["tile", "--alpha=-0.5", "--beta=3", "--field", "/nonexistent/field.csv"],
        vec!["lattice", "--matrix", "[[1.5,0],[0,1]]"],
        vec!["lattice"],
    ] {
        let o = nsh(&args, &out);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists(), "{args:?}");
    }
}

#[test]
fn thread_count_must_be_positive() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nsh"))
        .args(["lattice", "--matrix", "[[1]]", "--out"])
        .arg(tmp.path())
        .env("NSH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lattice_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("[[1,1],[0,1]]", Some(true), false),
        ("[[2,0],[0,1]]", Some(false), false),
        ("[[1,0],[0,1]]", Some(true), false),
        ("[[sqrt2,0],[0,1]]", None, true),
        ("[[3/2,0],[0,1]]", Some(false), false),
    ];
    for (m, same, irrational) in cases {
        let o = nsh(&["lattice", "--matrix", m], tmp.path());
        assert_eq!(o.status.code(), Some(0));
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_schema("lattice", &doc);
        assert_eq!(doc["same_lattice"].as_bool(), same, "{m}");
        assert_eq!(doc["distinctness"]["sufficient_condition_holds"], irrational, "{m}");
    }
    let o = nsh(&["lattice", "--from", "[[1,0],[0,1]]", "--to", "[[1,0],[0,sqrt2]]"], tmp.path());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["matrix"], "[[1,0],[0,sqrt2]]");
    assert_eq!(doc["distinctness"]["sufficient_condition_holds"], true);
}

#[test]
fn solve_is_deterministic_and_schema_valid() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let doc = solve_small(a.path());
    solve_small(b.path());
    assert_schema("diagnostics", &doc);
    assert_eq!(doc["status"], "converged");
    assert!(doc["result"]["H"].as_f64().unwrap() < 0.0);
    for f in ["diagnostics.json", "field.csv", "iterations.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs between identical runs"
        );
    }
    let iters = std::fs::read_to_string(a.path().join("iterations.csv")).unwrap();
    assert!(iters.starts_with("iter,value,residual,step\n"));
    assert!(iters.lines().count() > 2);
}

#[test]
fn empty_manifold_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nsh(&["solve", "--alpha=-0.5", "--domain", "box:2*pi,2*pi", "--modes", "8", "--beta", "0.9*2S2"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Nehari manifold empty at this resolution"));
    let doc = read_json(&tmp.path().join("diagnostics.json"));
    assert_schema("diagnostics", &doc);
    let starts = doc["starts"].as_array().unwrap();
    assert_eq!(starts.len(), 12);
    assert!(starts.iter().all(|s| s["initial_classification"] == "Monotonous"));
}

#[test]
fn not_converged_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nsh(&[&["solve", "--max-iter", "2"], &SMALL[..]].concat(), tmp.path());
    assert_eq!(o.status.code(), Some(4));
    let doc = read_json(&tmp.path().join("diagnostics.json"));
    assert_eq!(doc["status"], "not_converged");
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "alpha = -1\nbeta = 4\ndomain = \"box:1,1\"\nmodes = 4\nsobolev_starts = 2\n").unwrap();
    let out = tmp.path().join("o");
    let o = nsh(&["constants", "--config", cfg.to_str().unwrap(), "--beta=3"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["beta"].as_f64(), Some(3.0));
    assert_eq!(doc["config"]["sobolev_starts"], 2);
    std::fs::write(&cfg, "alpha = -1\nbogus = 1\n").unwrap();
    let o = nsh(&["constants", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tile_verify_and_fibration_of_a_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let solved = tmp.path().join("solve");
    solve_small(&solved);
    let field = solved.join("field.csv");
    let field = field.to_str().unwrap();

    let tiled = tmp.path().join("tile");
    let o = nsh(&["tile", "--alpha=-0.5", "--beta=3", "--field", field, "--counts", "2,2", "--emit-pgm"], &tiled);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&tiled.join("tiling.json"));
    assert_schema("tiling", &doc);
    let r = &doc["report"];
    assert_eq!(r["copies"], 4);
    assert!(r["additivity_error"].as_f64().unwrap() < 1e-10);
    assert!(r["evenness_error"].as_f64().unwrap() < 1e-10);
    assert!(tiled.join("tiled.pgm").exists());
    let cell = nsh_core::io::read_field(tiled.join("cell.csv")).unwrap();
    assert_eq!(cell.domain().kind(), nsh_core::DomainKind::SkewTorus);

    let ver = tmp.path().join("verify");
    let o = nsh(&["verify", "--alpha=-0.5", "--beta=3", "--field", field, "--modes", "8"], &ver);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&ver.join("verify.json"));
    assert_schema("verify", &doc);
    assert_eq!(doc["passed"], true);

    let fib = tmp.path().join("fib");
    let o = nsh(&["fibration", "--alpha=-0.5", "--beta=3", "--field", field], &fib);
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&fib.join("fibration.json"));
    assert_schema("fibration", &doc);
    assert_eq!(doc["fibration"]["classification"], "NonMonotonous");
    assert!((doc["fibration"]["ridge_t"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn sweep_rows_and_constant_energy_scaling() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nsh(
        &["sweep", "--alpha=-0.5", "--beta=3", "--domain", "box:2*pi,2*pi", "--modes", "8", "--sweep", "1,2,4"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_schema("sweep", &doc);
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 3);
    let ec: Vec<f64> = rows.iter().map(|r| r[col("E_c_minus")].parse().unwrap()).collect();
    assert!((ec[1] / ec[0] - 4.0).abs() < 0.04 && (ec[2] / ec[1] - 4.0).abs() < 0.04);
    for r in &rows {
        assert_eq!(r[col("status")], "converged");
    }
}
