use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn cosemo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosemo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = cosemo(&["validate", &fixture("hotel_agency.csm")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stderr(&ok).is_empty());

    let bad = cosemo(&["validate", &fixture("bad_c2.csm")]);
    assert_eq!(bad.status.code(), Some(1));
    let lines: Vec<String> = stderr(&bad).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].contains("E-C2"));

    let json = cosemo(&["validate", "--json", &fixture("bad_c2.csm")]);
    let v: serde_json::Value = serde_json::from_str(stderr(&json).trim()).unwrap();
    assert_eq!(v["code"], "E-C2");
}

#[test]
fn warnings_do_not_fail_validation() {
    let o = cosemo(&["validate", &fixture("healthcare.csm")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stderr(&o).matches("W-FP").count(), 2);
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(cosemo(&["validate", "/no/such/file.csm"]).status.code(), Some(2));
    assert_eq!(cosemo(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cosemo(&["render", &fixture("gp_lab.csm"), "--format", "svg"]).status.code(), Some(2));
    let bad_bounds = cosemo(&[
        "explore",
        &fixture("gp_lab.csm"),
        "--seed",
        &fixture("empty.seed.json"),
        "--query",
        &fixture("hospital_cleaning.queries.json"),
        "--max-steps",
        "0",
    ]);
    assert_eq!(bad_bounds.status.code(), Some(2));
}

#[test]
fn syntax_errors_exit_1_with_spans() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.csm");
    std::fs::write(&path, "model \"M\" {\n  role\n}\n").unwrap();
    let o = cosemo(&["fmt", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.csm:3:1"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn classify_healthcare_table_and_json() {
    let o = cosemo(&["classify", &fixture("healthcare.csm")]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    let row = |a: &str, b: &str| {
        table
            .lines()
            .find(|l| l.starts_with(&format!("{a:<10} | {b}")))
            .unwrap_or_else(|| panic!("no {a}->{b} row in\n{table}"))
            .to_owned()
    };
    assert!(row("GP", "Laboratory").contains("| loose"));
    assert!(row("GP", "Hospital").contains("| very loose"));

    let j1 = stdout(&cosemo(&["classify", "--json", &fixture("healthcare.csm")]));
    let j2 = stdout(&cosemo(&["classify", "--json", &fixture("healthcare.csm")]));
    assert_eq!(j1, j2);
    let v: serde_json::Value = serde_json::from_str(&j1).unwrap();
    assert_eq!(v["pair_summary"]["GP->Laboratory"], serde_json::json!(["loose"]));
}

#[test]
fn classify_refuses_invalid_models() {
    assert_eq!(cosemo(&["classify", &fixture("bad_c3.csm")]).status.code(), Some(1));
}

#[test]
fn fmt_is_idempotent_and_converts_formats() {
    let dir = tempfile::tempdir().unwrap();
    let once = stdout(&cosemo(&["fmt", &fixture("hotel_agency.csm")]));
    let path = dir.path().join("hotel.csm");
    std::fs::write(&path, &once).unwrap();
    let twice = stdout(&cosemo(&["fmt", path.to_str().unwrap()]));
    assert_eq!(once, twice);

    let json = stdout(&cosemo(&["fmt", "--json", &fixture("hotel_agency.csm")]));
    let json_path = dir.path().join("hotel.json");
    std::fs::write(&json_path, &json).unwrap();
    assert_eq!(stdout(&cosemo(&["fmt", json_path.to_str().unwrap()])), once);
    assert_eq!(cosemo(&["validate", json_path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn simulate_strict_and_lenient() {
    let args = |strict: bool| {
        let mut a = vec![
            "simulate".to_owned(),
            fixture("hotel_agency.csm"),
            "--seed".to_owned(),
            fixture("hotel_agency.seed.json"),
            "--script".to_owned(),
            fixture("hotel_agency.script.json"),
        ];
        if strict {
            a.push("--strict".to_owned());
        }
        a
    };
    let lenient = Command::new(env!("CARGO_BIN_EXE_cosemo")).args(args(false)).output().unwrap();
    assert_eq!(lenient.status.code(), Some(0));
    let outcomes: Vec<String> = stdout(&lenient)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["outcome"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(outcomes, ["Fired", "NotEnabled"]);
    let strict = Command::new(env!("CARGO_BIN_EXE_cosemo")).args(args(true)).output().unwrap();
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn simulate_rejects_malformed_scripts() {
    let o = cosemo(&[
        "simulate",
        &fixture("hotel_agency.csm"),
        "--seed",
        &fixture("hotel_agency.seed.json"),
        "--script",
        &fixture("hotel_agency.csm"),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explore_summary() {
    let o = cosemo(&[
        "explore",
        &fixture("hotel_agency.csm"),
        "--seed",
        &fixture("hotel_agency.seed.json"),
        "--query",
        &fixture("hotel_agency.queries.json"),
        "--max-objects",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bound_exceeded"], false);
    let reachable: Vec<bool> = v["queries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["reachable"].as_bool().unwrap())
        .collect();
    assert_eq!(reachable, [false, false, false]);
}

#[test]
fn render_to_file_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cleaning.dot");
    let o = cosemo(&[
        "render",
        &fixture("hospital_cleaning.csm"),
        "--format",
        "dot",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph \"Hospital room cleaning\" {"));

    let m = cosemo(&["render", &fixture("hotel_agency.csm"), "--format", "mermaid"]);
    assert!(stdout(&m).starts_with("flowchart LR\n"));
    assert_eq!(cosemo(&["render", &fixture("bad_c1.csm"), "--format", "dot"]).status.code(), Some(1));
}

#[test]
fn explain_codes() {
    let o = cosemo(&["explain", "E-C5"]);
    assert!(stdout(&o).contains("reference+"));
    assert_eq!(cosemo(&["explain", "E-NOPE"]).status.code(), Some(2));
}
