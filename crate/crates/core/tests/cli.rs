//! End-to-end checks of the command-line interface: exit codes, output
//! content, and indifference to the environment.

use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plumbstein"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", &fixture("fig1.plumb")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("\"ok\": true"));

    let bad = run(&["validate", &fixture("bad_vertex.plumb")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("bad-vertex"));

    let val4 = run(&["validate", &fixture("valence4.plumb")]);
    assert_eq!(val4.status.code(), Some(3));
    assert!(stdout(&val4).contains("valence-exceeded"));
}

#[test]
fn parse_errors_exit_2() {
    let missing = run(&["tori", "/nonexistent/file.plumb"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = std::env::temp_dir().join("plumbstein_cli_bad.plumb");
    std::fs::write(&dir, "edge a b\n").unwrap();
    let dangling = run(&["tori", dir.to_str().unwrap()]);
    assert_eq!(dangling.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&dangling.stderr).into_owned();
    assert!(msg.contains("not a declared vertex"), "stderr: {msg}");
}

#[test]
fn tori_counts_seven() {
    let out = run(&["tori", &fixture("fig1.plumb")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"count\": 7"));
}

#[test]
fn count_modes() {
    let lower = run(&["count", &fixture("fig1.plumb"), "--mode", "lower"]);
    assert_eq!(lower.status.code(), Some(0));
    assert_eq!(stdout(&lower), "2880\n");

    let mintwist = run(&["count", &fixture("family_y.plumb"), "--mode", "mintwist"]);
    assert_eq!(stdout(&mintwist), "4\n");

    let torsion = run(&[
        "count",
        &fixture("family_y.plumb"),
        "--mode",
        "torsion",
        "--m",
        "1",
    ]);
    assert_eq!(stdout(&torsion), "2\n");

    // shape mismatch: a lens-space chain has no four-legged decomposition
    let lens = run(&[
        "count",
        &fixture("lens.plumb"),
        "--mode",
        "torsion",
        "--m",
        "1",
    ]);
    assert_eq!(lens.status.code(), Some(3));

    let badmode = run(&["count", &fixture("fig1.plumb"), "--mode", "nonsense"]);
    assert_eq!(badmode.status.code(), Some(2));
}

#[test]
fn cf_subcommands() {
    assert_eq!(stdout(&run(&["cf", "expand", "7/3"])), "3,2,2\n");
    assert_eq!(stdout(&run(&["cf", "eval", "3,2,2"])), "7/3\n");
    assert_eq!(stdout(&run(&["cf", "eval", "5"])), "5\n");
    assert_eq!(
        stdout(&run(&[
            "cf",
            "transform",
            "--matrix",
            "-3,1,-5,2",
            "--slope",
            "1"
        ])),
        "3/2\n"
    );
    assert_eq!(stdout(&run(&["cf", "chain", "3,2"])), "[[-3,-1],[5,2]]\n");
    assert_eq!(stdout(&run(&["cf", "count-torus", "3,2,2"])), "2\n");
    assert_eq!(stdout(&run(&["cf", "count-annulus", "3,2,3"])), "4\n");

    let domain = run(&["cf", "expand", "1/1"]);
    assert_eq!(domain.status.code(), Some(2));
    let singular = run(&["cf", "transform", "--matrix", "2,0,0,2", "--slope", "1"]);
    assert_eq!(singular.status.code(), Some(2));
}

#[test]
fn stein_outputs_diagram_json() {
    let out = run(&["stein", &fixture("fig1.plumb")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["count"], "2880");
    let diagram = &value["diagram"];
    assert_eq!(diagram["one_handles"].as_array().unwrap().len(), 2);
    let first = &diagram["two_handles"][0];
    assert!(first["tb"].is_i64());
    assert!(first["rot"].is_i64());
    assert!(first["framing"].is_i64());
    assert!(first["links"].is_array());
    // smooth framing = tb - 1 = weight
    assert_eq!(
        first["tb"].as_i64().unwrap() - 1,
        first["framing"].as_i64().unwrap()
    );

    let enumerated = run(&["stein", &fixture("cycle.plumb"), "--enumerate"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&enumerated)).unwrap();
    assert_eq!(
        value["enumeration"]["rotation_vectors"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn stein_handles_k33_and_wrap_reports_it() {
    let stein = run(&["stein", &fixture("k33_plus.plumb")]);
    assert_eq!(stein.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&stein)).unwrap();
    assert_eq!(value["smooth"]["one_handles"].as_array().unwrap().len(), 4);
    assert_eq!(value["smooth"]["crossings"].as_array().unwrap().len(), 1);

    // wrap itself cannot planarize K3,3: unsupported shape with certificate
    let wrap = run(&["wrap", &fixture("k33_plus.plumb")]);
    assert_eq!(wrap.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&wrap.stderr).into_owned();
    assert!(msg.contains("branch_vertices"), "stderr: {msg}");
}

#[test]
fn wrap_formats() {
    let json_out = run(&["wrap", &fixture("fig1.plumb")]);
    assert_eq!(json_out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    assert_eq!(value["clusters"].as_array().unwrap().len(), 1);

    let svg = run(&["wrap", &fixture("fig5.plumb"), "--format", "svg"]);
    assert!(stdout(&svg).starts_with("<svg"));

    // multi-part graphs only render as json
    let refuse = run(&["wrap", &fixture("fig1.plumb"), "--format", "svg"]);
    assert_eq!(refuse.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join("plumbstein_cli_out.txt");
    let _ = std::fs::remove_file(&path);
    let out = run(&[
        "count",
        &fixture("fig1.plumb"),
        "--mode",
        "lower",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "2880\n");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn usage_and_unknown_commands() {
    let none = run(&[]);
    assert_eq!(none.status.code(), Some(2));
    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    let help = run(&["help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("usage"));
}

#[test]
fn environment_does_not_influence_output() {
    let plain = run(&["count", &fixture("fig1.plumb"), "--mode", "lower"]);
    let seeded = Command::new(env!("CARGO_BIN_EXE_plumbstein"))
        .args(["count", &fixture("fig1.plumb"), "--mode", "lower"])
        .env("PLUMBSTEIN_SEED", "12345")
        .output()
        .expect("binary runs");
    assert_eq!(plain.stdout, seeded.stdout);
}
