//! End-to-end tests of the `dga` binary: exit codes per verdict, file
//! round-trips through `-o`, and a golden JSON report per subcommand.
//!
//! Regenerate goldens after an intentional output change with
//! `UPDATE_GOLDEN=1 cargo test -p cdga-cli --test cli`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dga"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn check_golden(name: &str, args: &[&str], expected_code: i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(
        out.status.code(),
        Some(expected_code),
        "exit code for {name}: stderr = {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).expect("utf-8 report");
    let path = golden_path(name);
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::write(&path, &stdout).expect("write golden");
        return;
    }
    let golden = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden {name}; run with UPDATE_GOLDEN=1"));
    assert_eq!(stdout, golden, "JSON report drifted for {name}");
}

#[test]
fn golden_validate() {
    let f = data("hopf.dga");
    check_golden(
        "validate.json",
        &["validate", f.to_str().unwrap(), "--max-degree", "10"],
        0,
    );
}

#[test]
fn golden_cohomology() {
    let f = data("hopf.dga");
    check_golden(
        "cohomology.json",
        &["cohomology", f.to_str().unwrap(), "--max-degree", "10"],
        0,
    );
}

#[test]
fn golden_attach() {
    let f = data("s2.dga");
    check_golden(
        "attach.json",
        &[
            "attach",
            f.to_str().unwrap(),
            "--class",
            "a",
            "--max-degree",
            "10",
        ],
        0,
    );
}

#[test]
fn golden_gysin() {
    let f = data("hopf_fib.dga");
    check_golden(
        "gysin.json",
        &["gysin", f.to_str().unwrap(), "--max-degree", "8"],
        0,
    );
}

#[test]
fn golden_kill_even() {
    let f = data("cp2.dga");
    check_golden(
        "kill-even.json",
        &[
            "kill-even",
            f.to_str().unwrap(),
            "--max-degree",
            "9",
            "--max-stages",
            "6",
        ],
        0,
    );
}

#[test]
fn golden_subtower() {
    let f = data("cp2.dga");
    check_golden(
        "subtower.json",
        &[
            "subtower",
            f.to_str().unwrap(),
            "--class",
            "a",
            "--max-degree",
            "9",
        ],
        0,
    );
}

#[test]
fn golden_fiber() {
    let f = data("kill_x.dga");
    check_golden(
        "fiber.json",
        &["fiber", f.to_str().unwrap(), "--max-degree", "8"],
        0,
    );
}

#[test]
fn golden_probe() {
    let f = data("kill_x.dga");
    check_golden(
        "probe.json",
        &["probe", f.to_str().unwrap(), "--max-degree", "10"],
        0,
    );
}

#[test]
fn golden_minimal_model() {
    let f = data("hopf.dga");
    check_golden(
        "minimal-model.json",
        &["minimal-model", f.to_str().unwrap(), "--max-degree", "9"],
        0,
    );
}

#[test]
fn golden_compare_models() {
    let f = data("hopf.dga");
    check_golden(
        "compare-models.json",
        &["compare-models", f.to_str().unwrap(), "--max-degree", "7"],
        0,
    );
}

#[test]
fn golden_psi() {
    let f = data("s3.dga");
    check_golden(
        "psi.json",
        &[
            "psi",
            f.to_str().unwrap(),
            "--class",
            "x",
            "--max-degree",
            "9",
        ],
        0,
    );
}

#[test]
fn golden_injectivity() {
    // The killed class makes this a property violation: exit 1.
    let f = data("kill_x.dga");
    check_golden(
        "injectivity.json",
        &["injectivity", f.to_str().unwrap(), "--max-degree", "12"],
        1,
    );
}

#[test]
fn golden_sphere_engine() {
    let f = data("kill_x.dga");
    check_golden(
        "sphere-engine.json",
        &[
            "sphere-engine",
            f.to_str().unwrap(),
            "--max-degree",
            "12",
            "--power-bound",
            "6",
        ],
        0,
    );
}

#[test]
fn golden_search() {
    let f = data("s3.dga");
    check_golden(
        "search.json",
        &[
            "search",
            f.to_str().unwrap(),
            "--class",
            "x",
            "--max-degree",
            "10",
            "--fiber-degrees",
            "2",
            "--max-fiber-gens",
            "1",
            "--coeff-range",
            "-1,1",
        ],
        0,
    );
}

#[test]
fn golden_lift() {
    let f = data("kill_x.dga");
    check_golden(
        "lift.json",
        &["lift", f.to_str().unwrap(), "--max-degree", "6"],
        0,
    );
}

#[test]
fn exit_code_invalid_input() {
    // Degree mismatch: |b| = 3 needs a degree-4 differential.
    let dir = std::env::temp_dir().join("dga_cli_bad");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.dga");
    std::fs::write(&bad, "gen a 2\ngen b 3\nd b = a\n").unwrap();
    let out = run(&[
        "cohomology",
        bad.to_str().unwrap(),
        "--max-degree",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree"));

    // Missing file is invalid input too.
    let out = run(&["cohomology", "/nonexistent.dga", "--max-degree", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_resource_bound() {
    // A tiny enumeration cap trips the resource-bound exit.
    let f = data("s3.dga");
    let out = run(&[
        "search",
        f.to_str().unwrap(),
        "--class",
        "x",
        "--max-degree",
        "10",
        "--fiber-degrees",
        "2,3",
        "--max-fiber-gens",
        "2",
        "--coeff-range",
        "-2,2",
        "--cap",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // A stage bound of zero leaves the tower unconverged: also code 3.
    let out = run(&[
        "kill-even",
        data("cp2.dga").to_str().unwrap(),
        "--max-degree",
        "9",
        "--max-stages",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_property_violated() {
    // d^2 != 0 is a validation failure, exit 1.
    let dir = std::env::temp_dir().join("dga_cli_dsq");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("dsq.dga");
    std::fs::write(&bad, "gen x 3\ngen v 2\ngen w 3\nd v = x\nd w = v^2\n").unwrap();
    let out = run(&["validate", bad.to_str().unwrap(), "--max-degree", "6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn attach_output_reparses_and_agrees() {
    let dir = std::env::temp_dir().join("dga_cli_attach");
    std::fs::create_dir_all(&dir).unwrap();
    let outfile = dir.join("hopf_out.dga");
    let out = run(&[
        "attach",
        data("s2.dga").to_str().unwrap(),
        "--class",
        "a",
        "--max-degree",
        "10",
        "-o",
        outfile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // The written fibration validates and has rational-S^3 cohomology.
    let out = run(&[
        "validate",
        outfile.to_str().unwrap(),
        "--max-degree",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "--json",
        "cohomology",
        outfile.to_str().unwrap(),
        "--max-degree",
        "10",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        report["data"]["betti"],
        serde_json::json!([1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0])
    );
}

#[test]
fn kill_even_output_reparses() {
    let dir = std::env::temp_dir().join("dga_cli_tower");
    std::fs::create_dir_all(&dir).unwrap();
    let outfile = dir.join("tower.dga");
    let out = run(&[
        "kill-even",
        data("cp2.dga").to_str().unwrap(),
        "--max-degree",
        "9",
        "--max-stages",
        "6",
        "-o",
        outfile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "validate",
        outfile.to_str().unwrap(),
        "--max-degree",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn threads_flag_is_deterministic() {
    let f = data("hopf.dga");
    let one = run(&[
        "--json",
        "--threads",
        "1",
        "cohomology",
        f.to_str().unwrap(),
        "--max-degree",
        "10",
    ]);
    let four = run(&[
        "--json",
        "--threads",
        "4",
        "cohomology",
        f.to_str().unwrap(),
        "--max-degree",
        "10",
    ]);
    assert_eq!(one.stdout, four.stdout);
}
