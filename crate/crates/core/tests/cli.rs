use std::fs;
use std::process::{Command, Output};

fn pairsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_scenario(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("scenario.txt");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_file_scans_in_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(
        &dir,
        "# sweep the second analyzer\nexperiment fig1\nangle theta1 0\nscan theta2 0 180 5\noutput csv\n",
    );
    let out = pairsim(&["run", &file]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,value,closed_form,abs_error");
    assert_eq!(lines.len(), 38);
    assert!(lines.iter().any(|l| l.starts_with("theta2=90,0.25,0.25,")));
    assert!(lines[1].starts_with("theta2=0,0,0,"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "scan",
        "--experiment",
        "pdc",
        "--state",
        "psi_u",
        "--angle",
        "theta1=10",
        "--scan",
        "theta2:0:360:7.5",
    ];
    let a = pairsim(&args);
    let b = pairsim(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 50);
}

#[test]
fn chsh_subcommand() {
    let out = pairsim(&["chsh", "--state", "psi_e"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("S,-2.82842712475,"), "{row}");

    // non-canonical settings are checked against their closed form too
    let out = pairsim(&[
        "chsh",
        "--a",
        "-45",
        "--a-prime",
        "90",
        "--b",
        "45",
        "--b-prime",
        "135",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = pairsim(&[
        "scan",
        "--experiment",
        "fig3",
        "--state",
        "psi_u",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows[0]["param"], "visibility");
    assert!((rows[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn same_channel_experiment() {
    let out = pairsim(&[
        "scan",
        "--experiment",
        "same-channel",
        "--state",
        "psi_u",
        "--channel",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("same_channel_probability,0.25,0.25,"));
}

#[test]
fn parse_errors_exit_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(&dir, "experiment pdc\nangle theta1 banana\n");
    let out = pairsim(&["run", &file]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["scan", "--experiment", "fig2", "--state", "circular_pair"][..],
        &["scan", "--experiment", "fig1", "--scan", "theta2:0:90:0"][..],
        &["scan", "--experiment", "fig1", "--scan", "theta2:90:0:5"][..],
        &["scan", "--experiment", "fig1", "--angle", "theta9=3"][..],
        &["scan", "--experiment", "nope"][..],
        &["run", "/nonexistent/scenario.txt"][..],
        &["scan", "--experiment", "fig1", "--bogus"][..],
    ] {
        let out = pairsim(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn tight_tolerance_reports_mismatch() {
    // a negative tolerance rejects every row that carries a closed form
    let out = pairsim(&["scan", "--experiment", "cascade", "--tolerance", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stdout.is_empty());
}

#[test]
fn cascade_couplings_scale_the_rate() {
    let out = pairsim(&["scan", "--experiment", "cascade", "--geometry", "0.5 1 1 1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("coincidence,0.125,0.125,"));
}

#[test]
fn selfcheck_table() {
    let out = pairsim(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for n in 1..=10 {
        assert!(
            text.lines().any(|l| l.starts_with(&format!("c{n}:"))),
            "criterion {n} missing"
        );
    }
}
