use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duron-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eval_prints_the_composed_bracket() {
    let o = lab(&["algebra", "eval", "[A,B][B,C]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[A,C]");
}

#[test]
fn eval_of_a_broken_chain_is_an_error() {
    let o = lab(&["algebra", "eval", "[A,B][C,D]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[A,B][C,D]"));
}

#[test]
fn thermofield_reports_the_ground_amplitude() {
    let o = lab(&["thermofield", "--theta", "0.8", "--n", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "vacuum.theta=0.8.c0-cosh")
        .expect("c0 row");
    assert!(row["value"].as_f64().unwrap() <= 1e-8);
    assert_eq!(row["anchor"], "thermo.vacuum");
    assert_eq!(report["summary"]["failed"], 0);
    assert!(report["summary"]["runtime_ms"].is_null());
}

#[test]
fn bad_values_name_their_field() {
    for (args, field) in [
        (vec!["superops", "--tol", "fast"], "`tol`"),
        (vec!["superops", "--levels", "1"], "`levels`"),
        (vec!["bilocal-classical", "--system", "grid1d"], "`system`"),
        (vec!["thermofield", "--theta-sweep", "0:1"], "`theta_sweep`"),
    ] {
        let o = lab(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert!(
            err.starts_with("config:") && err.contains(field),
            "{args:?}: {err}"
        );
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# moyal only\nsuites = moyal\nseed = 11\ntol = 2\n").unwrap();
    let o = lab(&["run", "--config", cfg.to_str().unwrap(), "--seed", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["config"]["seed"], 12);
    assert_eq!(report["config"]["tol"], 2.0);
    assert_eq!(report["config"]["suites"], serde_json::json!(["moyal"]));

    std::fs::write(&cfg, "seed = 3\ncolour = blue\n").unwrap();
    let o = lab(&["moyal", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`colour` (line 2)"));
}

#[test]
fn failing_checks_exit_one_and_are_listed() {
    // a tolerance scale this small leaves only the exact checks standing
    let o = lab(&["superops", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL superops/spectrum.liouvillian"));
}

#[test]
fn csv_table_with_json_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("classical.csv");
    let o = lab(&[
        "bilocal-classical",
        "--format",
        "csv",
        "--grid",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().take(3).collect::<Vec<_>>(),
        ["system", "x1", "t1"]
    );
    assert_eq!(reader.records().count(), 2 * 9);
    let sidecar: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("classical.report.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["summary"]["failed"], 0);
}

#[test]
fn moyal_bracket_of_cubics() {
    let o = lab(&["moyal", "bracket", "--f", "x^3", "--g", "p^3"]);
    assert_eq!(stdout(&o).trim(), "9*x^2*p^2 - 3/2*h^2");
    let o = lab(&[
        "moyal", "bracket", "--f", "x", "--g", "p", "--kind", "poisson", "--json",
    ]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["terms"][0]["coefficient"], "1");
}

#[test]
fn output_path_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(
            lab(&["moyal", "--seed", "5", "--out", p.to_str().unwrap()])
                .status
                .code(),
            Some(0)
        );
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
