use std::process::{Command, Output};

fn dop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dop")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn equilibrium_prints_the_band_structure() {
    let o = dop(&["equilibrium", "--potential", "saturated", "--grid", "400"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("saturated   [true]"), "{s}");
}

#[test]
fn exact_lists_recurrence_rows() {
    let o = dop(&["exact", "--coeffs", "0,0,1", "--n", "6", "--at", "0.3", "--at", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let rows = s.lines().filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit())).count();
    assert_eq!(rows, 7, "{s}");
    assert_eq!(s.matches("P_6(").count(), 2);
}

#[test]
fn asympt_tags_regions() {
    let o = dop(&["asympt", "--potential", "gaussian", "--grid", "400", "--n", "32", "--at", "0", "--at", "3", "--at", "0,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("[band]") && s.contains("[void]"), "{s}");
}

#[test]
fn validate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = dop(&["validate", "--potential", "gaussian", "--grid", "400", "--n-list", "8,16", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert!(csv.lines().count() > 10);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["certificates"]["valid"], true);
}

#[test]
fn dump_grids_writes_density() {
    let dir = tempfile::tempdir().unwrap();
    let o = dop(&["dump-grids", "--potential", "gaussian", "--grid", "400", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let d = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert!(d.starts_with("x,rho,log_potential"));
}

#[test]
fn bad_input_exits_with_two() {
    let o = dop(&["equilibrium", "--potential", "no-such-potential"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
