use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cpinf::cli::DimsTable;
use cpinf::GradedDims;

fn cpinf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpinf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(cpinf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cpinf(&["ext-table", "--source", "P(-1)", "--target", "R"]).status.code(), Some(2));
    assert_eq!(cpinf(&["quiver", "--relations", "neither"]).status.code(), Some(2));
    let shallow = cpinf(&["ext-table", "--source", "P(-1)", "--target", "P(-1)", "--max-degree", "4", "--cutoff", "1"]);
    assert_eq!(shallow.status.code(), Some(3));
    let unstable = cpinf(&["ext-table", "--source", "P(-1)", "--target", "P(-1)", "--max-degree", "4", "--cutoff", "5"]);
    assert_eq!(unstable.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unstable.stderr).contains("unstable"));
    assert_eq!(cpinf(&["--help"]).status.code(), Some(0));
}

#[test]
fn ext_table_json_round_trips() {
    let o = cpinf(&["--format", "json", "ext-table", "--source", "P(-1)", "--target", "P(-1)", "--max-degree", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let t: DimsTable = serde_json::from_str(&text).unwrap();
    assert_eq!(t.rows[0].dims, GradedDims::from_slice(0, &[1, 1, 2, 2, 3, 3]));
    assert_eq!(t.meta.cutoff, 13);
    assert!(t.meta.stable);
    let again: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_value(&t).unwrap(), again);
}

#[test]
fn quiver_and_koszul_tables_round_trip() {
    for args in [
        vec!["--format", "json", "quiver", "--table"],
        vec!["--format", "json", "koszul", "--nmax", "6"],
        vec!["--format", "json", "cohomology", "--a", "2", "--m", "-3", "--n", "1"],
    ] {
        let o = cpinf(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let t: DimsTable = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(serde_json::to_string_pretty(&t).unwrap() + "\n", stdout(&o));
    }
}

#[test]
fn latex_table() {
    let o = cpinf(&["--format", "latex", "quiver"]);
    let s = stdout(&o);
    assert!(s.starts_with("\\begin{tabular}"));
    assert!(s.contains("Hom(E0'',F1) & 1 & 1 & 2 & 2"));
}

#[test]
fn mutate_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let gram = dir.path().join("gram.json");
    fs::write(&gram, r#"{"labels": ["O", "O(1)", "O(2)"], "gram": [[1, 3, 6], [0, 1, 3], [0, 0, 1]]}"#).unwrap();
    let script = dir.path().join("script.txt");
    fs::write(&script, "# swap the last two\nL 1\nR 1\n").unwrap();
    let o = cpinf(&["--format", "json", "mutate", "--gram", gram.to_str().unwrap(), "--script", script.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gram"], serde_json::json!([[1, 3, 6], [0, 1, 3], [0, 0, 1]]));
    fs::write(&script, "L 7\n").unwrap();
    let o = cpinf(&["mutate", "--gram", gram.to_str().unwrap(), "--script", script.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn paper_replay() {
    let o = cpinf(&["mutate", "--paper"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chi(E0'', E1) = 2 (expected 2)"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["curve", "mutations", "quiver", "koszul"] {
        let o = cpinf(&["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
    }
    let o = cpinf(&["verify", "curve"]);
    assert!(stdout(&o).contains("12/12 passed"));
}

fn copy_data(to: &Path) {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for f in ["ext_tables.json", "ext_tables.sha256"] {
        fs::copy(src.join(f), to.join(f)).unwrap();
    }
}

#[test]
fn corrupted_data_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    copy_data(dir.path());
    let ok = cpinf(&["verify", "mutations", "--data", dir.path().to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let json = dir.path().join("ext_tables.json");
    let text = fs::read_to_string(&json).unwrap().replacen("{\"0\": 2}", "{\"0\": 3}", 1);
    fs::write(&json, text).unwrap();
    let bad = cpinf(&["verify", "all", "--data", dir.path().to_str().unwrap()]);
    assert_ne!(bad.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("checksum"));
}

#[test]
fn resolve_and_compose() {
    let o = cpinf(&["resolve", "P(-1)", "--depth", "2"]);
    assert!(stdout(&o).contains("degree -2: O(-2,-2)"));
    let o = cpinf(&["compose", "eps", "theta"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("eps . theta in Ext^3"));
    assert_eq!(cpinf(&["compose", "eps", "zeta"]).status.code(), Some(2));
}
