use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn sce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn malformed_file_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sce");
    std::fs::write(&bad, "kind = \"index\"\n[[messages\n").unwrap();
    let o = sce(&["evaluate", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn unknown_clause_exits_2() {
    assert_eq!(sce(&["verify", "thm7"]).status.code(), Some(2));
}

#[test]
fn verify_thm1_fwd_passes() {
    let o = sce(&["verify", "thm1_fwd", "--trials", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result = \"pass\""));
}

#[test]
fn verify_lemma1_passes() {
    let o = sce(&["verify", "lemma1", "--trials", "30", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn large_error_ceiling_is_a_hypothesis_error() {
    let o = sce(&["verify", "thm2_p2b", "--epsilon", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis"));
}

#[test]
fn runs_are_deterministic() {
    let a = sce(&["verify", "thm2_p2b", "--trials", "10", "--seed", "5"]);
    let b = sce(&["verify", "thm2_p2b", "--trials", "10", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let a = sce(&["map", "i2n", path(&data("fig1a.sce"))]);
    let b = sce(&["map", "i2n", path(&data("fig1a.sce"))]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn augmenting_an_augmented_file_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let again = dir.path().join("again.sce");
    let o = sce(&["augment", path(&data("fig2b.sce")), "--output", path(&again)]);
    assert_eq!(o.status.code(), Some(0));
    let once = std::fs::read_to_string(data("fig2b.sce")).unwrap();
    assert_eq!(std::fs::read_to_string(&again).unwrap(), once);
}

#[test]
fn one_time_pad_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let ic = dir.path().join("ic.sce");
    let nc = dir.path().join("nc.sce");
    let o = sce(&["translate", "n2i-aug", path(&data("fig2a.sce")), "--output", path(&ic)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("satisfied = true"));

    let o = sce(&["evaluate", path(&ic), "--epsilon", "0", "--eta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("feasible = true"));

    let o = sce(&["translate", "i2n-aug", path(&ic), "--network", path(&data("fig2b.sce")), "--output", path(&nc)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("clause = \"thm2_p2a\""));
    let o = sce(&["evaluate", path(&nc)]);
    assert!(stdout(&o).contains("error = \"0\""));
}

#[test]
fn out_of_range_sigma_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ic = dir.path().join("ic.sce");
    sce(&["translate", "n2i-aug", path(&data("fig2a.sce")), "--output", path(&ic)]);
    let o = sce(&["translate", "i2n-aug", path(&ic), "--network", path(&data("fig2b.sce")), "--sigma", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_targets_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let leaky = dir.path().join("leaky.sce");
    // Edge 0 carries the message in the clear, so r1 sees one full bit.
    let text = std::fs::read_to_string(data("fig2a.sce"))
        .unwrap()
        .replacen("entries = [0, 1, 1, 0]", "entries = [0, 0, 1, 1]", 1);
    std::fs::write(&leaky, text).unwrap();
    let o = sce(&["evaluate", path(&leaky), "--eta", "0.5"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("feasible = false"));
}

#[test]
fn bounds_from_parameters() {
    let o = sce(&["bounds", "--epsilon", "1/10", "--nhat", "3", "--tv", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("zeta_branch = \"total-variation\""));
}
