use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noneuclid"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_passes_with_zero() {
    let out = run(&["verify", "--suite", "projection", "--geometry", "hyperbolic", "--trials", "1000", "--seed", "7", "--tol", "1e-9"]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    assert!(text(&out).contains("1000/1000 trials passed"), "{}", text(&out));
}

#[test]
fn verify_with_impossible_tolerance_fails_with_one() {
    let out = run(&["verify", "--suite", "menelaus", "--geometry", "spherical", "--trials", "50", "--seed", "3", "--tol", "0"]);
    assert_eq!(code(&out), 1, "{}", text(&out));
    assert!(text(&out).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify", "--suite", "nope", "--geometry", "euclidean"][..],
        &["verify", "--suite", "menelaus", "--geometry", "elliptic"],
        &["verify", "--suite", "menelaus", "--geometry", "euclidean", "--trials", "0"],
        &["verify", "--suite", "menelaus", "--geometry", "euclidean", "--tol", "-1"],
        &["gen", "--suite", "carnot-n", "--geometry", "euclidean", "--degree", "4"],
        &["frobnicate"],
        &[],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["verify", "--help"])), 0);
}

#[test]
fn check_reports_fixture_outcomes() {
    let golden = fixture("menelaus_golden.json");
    let out = run(&["check", golden.to_str().unwrap(), "-v"]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    assert!(text(&out).contains("3 of 3 assertions passed"));

    let broken = fixture("broken_assertion.json");
    let out = run(&["check", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(text(&out).contains("FAIL menelaus"));
}

#[test]
fn check_rejects_invalid_scenes_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"geometry": "hyperbolic", "points": {"P": [0, 0, 2]}}"#).unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("surface membership"));
    assert_eq!(code(&run(&["check", dir.path().join("missing.json").to_str().unwrap()])), 2);
}

#[test]
fn gen_is_byte_identical_and_checks_clean() {
    let args = ["gen", "--suite", "cross-ratio", "--geometry", "spherical", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.json");
    let out = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    assert_eq!(code(&run(&["check", path.to_str().unwrap()])), 0);
}

#[test]
fn report_csv_has_one_row_per_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = run(&["verify", "--suite", "menelaus", "--geometry", "euclidean", "--trials", "20", "--seed", "5", "--report", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "suite,geometry,seed,trial,invariant,predicate,value,deviation,tol,relation,pass");
    assert_eq!(rows.len(), 1 + 20 * 3);
    let value = rows[1].split(',').nth(6).unwrap();
    let mantissa = value.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17, "{value}");
    assert!(csv.lines().any(|l| l.starts_with("# suite=menelaus geometry=euclidean trials=20 seed=5 passed=20 failed=0")));
}

#[test]
fn tolerance_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tol.toml");
    let strict = noneuclid_harness::config::DEFAULT_TOLERANCES.replace("menelaus = 1e-8", "menelaus = 0.0");
    std::fs::write(&path, strict).unwrap();
    let args = ["verify", "--suite", "menelaus", "--geometry", "hyperbolic", "--trials", "200", "--seed", "2"];
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(code(&run(&[&args[..], &["--config", path.to_str().unwrap()]].concat())), 1);

    std::fs::write(&path, "[run]\ntrials = 5\nseed = 1\n").unwrap();
    assert_eq!(code(&run(&[&args[..], &["--config", path.to_str().unwrap()]].concat())), 2);
    std::fs::write(&path, "not toml [").unwrap();
    assert_eq!(code(&run(&[&args[..], &["--config", path.to_str().unwrap()]].concat())), 2);
}

#[test]
fn export_plot_writes_points_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("carnot.json");
    assert_eq!(code(&run(&["gen", "--suite", "carnot", "--geometry", "spherical", "--seed", "9", "--out", scene.to_str().unwrap()])), 0);
    let out = dir.path().join("plot.csv");
    for plane in ["z=1", "pole", "0,0,1"] {
        let r = run(&["export-plot", scene.to_str().unwrap(), "--plane", plane, "--grid", "128", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&r), 0, "{plane}: {}", String::from_utf8_lossy(&r.stderr));
        let csv = std::fs::read_to_string(&out).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("element,kind,polyline,vertex,x,y"));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert!(rows.iter().any(|r| r[0] == "A" && r[1] == "point"));
        assert!(rows.iter().filter(|r| r[0] == "Q" && r[1] == "curve").count() > 20);
    }
    let golden = fixture("menelaus_golden.json");
    assert_eq!(code(&run(&["export-plot", golden.to_str().unwrap(), "--plane", "pole"])), 2);
    assert_eq!(code(&run(&["export-plot", golden.to_str().unwrap(), "--plane", "0,0"])), 2);
}
