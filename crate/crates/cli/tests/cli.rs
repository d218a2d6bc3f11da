use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn gptcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptcap")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn commands() -> Vec<Vec<String>> {
    let gbit = data("models/gbit.json");
    let idbit = data("channels/idbit.json");
    let bsc = data("channels/bsc.json");
    [
        vec!["validate", "--model", &gbit, "--seed", "1"],
        vec!["dht", "--model", &gbit, "--rho", "corner", "--sigma", "center", "--eps", "1/2"],
        vec!["dpi-check", "--model", "builtin:pentagon", "--instances", "10", "--seed", "2"],
        vec!["continuity", "--model", &gbit, "--rho", "corner", "--sigma", "center", "--eps", "1/2"],
        vec!["capacity", "--channel", &bsc, "--eps", "3/10", "--nmax", "6"],
        vec!["bounds", "--channel", &bsc, "--eps", "3/10"],
        vec!["lemma3", "--model", "builtin:gbit", "--s", "3/2", "--t", "2", "--families", "10", "--seed", "3"],
        vec!["random-coding", "--channel", &idbit, "--n", "2", "--eps-prime", "1/10", "--s", "2", "--t", "3"],
        vec!["sweep", "--channel", &idbit, "--eps", "0", "--m", "2"],
        vec!["gap-probe", "--model", "builtin:gbit", "--seed", "4", "--trials", "50"],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect()
}

fn run_all(dir: &Path) {
    for cmd in commands() {
        let mut args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        let out = dir.to_str().unwrap();
        args.extend(["--out", out]);
        let o = gptcap(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    files
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_all(a.path());
    run_all(b.path());
    let fa = csv_files(a.path());
    assert_eq!(fa.len(), 12);
    for f in fa {
        let name = f.file_name().unwrap();
        let other = b.path().join(name);
        assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(other).unwrap(), "{name:?}");
        assert!(a.path().join(name).with_extension("json").exists());
    }
}

#[test]
fn dht_prints_exact_values() {
    let o = gptcap(&["dht", "--model", &data("models/gbit.json"), "--rho", "corner", "--sigma", "center", "--eps", "1/2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("beta_star=1/4"));
    assert!(stdout(&o).contains("D=2"));
}

#[test]
fn capacity_of_identity_bit() {
    let o = gptcap(&["capacity", "--channel", &data("channels/idbit.json"), "--eps", "0", "--nmax", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("exact_bits=1 "));
}

#[test]
fn sweep_writes_sandwich_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = gptcap(&["sweep", "--channel", &data("channels/idbit.json"), "--eps", "0", "--m", "2", "--out", out]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["exact_bits_per_use", "theorem1_bits_per_use", "theorem2_bits_per_use", "sandwich_holds"] {
        assert!(header.split(',').any(|c| c == col), "{header}");
    }
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn exit_codes() {
    let gbit = data("models/gbit.json");
    assert_eq!(gptcap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gptcap(&["gap-probe", "--model", "builtin:gbit"]).status.code(), Some(2));
    assert_eq!(gptcap(&["dht", "--model", "missing.json", "--rho", "a", "--sigma", "b", "--eps", "1"]).status.code(), Some(2));
    assert_eq!(gptcap(&["dht", "--model", &gbit, "--rho", "corner", "--sigma", "center", "--eps", "1/0"]).status.code(), Some(2));
    assert_eq!(gptcap(&["dht", "--model", &gbit, "--rho", "corner", "--sigma", "center", "--eps", "3/2"]).status.code(), Some(2));
    // an effect family whose sum exceeds u is rejected as input
    let bad = gptcap(&["lemma3", "--model", "builtin:classical2", "--s", "2", "--t", "3", "--effect", "2,0", "--effect", "0,1"]);
    assert_eq!(bad.status.code(), Some(2));
    // not a measurement: the check fails on input validation
    let not_meas = gptcap(&[
        "dpi-check", "--model", "builtin:classical2", "--rho", "1,0", "--sigma", "0,1", "--eps", "1/2", "--effect", "1,0",
    ]);
    assert_eq!(not_meas.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_reports() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap().to_string();
        let o = Command::new(env!("CARGO_BIN_EXE_gptcap"))
            .env("GPTCAP_THREADS", threads)
            .args(["capacity", "--channel", &data("channels/gbit3.json"), "--eps", "3/10", "--nmax", "5", "--out", &out])
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(dir.path().join("best_errors.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
    let bad = Command::new(env!("CARGO_BIN_EXE_gptcap"))
        .env("GPTCAP_THREADS", "zero")
        .args(["validate", "--model", "builtin:gbit", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
