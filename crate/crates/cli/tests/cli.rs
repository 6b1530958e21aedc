use std::fs;
use std::process::{Command, Output};

fn irsbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irsbf")).args(args).output().unwrap()
}

const SMALL_SWEEP: [&str; 9] = [
    "sweep-n",
    "--seed",
    "7",
    "--channels",
    "3",
    "--symbols",
    "100",
    "--values",
    "4,12",
];

#[test]
fn repeated_runs_are_byte_identical() {
    let a = irsbf(&SMALL_SWEEP);
    let b = irsbf(&SMALL_SWEEP);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("sweep_variable,value,scheme,mean_snr_db,ser,mean_iterations\n"));
    // header plus five schemes at two points
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let with_file = irsbf(&[&SMALL_SWEEP[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(with_file.status.success());
    assert!(with_file.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), irsbf(&SMALL_SWEEP).stdout);
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sys.toml");
    fs::write(&cfg, "kappa = 0.15\np_dbw = 20\n").unwrap();
    let base = irsbf(&SMALL_SWEEP);
    let changed = irsbf(&[&SMALL_SWEEP[..], &["--config", cfg.to_str().unwrap()]].concat());
    assert!(changed.status.success());
    assert_ne!(base.stdout, changed.stdout);

    fs::write(&cfg, "not_a_key = 1\n").unwrap();
    let bad = irsbf(&[&SMALL_SWEEP[..], &["--config", cfg.to_str().unwrap()]].concat());
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));
}

#[test]
fn json_summary_parses() {
    let out = irsbf(&[&SMALL_SWEEP[..], &["--json"]].concat());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object(), "{v}");
}

#[test]
fn usage_errors_exit_nonzero() {
    assert!(!irsbf(&[]).status.success());
    assert!(!irsbf(&["sweep-n", "--channels", "many"]).status.success());
    assert!(!irsbf(&["no-such-command"]).status.success());
    assert!(!irsbf(&["sweep-n", "--threads", "0", "--channels", "1"])
        .status
        .success());
    assert!(irsbf(&["--help"]).status.success());
}

#[test]
fn iteration_study_table() {
    let out = irsbf(&["iteration-study", "--channels", "4", "--values", "8,16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n_i,robust_plain,robust_accelerated,nonrobust_plain,nonrobust_accelerated"));
    assert_eq!(text.lines().count(), 3);
}
