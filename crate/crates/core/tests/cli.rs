use std::process::{Command, Output};

fn apm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apm-lab"))
        .args(args)
        .env_remove("APM_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = apm(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn tvd_small_example() {
    let v = json(&["tvd", "--n", "4", "--m", "1", "--family", "prefix-parity", "--c", "1"]);
    assert_eq!(v["summary"]["mean"].as_f64().unwrap(), 1.0 / 6.0);
    assert_eq!(v["summary"]["cauchy_schwarz_violations"], 0);
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn extract_and_count() {
    let v = json(&["extract", "--x", "1010", "--matching", "0 1;2 3"]);
    assert_eq!(v["summary"]["z"], "11");
    let v = json(&["count", "--n", "12", "--m", "3"]);
    assert_eq!(v["summary"]["count"], "13860");
}

#[test]
fn matching_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "# edges\n0 3\n1 2\n").unwrap();
    let v = json(&["extract", "--x", "1100", "--matching-file", path.to_str().unwrap()]);
    assert_eq!(v["summary"]["z"], "11");
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["protocol", "--solver", "quantum", "--n", "8", "--m", "2", "--trials", "5000", "--seed", "7"][..],
        &["tvd-sweep", "--n", "8", "--m", "2", "--c-max", "3", "--format", "csv"][..],
        &["stream-sim", "--n", "8", "--random-instance", "2", "--trials", "2000", "--seed", "3"][..],
        &["adversary", "--n", "8", "--m", "2", "--memory", "first:2", "--trials", "2000"][..],
    ] {
        let a = apm(args);
        let b = apm(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let one = apm(&["protocol", "--solver", "classical", "--n", "8", "--m", "2", "--d", "3", "--trials", "20000", "--threads", "1"]);
    let four = apm(&["protocol", "--solver", "classical", "--n", "8", "--m", "2", "--d", "3", "--trials", "20000", "--threads", "4"]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"].as_object_mut().unwrap().remove("threads");
        v
    };
    assert_eq!(strip(&one), strip(&four));
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_apm-lab"))
        .args(["sample-matching", "--n", "10", "--m", "3"])
        .env("APM_LAB_SEED", "99")
        .output()
        .unwrap();
    let with_flag = apm(&["sample-matching", "--n", "10", "--m", "3", "--seed", "99"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
}

#[test]
fn empty_table_is_header_only_csv() {
    let out = apm(&["sample-matching", "--n", "6", "--m", "2", "--count", "0", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "draw,matching\n");
}

#[test]
fn sweep_csv_has_one_row_per_c() {
    let out = apm(&["tvd-sweep", "--n", "8", "--m", "2", "--c-min", "0", "--c-max", "4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("c,set_size,mean_tvd"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = apm(&["count", "--n", "6", "--m", "3", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["count"], "15");
}

#[test]
fn stream_events_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.txt");
    std::fs::write(&path, "e 0 1\nb 0 1\nw 0 1 0\nb 1 0\ne 2 3\nb 2 1\nb 3 1\nw 2 3 1\n").unwrap();
    let v = json(&["stream-sim", "--n", "4", "--events", path.to_str().unwrap(), "--trials", "4000"]);
    // α = 1/2: an edge is always caught, and every reported b is 1.
    assert_eq!(v["summary"]["present"], 4000);
    assert_eq!(v["summary"]["conditional_correct"], 4000);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| apm(args).status.code().unwrap();
    assert_eq!(code(&["count", "--n", "5", "--m", "3"]), 2);
    assert_eq!(code(&["extract", "--x", "10a0", "--matching", "0 1"]), 2);
    assert_eq!(code(&["extract", "--x", "1010", "--matching", "0 1;1 2"]), 2);
    assert_eq!(code(&["qsim", "--x", "101", "--matching", "0 1"]), 2);
    assert_eq!(code(&["tvd", "--n", "26", "--m", "13", "--family", "full", "--c", "0"]), 3);
    assert_eq!(code(&["stream-sim", "--n", "4", "--events", "/nonexistent/e.txt"]), 4);
    let out = apm(&["count", "--n", "5", "--m", "3"]);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}
