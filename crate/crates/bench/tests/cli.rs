use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

#[test]
fn writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let res = bench()
        .args(["--algo", "acc", "--k", "2", "--epsilon", "2^-4", "--window", "2^10", "--zipf", "1.0"])
        .args(["--universe", "4096", "--count", "20000", "--oracle", "--interval-pct", "1,10,50", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["algo"], "acc");
    assert_eq!(v["config"]["k"], 2);
    assert_eq!(v["config"]["window"], 1024);
    assert_eq!(v["sweep"].as_array().unwrap().len(), 3);
    assert!(String::from_utf8_lossy(&res.stdout).contains("digest "));
}

#[test]
fn reads_csv_trace_from_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut child = bench()
        .args(["--algo", "hit", "--epsilon", "0.25", "--window", "64", "--trace", "-", "--csv-column", "2", "--out"])
        .arg(&out)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let body: String = (0..500).map(|i| format!("{i},flow{}\n", i % 7)).collect();
    child.stdin.take().unwrap().write_all(body.as_bytes()).unwrap();
    assert!(child.wait().unwrap().success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["trace"]["items"], 500);
    assert_eq!(v["trace"]["distinct"], 7);
    assert_eq!(v["trace"]["source"], "-");
}

#[test]
fn invalid_epsilon_fails() {
    let dir = tempfile::tempdir().unwrap();
    let res = bench()
        .args(["--algo", "raw", "--epsilon", "0.3", "--window", "100", "--count", "10", "--out"])
        .arg(dir.path().join("r.json"))
        .output()
        .unwrap();
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("invalid configuration"));
}
