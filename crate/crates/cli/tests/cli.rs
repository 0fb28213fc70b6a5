use std::process::{Command, Output};

fn sollink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sollink")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sol_link_example() {
    let o = sollink(&["sol-link", "--f", "2,1,1,1", "--a", "1,0", "--b", "0,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-1");
    let o = sollink(&["sol-link", "--f", "2,1,1,1", "--a", "1,0", "--b", "-3,2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lk"], "-5");
}

#[test]
fn qexp_json_example() {
    let o = sollink(&["qexp", "--d", "5", "--m", "1", "--nmax", "5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["weight"], 2);
    for (n, c) in [("1", "2"), ("2", "0"), ("4", "4"), ("5", "4")] {
        assert_eq!(v["coeffs"][n], c);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(sollink(&["field-info", "--d", "6"]).status.code(), Some(0));
    assert_eq!(sollink(&["field-info", "--d", "12"]).status.code(), Some(2));
    assert_eq!(sollink(&["field-info"]).status.code(), Some(2));
    assert_eq!(sollink(&["sol-link", "--f", "1,1,0,1", "--a", "1,0", "--b", "0,1"]).status.code(), Some(2));
    assert_eq!(sollink(&["w-eval", "--d", "5", "--tau", "0.5-1i"]).status.code(), Some(2));
    assert_eq!(sollink(&["sol-cap", "--f", "2,1,1,1", "--a", "1,0", "--s-b", "1"]).status.code(), Some(2));
    assert_eq!(sollink(&["sol-link", "--f", "2,1,1,1", "--a", "1,0", "--b", "0,1", "--format", "csv"]).status.code(), Some(0));
}

#[test]
fn thread_variable_is_validated_and_harmless() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_sollink"))
            .args(["lk-table", "--d", "13", "--nmax", "8", "--format", "json"])
            .env("SOLLINK_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn combine_reads_interior_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("interior.json");
    std::fs::write(&path, r#"{"m": 1, "entries": {"1": "5/2", "2": "0", "3": "1"}, "provenance": "test data"}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = sollink(&["combine", "--d", "5", "--interior", p, "--nmax", "3", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coeffs"]["1"], "1/2");
    assert_eq!(v["coeffs"]["3"], "1");
    let o = sollink(&["combine", "--d", "5", "--interior", p, "--nmax", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(4,1)"));
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let o = sollink(&[
        "w-eval", "--d", "5", "--tau", "0+1i", "--n-cut", "4", "--format", "csv", "--output", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,value,tail_estimate");
    assert_eq!(lines.len(), 5);
}

#[test]
fn boundary_and_ratio_reports() {
    let o = sollink(&["boundary", "--d", "5", "--n", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["components"][0]["multiplicity"], "2");
    let o = sollink(&["ratio-test", "--d", "5", "--nmax", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["relative_spread"].as_f64().unwrap() < 1e-8);
}

#[test]
fn self_test_passes_and_repeats() {
    let a = sollink(&["self-test", "--seed", "11"]);
    let b = sollink(&["self-test", "--seed", "11"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().filter(|l| l.starts_with("PASS")).count() >= 10);
}
