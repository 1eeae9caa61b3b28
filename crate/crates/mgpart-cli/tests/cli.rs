//! End-to-end runs of the `mgpart` binary.

use std::f64::consts::PI;
use std::process::{Command, Output};

fn mgpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgpart"))
        .args(args)
        .env_remove("MGPART_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

/// Value of the first `key value ...` line.
fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.split_whitespace().next()))
        .unwrap_or_else(|| panic!("no `{key}` line in\n{text}"))
        .parse()
        .expect("numeric field")
}

#[test]
fn loop_optimum_is_nine_pi_squared() {
    let o = mgpart(&["optimize", "--family", "loop", "-k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let e = field(&text, "energy ");
    assert!((e - 9.0 * PI * PI).abs() <= 1e-9 * e, "{e}");
    assert!(text.contains("audit pass"));
    assert_eq!(text.lines().filter(|l| l.starts_with("cut ")).count(), 2);
}

#[test]
fn star_limit_set_matches_prediction() {
    let o = mgpart(&["asymptotics", "star", "-m", "3", "-L", "3", "--kmax", "3000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "match,true"), "{text}");
    assert!(text.lines().any(|l| l == "cardinality,3"), "{text}");
    let o = mgpart(&[
        "asymptotics",
        "star",
        "-m",
        "4",
        "-L",
        "4",
        "--problem",
        "dirichlet",
        "--kmax",
        "3000",
    ]);
    assert!(stdout(&o).lines().any(|l| l == "match,true"));
}

#[test]
fn bounds_csv_has_one_row_per_bound() {
    let o = mgpart(&["bounds", "--family", "star", "-k", "2..4", "--problem", "dirichlet"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,name,kind,value,valid,verdict"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r.len(), 6, "{r:?}");
        assert!((2..=4).contains(&r[0].parse::<usize>().unwrap()));
        assert!(r[3].parse::<f64>().unwrap() > 0.0);
        assert!(["true", "false", "eventual"].contains(&r[4]), "{r:?}");
    }
    for k in 2..=4 {
        assert!(rows.iter().any(|r| r[0] == k.to_string()));
    }
}

#[test]
fn bounds_audit_passes_on_the_lasso() {
    let o = mgpart(&["bounds", "--family", "lasso", "-k", "2..3", "--audit"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains(",fail"));
}

#[test]
fn eigenvalues_of_the_unit_interval() {
    let o = mgpart(&["eig", "--family", "interval", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (j, v) in values.iter().enumerate() {
        let want = (j as f64 * PI).powi(2);
        assert!((v - want).abs() <= 1e-9 * want.max(1.0), "{j}: {v}");
    }
}

#[test]
fn graph_files_are_read() {
    let dir = std::env::temp_dir().join(format!("mgpart-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("path.mg");
    std::fs::write(&path, "vertex a\nvertex b\nvertex c\nedge e1 a b 1\nedge e2 b c 2\n").unwrap();
    let o = mgpart(&["optimize", path.to_str().unwrap(), "-k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let e = field(&stdout(&o), "energy ");
    assert!((e - PI * PI).abs() <= 1e-9 * e, "{e}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = std::env::temp_dir().join(format!("mgpart-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.mg");
    std::fs::write(&bad, "vertex a\nedge e1 a b 1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["stats", bad.to_str().unwrap()],
        vec!["stats", "/nonexistent/graph.mg"],
        vec!["optimize", "--family", "star", "-m", "0", "-k", "2"],
        vec!["optimize", "--family", "loop", "-k", "3", "-p", "0.5"],
        vec!["bounds", "--family", "loop", "-k", "5..2"],
        vec!["frobnicate"],
    ];
    for args in &cases {
        let o = mgpart(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    let args = [
        "optimize",
        "--family",
        "lasso",
        "-k",
        "3",
        "--problem",
        "dirichlet",
        "--seed",
        "7",
    ];
    let runs: Vec<String> = ["1", "1", "2"]
        .iter()
        .map(|t| {
            let mut a = args.to_vec();
            a.extend(["--threads", t]);
            let o = mgpart(&a);
            assert_eq!(o.status.code(), Some(0));
            stdout(&o)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn output_flag_writes_the_same_text() {
    let path = std::env::temp_dir().join(format!("mgpart-cli-out-{}.csv", std::process::id()));
    let args = ["asymptotics", "two-intervals", "-a", "3/2", "--kmax", "50"];
    let direct = stdout(&mgpart(&args));
    let mut with_file = args.to_vec();
    with_file.extend(["-o", path.to_str().unwrap()]);
    let o = mgpart(&with_file);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    std::fs::remove_file(&path).unwrap();
}
