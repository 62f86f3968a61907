use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coverbound"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn file(name: &str, text: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn k4() -> PathBuf {
    file("k4.txt", "a b 1\na c 1\na d 1\nb c 1\nb d 1\nc d 1\n")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["constants", "--no-such-flag"])), 2);
    assert_eq!(code(&run(&["bound", "--graph", "x.txt"])), 2);
}

#[test]
fn input_errors_exit_two() {
    let missing = run(&["validate", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(code(&missing), 2);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error"));

    let bad = file("loop.txt", "0 0 1.0\n");
    assert_eq!(
        code(&run(&["validate", "--graph", bad.to_str().unwrap()])),
        2
    );

    let k4 = k4();
    let k4 = k4.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "unravel", "--graph", k4, "--vertex", "zz", "--r", "1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "bound", "--graph", k4, "--kind", "simple", "--r", "0"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "bound", "--graph", k4, "--kind", "general", "--g", "bogus"
        ])),
        2
    );

    let path = file("path.txt", "0 1 1\n1 2 2\n");
    let p = path.to_str().unwrap();
    assert_eq!(code(&run(&["bound", "--graph", p, "--kind", "simple"])), 2);
    assert_eq!(code(&run(&["chain", "--graph", p])), 2);
}

#[test]
fn simple_bound_on_k4() {
    let k4 = k4();
    let out = run(&[
        "bound",
        "--graph",
        k4.to_str().unwrap(),
        "--kind",
        "simple",
        "--r",
        "3",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["results"]["rhs"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(v["results"]["lambda1_table"].as_array().unwrap().len(), 4);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn failed_check_exits_one() {
    let mut text = String::new();
    for i in 0..41 {
        for j in i + 1..41 {
            text.push_str(&format!("{i} {j} 1\n"));
        }
    }
    let k41 = file("k41.txt", &text);
    let out = run(&[
        "certify",
        "--graph",
        k41.to_str().unwrap(),
        "--kind",
        "lambda2",
        "--r",
        "1",
        "--json",
    ]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["pass"], Value::Bool(false));
    assert!(v["results"]["error"].as_str().unwrap().contains("empty"));
}

#[test]
fn g_table_is_applied_per_directed_edge() {
    let c4 = file("c4.txt", "0 1 1\n1 2 1\n2 3 1\n3 0 1\n");
    let mut table = String::new();
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        table.push_str(&format!("{u} {v} 2.0\n{v} {u} 0.5\n"));
    }
    let t = file("c4-g.txt", &table);
    let spec = format!("table:{}", t.to_str().unwrap());
    let out = run(&[
        "certify",
        "--graph",
        c4.to_str().unwrap(),
        "--kind",
        "theorem",
        "--r",
        "2",
        "--g",
        &spec,
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["results"]["certificate"]["metadata"]["g"]
        .as_str()
        .unwrap()
        .starts_with("table:"));

    let partial = file("c4-partial.txt", "0 1 1.0\n");
    let spec = format!("table:{}", partial.to_str().unwrap());
    let out = run(&[
        "bound",
        "--graph",
        c4.to_str().unwrap(),
        "--kind",
        "general",
        "--g",
        &spec,
    ]);
    assert_eq!(code(&out), 2);

    let negative = table.replacen("2.0", "-2.0", 1);
    let t = file("c4-negative.txt", &negative);
    let spec = format!("table:{}", t.to_str().unwrap());
    let out = run(&[
        "bound",
        "--graph",
        c4.to_str().unwrap(),
        "--kind",
        "general",
        "--g",
        &spec,
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_output_revalidates() {
    let out = run(&[
        "gen",
        "--family",
        "weighted-regular",
        "--n",
        "30",
        "--d",
        "4",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0);
    let g = file("gen.txt", &String::from_utf8(out.stdout).unwrap());
    let v = run(&["validate", "--graph", g.to_str().unwrap(), "--json"]);
    assert_eq!(code(&v), 0);
    let v = json(&v);
    assert!(v["results"]["regular_w"].as_f64().is_some());
    assert_eq!(v["results"]["vertices"], 30);
}

#[test]
fn human_report_lists_checks() {
    let k4 = k4();
    let out = run(&[
        "certify",
        "--graph",
        k4.to_str().unwrap(),
        "--kind",
        "lemma42",
        "--r",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS ball dominates unraveled ball"));
    assert!(text.ends_with("result: pass\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("elapsed:"));
}

#[test]
fn plot_g_grid() {
    let out = run(&["plot-g"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y,g,ell_t0");
    assert_eq!(lines.len(), 514);
    assert!(lines[513].starts_with("1,0,"));
}

#[test]
fn oracle_cross_checks_pass() {
    let k4 = k4();
    let k4 = k4.to_str().unwrap();
    for args in [
        vec![
            "unravel", "--graph", k4, "--vertex", "a", "--r", "3", "--oracle",
        ],
        vec![
            "chain", "--graph", k4, "--chain", "weighted", "--oracle", "--steps", "100000",
        ],
        vec![
            "bound", "--graph", k4, "--kind", "general", "--r", "2", "--oracle",
        ],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS oracle"));
    }
}
