use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use biball::solver::ProblemSpec;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_biball"));
    c.env_remove("BIBALL_LEVEL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn sharp_file(dir: &TempDir, n: usize) -> String {
    write(dir.path(), "sharp.json", &ProblemSpec::sharp_example(n, 2).to_json()).display().to_string()
}

#[test]
fn solve_sharp_example_at_the_centre() {
    let dir = TempDir::new().unwrap();
    let p = sharp_file(&dir, 2);
    let o = run(&["solve", "--problem", &p, "--points", "0,0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let f = &v[0]["f"];
    assert!((f[0].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert!(f[1].as_f64().unwrap().abs() < 1e-4);
}

#[test]
fn boundary_point_is_a_domain_error_naming_the_point() {
    let dir = TempDir::new().unwrap();
    let p = sharp_file(&dir, 2);
    let o = run(&["solve", "--problem", &p, "--points", "0.6,0.8"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("0.6") && stderr(&o).contains("0.8"), "{}", stderr(&o));
    let near = run(&["solve", "--problem", &p, "--points", "0.97,0"]);
    assert_eq!(code(&near), 2);
    assert!(stderr(&near).contains("--allow-near-boundary"));
    let allowed = run(&["solve", "--problem", &p, "--points", "0.97,0", "--allow-near-boundary"]);
    assert!(matches!(code(&allowed), 0 | 3), "{}", stderr(&allowed));
}

#[test]
fn schema_and_syntax_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&ProblemSpec::sharp_example(2, 1).to_json()).unwrap();
    v.as_object_mut().unwrap().remove("phi2");
    let missing = write(dir.path(), "missing.json", &v.to_string());
    let o = run(&["solve", "--problem", missing.to_str().unwrap(), "--points", "0,0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("phi2"), "{}", stderr(&o));

    let broken = write(dir.path(), "broken.json", "{\n  \"n\": 2,\n  \"m\": \n}");
    let o = run(&["solve", "--problem", broken.to_str().unwrap(), "--points", "0,0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    v["extra"] = serde_json::json!(1);
    let unknown = write(dir.path(), "unknown.json", &v.to_string());
    assert_eq!(code(&run(&["solve", "--problem", unknown.to_str().unwrap(), "--points", "0,0"])), 1);
    assert_eq!(code(&run(&["solve", "--bogus"])), 1);
}

#[test]
fn level_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let p = sharp_file(&dir, 3);
    let o = bin()
        .args(["solve", "--problem", &p, "--points", "[[0.1,0.2,0.3]]", "--format", "csv"])
        .env("BIBALL_LEVEL", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,f1,f2,level,warning");
    assert!(lines.next().unwrap().ends_with(",2,"));
}

#[test]
fn table_output_is_deterministic_and_agrees() {
    let a = run(&["table1", "--n", "2"]);
    let b = run(&["table1", "--n", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,r,U_closed,U_quad,Ustar_closed,Ustar_series,Ustar_quad,max_abs_disagreement");
    assert_eq!(lines.len(), 10);
    for l in &lines[1..] {
        let d: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(d < 1e-7, "{l}");
    }
}

#[test]
fn table_without_closed_forms() {
    let o = run(&["table1", "--n", "5"]);
    assert_eq!(code(&o), 0);
    for l in stdout(&o).lines().skip(1) {
        let cells: Vec<&str> = l.split(',').collect();
        assert!(cells[2].is_empty() && cells[4].is_empty());
        assert!(cells[7].parse::<f64>().unwrap() < 1e-6);
    }
    assert_eq!(code(&run(&["table1", "--n", "1"])), 1);
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "--suite", "identities", "--n", "3"],
        vec!["verify", "--suite", "green", "--n", "4"],
        vec!["verify", "--suite", "table1"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains('[')));
    }
    let o = run(&["verify", "--suite", "green", "--n", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(code(&run(&["verify", "--suite", "nothing"])), 1);
    assert_eq!(code(&run(&["verify", "--suite", "table1", "--n", "2", "--tol", "0"])), 4);
}

#[test]
fn bound_and_lipschitz_reports() {
    let dir = TempDir::new().unwrap();
    let p = sharp_file(&dir, 3);
    let o = run(&["bound", "--problem", &p, "--points", "0,0,0;0.5,0,0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r0 = &v["reports"][0];
    assert!((r0["lhs"].as_f64().unwrap() - 1.0).abs() < 1e-4);

    let lin = write(dir.path(), "lin.json", &ProblemSpec::linear_example(3).to_json());
    let o = run(&["lipschitz", "--problem", lin.to_str().unwrap(), "--pairs", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["problem", "omega", "estimate", "bound_components", "satisfied"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["estimate"].as_f64().unwrap() <= 1.0 + 1e-4);
    let o = run(&["lipschitz", "--problem", lin.to_str().unwrap(), "--omega", "power:0.5"]);
    assert_eq!(code(&o), 1);
}
