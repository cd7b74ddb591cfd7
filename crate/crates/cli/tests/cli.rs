use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use hcopt_cli::{resolve_str, run_compare, run_experiment, RunError};

const ONE_D: &str = r#"
[experiment]
name = "one_d"
seed = 10
repeat = REPEAT

[evaluation]
n_scenarios = 2000
seed = 3

[problem]
kind = "synthetic"
lower = [0.0]
upper = [0.9]
xi = [{ dist = "uniform", a = 0.0, b = 1.0 }]
center = [0.3]

[[method]]
method = "RSG"
max_iters = 500
eval_every = 100
eval_samples = 500

[[method]]
method = "MSG"
max_iters = 500
eval_every = 100
eval_samples = 500

[[method]]
method = "SAA_SG"
max_iters = 500
n = 100
eval_every = 100
eval_samples = 500
"#;

fn tiny(policies: &str) -> String {
    format!(
        r#"
[experiment]
name = "tiny"
seed = 1

[evaluation]
n_scenarios = 400
seed = 5

[problem]
kind = "nrm"

[problem.instance]
type = "tiny"
capacity_cv = 0.5

[[method]]
method = "MSG"
max_iters = 2000
step = {{ schedule = "inv_sqrt", a = 0.002 }}
init = [5.0, 5.0, 5.0]
output = "tail:1000"
eval_every = 0
{policies}"#
    )
}

fn one_d(repeat: usize) -> String {
    ONE_D.replace("REPEAT", &repeat.to_string())
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    assert!(
        text.starts_with("# config_hash="),
        "{} lacks provenance",
        path.display()
    );
    let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn three_methods_give_three_traces_and_one_summary() {
    let dir = tempfile::tempdir().unwrap();
    let res = resolve_str(&one_d(1), Path::new("one_d.toml")).unwrap();
    let report = run_experiment(&res, dir.path()).unwrap();
    assert_eq!(report.failures(), 0);
    let names: Vec<String> = sorted_files(dir.path())
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        [
            "config.resolved.toml",
            "summary.csv",
            "trace_MSG.csv",
            "trace_RSG.csv",
            "trace_SAA_SG.csv"
        ]
    );
    let trace = csv_rows(&dir.path().join("trace_RSG.csv"));
    let iters: Vec<&str> = trace.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(iters, ["0", "100", "200", "300", "400", "500"]);
    assert!(trace.iter().all(|r| r[4] == "0"));
}

#[test]
fn repeats_add_rows_with_consecutive_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let res = resolve_str(&one_d(5), Path::new("one_d.toml")).unwrap();
    run_experiment(&res, dir.path()).unwrap();
    let rows = csv_rows(&dir.path().join("summary.csv"));
    for m in ["RSG", "MSG", "SAA_SG"] {
        let seeds: Vec<&str> = rows
            .iter()
            .filter(|r| r[0] == m)
            .map(|r| r[7].as_str())
            .collect();
        assert_eq!(seeds, ["10", "11", "12", "13", "14"], "{m}");
    }
    assert!(dir.path().join("trace_MSG_r4.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let res = resolve_str(&one_d(2), Path::new("one_d.toml")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&res, a.path()).unwrap();
    run_experiment(&res, b.path()).unwrap();
    let (fa, fb) = (sorted_files(a.path()), sorted_files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(
            fs::read(x).unwrap(),
            fs::read(y).unwrap(),
            "{}",
            x.display()
        );
    }
}

#[test]
fn resolved_config_reproduces_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let res = resolve_str(&one_d(1), Path::new("one_d.toml")).unwrap();
    run_experiment(&res, dir.path()).unwrap();
    let echoed = fs::read_to_string(dir.path().join("config.resolved.toml")).unwrap();
    assert_eq!(
        resolve_str(&echoed, Path::new("echo.toml")).unwrap().hash,
        res.hash
    );
    let header = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(header.starts_with(&format!("# config_hash={} seed=10\n", res.hash)));
}

#[test]
fn failing_method_gets_an_error_row() {
    // a point mass at 0 collapses the image of g, so SAA+SG has no box to work in
    let src = one_d(1).replace("b = 1.0", "b = 0.0");
    let res = resolve_str(&src, Path::new("one_d.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&res, dir.path()).unwrap();
    let rows = csv_rows(&dir.path().join("summary.csv"));
    let status: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r[0].as_str(), r[8].as_str()))
        .collect();
    assert_eq!(status, [("RSG", "ok"), ("MSG", "ok"), ("SAA_SG", "error")]);
    assert_eq!(report.failures(), 1);
    assert!(!rows[2][9].is_empty());
}

#[test]
fn identical_policies_show_no_improvement() {
    let src = tiny("\n[[policy]]\nkind = \"fixed\"\nlabel = \"a\"\nx = [5.0, 5.0, 0.0]\n\n[[policy]]\nkind = \"fixed\"\nlabel = \"b\"\nx = [5.0, 5.0, 0.0]\n");
    let res = resolve_str(&src, Path::new("tiny.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_compare(&res, dir.path()).unwrap();
    let pairs = csv_rows(&dir.path().join("pairwise.csv"));
    let row = pairs.iter().find(|r| r[0] == "a" && r[1] == "b").unwrap();
    assert_eq!(row[2], "0");
    assert_eq!(row[7], "false");
}

#[test]
fn dlp_beats_the_zero_policy() {
    let src = tiny("\n[[policy]]\nkind = \"dlp\"\n\n[[policy]]\nkind = \"fixed\"\nlabel = \"zero\"\nx = [0.0, 0.0, 0.0]\n");
    let res = resolve_str(&src, Path::new("tiny.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cmp = run_compare(&res, dir.path()).unwrap();
    assert_eq!(cmp.get("zero").unwrap().revenue.mean, 0.0);
    let pairs = csv_rows(&dir.path().join("pairwise.csv"));
    let row = pairs
        .iter()
        .find(|r| r[0] == "DLP" && r[1] == "zero")
        .unwrap();
    assert!(row[3].parse::<f64>().unwrap() > 0.0);
    assert_eq!(row[7], "true");
}

#[test]
fn enumerated_policy_dominates_on_shared_scenarios() {
    let src = tiny("\n[[policy]]\nkind = \"dlp\"\n\n[[policy]]\nkind = \"enumerate\"\nmax = 10\n\n[[policy]]\nkind = \"fixed\"\nx = [3.0, 8.0, 2.0]\n");
    let res = resolve_str(&src, Path::new("tiny.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cmp = run_compare(&res, dir.path()).unwrap();
    let best = cmp.get("enumerated").unwrap().revenue.mean;
    for (label, r) in &cmp.policies {
        assert!(r.as_ref().unwrap().revenue.mean <= best + 1e-9, "{label}");
    }
}

#[test]
fn compare_rejects_synthetic_problems() {
    let res = resolve_str(&one_d(1), Path::new("one_d.toml")).unwrap();
    let err = run_compare(&res, tempfile::tempdir().unwrap().path())
        .err()
        .unwrap();
    assert!(matches!(err, RunError::Config(_)));
    assert_eq!(err.exit_code(), 2);
}

fn hcopt(args: &[&str], root: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hcopt"))
        .args(args)
        .env("HCOPT_OUTPUT_ROOT", root)
        .output()
        .unwrap()
}

#[test]
fn binary_reports_config_errors_with_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        one_d(1).replacen("method = \"MSG\"", "method = \"ADAM\"", 1),
    )
    .unwrap();
    let out = hcopt(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("bad.toml:25:1:") && stderr.contains("unknown method `ADAM`"),
        "{stderr}"
    );
}

#[test]
fn binary_writes_under_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one_d.toml");
    fs::write(&cfg, one_d(1)).unwrap();
    let out = hcopt(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("one_d").join("summary.csv").exists());
}

#[test]
fn binary_exits_three_on_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    fs::write(
        &cfg,
        tiny("\n[[policy]]\nkind = \"enumerate\"\nmax = 400\n"),
    )
    .unwrap();
    let out = hcopt(&["compare", cfg.to_str().unwrap()], dir.path());
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&dir.path().join("tiny").join("compare.csv"));
    assert_eq!(rows[1][4], "error");
    assert_eq!(rows[0][4], "ok");
}
