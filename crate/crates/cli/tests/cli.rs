use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bayes_exec_core::{complete_info_pair, FirmTypeSpec};

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> PathBuf {
    scenarios_dir().join(name)
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bayes-exec"));
    c.env_remove("BAYESEXEC_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn bayes-exec")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "bayes-exec {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Table {
        let mut r = csv::Reader::from_path(path).unwrap();
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.unwrap().iter().map(String::from).collect())
            .collect();
        Table { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    fn f(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }
}

fn write_json(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_strategies_hitting_boundaries() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&[
        "solve",
        "--scenario",
        s(&scenario("two_type.json")),
        "--out",
        s(tmp.path()),
    ]);
    let t = Table::read(&tmp.path().join("strategies.csv"));
    assert_eq!(
        t.header,
        ["t", "s1_1", "s1_2", "s2_1", "s2_2", "v1_1", "v1_2", "v2_1", "v2_2"]
    );
    assert_eq!(t.rows.len(), 201);
    let last = t.rows.len() - 1;
    for (col, f) in [("s1_1", 3.0), ("s1_2", 5.0), ("s2_1", 7.0), ("s2_2", 5.0)] {
        assert_eq!(t.f(0, col), 0.0);
        assert!((t.f(last, col) - f).abs() < 1e-8, "{col}");
    }
    assert_eq!(t.f(last, "t"), 1.0);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("solution.json")).unwrap())
            .unwrap();
    assert_eq!(json["mode"], "normal_form");
    assert!(json["boundary_error"].as_f64().unwrap() < 1e-8);
    assert!(json["el_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(json["system_matrix"].as_array().unwrap().len(), 4);
    assert!(tmp.path().join("scenario.csv").exists());
}

#[test]
fn grid_points_flag_controls_rows() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&[
        "solve",
        "--scenario",
        s(&scenario("three_type.json")),
        "--grid-points",
        "11",
        "--out",
        s(tmp.path()),
    ]);
    let t = Table::read(&tmp.path().join("strategies.csv"));
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.header.len(), 1 + 2 * 6);
}

#[test]
fn degenerate_prior_matches_complete_information() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_json(
        tmp.path(),
        "pair.json",
        r#"{"firms": [[{"kappa": 2.0, "target": 4.0}], [{"kappa": 2.0, "target": 1.0}]],
            "prior": [[1.0]]}"#,
    );
    let out = tmp.path().join("o");
    run_ok(&[
        "solve",
        "--scenario",
        s(&path),
        "--grid-points",
        "21",
        "--out",
        s(&out),
    ]);
    let t = Table::read(&out.join("strategies.csv"));
    let pair =
        complete_info_pair(FirmTypeSpec::new(2.0, 4.0), FirmTypeSpec::new(2.0, 1.0)).unwrap();
    for j in 0..t.rows.len() {
        let ti = t.f(j, "t");
        let p = pair.positions(ti).unwrap();
        assert!((t.f(j, "s1_1") - p[0]).abs() < 1e-9);
        assert!((t.f(j, "s2_1") - p[1]).abs() < 1e-9);
    }
}

#[test]
fn nonstrategic_scenario_overshoots_target() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&[
        "solve",
        "--scenario",
        s(&scenario("nonstrategic_kappa1.json")),
        "--out",
        s(tmp.path()),
    ]);
    let t = Table::read(&tmp.path().join("strategies.csv"));
    let last = t.rows.len() - 1;
    let peak = (0..t.rows.len())
        .map(|j| t.f(j, "s2_1"))
        .fold(f64::MIN, f64::max);
    assert!(peak > 1.0 + 1e-3, "peak {peak}");
    assert!((t.f(last, "s2_1") - 1.0).abs() < 1e-8);
}

// (firm1 type, firm2 type, eval kappa, cost1, exp1, cost2)
const NORMALIZED: [(usize, usize, f64, f64, f64, f64); 8] = [
    (1, 1, 1.0, 15.81, 14.71, 14.68),
    (1, 1, 15.0, 98.68, 14.71, 79.16),
    (1, 2, 1.0, 12.49, 14.71, 22.64),
    (1, 2, 15.0, 105.37, 14.71, 56.49),
    (2, 1, 1.0, 18.62, 31.34, 17.85),
    (2, 1, 2.0, 25.02, 31.34, 23.56),
    (2, 1, 3.0, 31.42, 31.34, 29.28),
    (2, 1, 15.0, 108.22, 31.34, 97.85),
];

#[test]
fn costs_reproduce_normalized_table() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = scenario("two_type.json");
    let mut args = vec![
        "costs",
        "--scenario",
        s(&sc),
        "--normalized",
        "--quadrature",
        "trapezoid:100",
        "--out",
        s(tmp.path()),
    ];
    for k in ["1", "2", "3", "15"] {
        args.extend(["--eval-kappa", k]);
    }
    run_ok(&args);
    let t = Table::read(&tmp.path().join("costs.csv"));
    assert_eq!(t.rows.len(), 16);
    for &(k, m, ke, c1, e1, c2) in &NORMALIZED {
        let j = (0..t.rows.len())
            .find(|&j| {
                t.rows[j][0] == k.to_string()
                    && t.rows[j][1] == m.to_string()
                    && t.f(j, "eval_kappa") == ke
            })
            .unwrap();
        assert!((t.f(j, "cost1") - c1).abs() <= 0.02, "row {k},{m},{ke}");
        assert!((t.f(j, "exp1") - e1).abs() <= 0.02, "row {k},{m},{ke}");
        assert!((t.f(j, "cost2") - c2).abs() <= 0.02, "row {k},{m},{ke}");
        assert_eq!(t.rows[j][t.col("normalized")], "true");
    }
}

#[test]
fn default_quadrature_is_close_to_trapezoid() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("gl");
    let b = tmp.path().join("tr");
    let sc = scenario("two_type.json");
    run_ok(&["costs", "--scenario", s(&sc), "--out", s(&a)]);
    run_ok(&[
        "costs",
        "--scenario",
        s(&sc),
        "--quadrature",
        "trapezoid:100",
        "--out",
        s(&b),
    ]);
    let (ta, tb) = (
        Table::read(&a.join("costs.csv")),
        Table::read(&b.join("costs.csv")),
    );
    for j in 0..ta.rows.len() {
        let (x, y) = (ta.f(j, "cost1"), tb.f(j, "cost1"));
        assert!(x != y && (x - y).abs() < 0.1, "{x} vs {y}");
    }
}

#[test]
fn cumulative_curves_start_at_zero_and_end_at_totals() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = scenario("two_type.json");
    run_ok(&[
        "cumulative",
        "--scenario",
        s(&sc),
        "--eval-kappa",
        "1",
        "--eval-kappa",
        "10",
        "--out",
        s(tmp.path()),
    ]);
    run_ok(&[
        "costs",
        "--scenario",
        s(&sc),
        "--eval-kappa",
        "1",
        "--out",
        s(tmp.path()),
    ]);
    let costs = Table::read(&tmp.path().join("costs.csv"));
    for k in 1..=2 {
        for m in 1..=2 {
            let t = Table::read(&tmp.path().join(format!("cumulative_k{k}_m{m}.csv")));
            assert_eq!(
                t.header,
                [
                    "t",
                    "cost1_eval1",
                    "cost2_eval1",
                    "cost1_eval10",
                    "cost2_eval10"
                ]
            );
            assert_eq!(t.f(0, "cost1_eval1"), 0.0);
            assert_eq!(t.f(0, "cost2_eval10"), 0.0);
            let last = t.rows.len() - 1;
            let j = (0..costs.rows.len())
                .find(|&j| costs.rows[j][0] == k.to_string() && costs.rows[j][1] == m.to_string())
                .unwrap();
            for (cum, total) in [("cost1_eval1", "cost1"), ("cost2_eval1", "cost2")] {
                let (a, b) = (t.f(last, cum), costs.f(j, total));
                assert!(
                    (a - b).abs() <= 1e-8 * b.abs().max(1.0),
                    "{cum}: {a} vs {b}"
                );
            }
            // Every type buys, so a larger impact makes the same path dearer.
            assert!(t.f(last, "cost1_eval10") > t.f(last, "cost1_eval1"));
            assert!(t.f(last, "cost2_eval10") > t.f(last, "cost2_eval1"));
        }
    }
}

#[test]
fn sweep_conditional_writes_one_file_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "sweep",
        "--scenario",
        s(&scenario("two_type.json")),
        "--param",
        "conditional1[0][0]",
        "--values",
        "0.67,0.45,0.23,0.02",
        "--out",
        s(tmp.path()),
    ]);
    let listed = String::from_utf8(out.stdout).unwrap();
    assert_eq!(listed.lines().count(), 5);
    for i in 1..=4 {
        let t = Table::read(&tmp.path().join(format!("sweep_{i:03}.csv")));
        assert_eq!(t.rows.len(), 201);
    }
    let index: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("index.json")).unwrap()).unwrap();
    let entries = index["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for (e, want) in entries.iter().zip([0.67, 0.45, 0.23, 0.02]) {
        let p = e["conditionals"]["firm1"][0][0].as_f64().unwrap();
        assert!((p - want).abs() < 1e-12, "{p} vs {want}");
        assert!(e["boundary_error"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn sweep_target_moves_terminal_position() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&[
        "sweep",
        "--scenario",
        s(&scenario("two_type.json")),
        "--param",
        "firm2[1].target",
        "--values",
        "1,5,-2",
        "--grid-points",
        "5",
        "--out",
        s(tmp.path()),
    ]);
    for (i, f) in [1.0, 5.0, -2.0].into_iter().enumerate() {
        let t = Table::read(&tmp.path().join(format!("sweep_{:03}.csv", i + 1)));
        assert!((t.f(4, "s2_2") - f).abs() < 1e-8);
    }
}

#[test]
fn single_value_sweep_matches_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("solve");
    let b = tmp.path().join("sweep");
    let sc = scenario("two_type.json");
    run_ok(&["solve", "--scenario", s(&sc), "--out", s(&a)]);
    run_ok(&[
        "sweep",
        "--scenario",
        s(&sc),
        "--param",
        "prior[0][0]",
        "--values",
        "0.4",
        "--out",
        s(&b),
    ]);
    assert_eq!(
        fs::read(a.join("strategies.csv")).unwrap(),
        fs::read(b.join("sweep_001.csv")).unwrap()
    );
}

#[test]
fn outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = scenario("three_type.json");
    for d in ["a", "b"] {
        let out = tmp.path().join(d);
        run_ok(&[
            "solve",
            "--scenario",
            s(&sc),
            "--verify-trials",
            "3",
            "--seed",
            "7",
            "--out",
            s(&out),
        ]);
        run_ok(&["costs", "--scenario", s(&sc), "--out", s(&out)]);
    }
    for f in [
        "strategies.csv",
        "solution.json",
        "scenario.csv",
        "costs.csv",
    ] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(f)).unwrap(),
            fs::read(tmp.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn scenario_csv_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_ok(&[
        "solve",
        "--scenario",
        s(&scenario("nonstrategic_kappa3.json")),
        "--out",
        s(&a),
    ]);
    run_ok(&[
        "solve",
        "--scenario",
        s(&a.join("scenario.csv")),
        "--out",
        s(&b),
    ]);
    for f in ["strategies.csv", "scenario.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["solve", "--scenario", s(&scenario("two_type.json"))])
        .env("BAYESEXEC_OUT", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("strategies.csv").exists());
}

#[test]
fn missing_file_is_input_error() {
    let out = run(&["solve", "--scenario", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_scenario_lists_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_json(
        tmp.path(),
        "bad.json",
        r#"{"firms": [[{"kappa": -1.0, "target": 1.0}], [{"kappa": 1.0, "target": 1.0}]],
            "prior": [[0.5]]}"#,
    );
    let out = run(&["solve", "--scenario", s(&path), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("kappa"), "{err}");
    assert!(err.contains("prior"), "{err}");
    assert!(!tmp.path().join("strategies.csv").exists());
}

#[test]
fn unknown_fields_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_json(
        tmp.path(),
        "extra.json",
        r#"{"firms": [[{"kappa": 1.0, "target": 1.0, "speed": 2}], [{"kappa": 1.0, "target": 1.0}]],
            "prior": [[1.0]]}"#,
    );
    let out = run(&["solve", "--scenario", s(&path), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_sweep_path_is_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    for param in ["prior[5][0]", "firm3[0].kappa", "nonsense"] {
        let out = run(&[
            "sweep",
            "--scenario",
            s(&scenario("two_type.json")),
            "--param",
            param,
            "--values",
            "0.5",
            "--out",
            s(tmp.path()),
        ]);
        assert_eq!(out.status.code(), Some(2), "{param}");
    }
}

#[test]
fn bad_flags_are_usage_errors() {
    let sc = scenario("two_type.json");
    assert_eq!(
        run(&["solve", "--scenario", s(&sc), "--grid-points", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["costs", "--scenario", s(&sc), "--quadrature", "simpson"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["solve"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_json(
        tmp.path(),
        "stiff.json",
        r#"{"firms": [[{"kappa": 5000.0, "target": 3.0}], [{"kappa": 2.0, "target": 7.0}]],
            "prior": [[1.0]]}"#,
    );
    let out = run(&["solve", "--scenario", s(&path), "--out", s(tmp.path())]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
