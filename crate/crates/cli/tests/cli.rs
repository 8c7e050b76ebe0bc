//! End-to-end runs of the `bifront` binary.

use std::process::{Command, Output};

fn bifront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifront")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(csv: &str, key: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no {key} in {csv}"))
        .to_string()
}

#[test]
fn fisher_bounds() {
    let out = bifront(&["bounds", "--reaction", "fisher", "--a", "1", "--b", "1"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert_eq!(field(&s, "lower_universal"), "0.1875");
    assert_eq!(field(&s, "lower_kpp"), "2");
    assert_eq!(field(&s, "best_upper"), "2");
}

#[test]
fn huxley_upper_bound_is_finite() {
    let out = bifront(&["bounds", "--reaction", "huxley", "--reaction-param", "40", "--a", "1", "--b", "1"]);
    assert!(out.status.success());
    let up: f64 = field(&stdout(&out), "best_upper").parse().unwrap();
    assert!(up.is_finite() && up > 0.0);
}

#[test]
fn missing_reaction_is_a_config_error() {
    let out = bifront(&["speed", "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reaction"));
}

#[test]
fn bad_field_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"reaction": {"catalog": "fisher"}, "solver": {"ctol": 2.0}}"#).unwrap();
    let out = bifront(&["speed", "--config", cfg.to_str().unwrap(), "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.ctol"));
}

#[test]
fn reference_table_flags_the_cells_below_kpp() {
    let out = bifront(&["speed", "--golden", "appendix"]);
    assert_eq!(out.status.code(), Some(4));
    let s = stdout(&out);
    let rows: Vec<&str> = s.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    let mut misses: Vec<String> = rows
        .iter()
        .filter(|r| r.split(',').nth(9) == Some("false"))
        .map(|r| r.split(',').take(2).collect::<Vec<_>>().join(" "))
        .collect();
    misses.sort();
    assert_eq!(
        misses,
        ["fisher-gamma 1", "fisher-gamma 10", "fisher-singular 0.001", "fisher-singular 0.01", "fisher-singular 0.1"]
    );
}

#[test]
fn balanced_profile_is_steady_with_unit_slope() {
    let out =
        bifront(&["profile", "--reaction", "cubic-bistable", "--reaction-param", "0.5", "--a", "1000", "--b", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = stdout(&out);
    assert!(s.starts_with("z,v,dv\n"));
    let (z, v, dv) = s
        .lines()
        .skip(1)
        .map(|l| {
            let x: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            (x[0], x[1], x[2])
        })
        .min_by(|p, q| (p.1 - 0.5).abs().total_cmp(&(q.1 - 0.5).abs()))
        .unwrap();
    assert!(z.abs() < 0.05 && (v - 0.5).abs() < 0.05);
    assert!((dv - 1.0).abs() < 0.05, "slope {dv}");
}

#[test]
fn glued_limit_kinks_at_a_quarter() {
    let out = bifront(&["limit", "--reaction", "fisher", "--regime", "singular-perturbation"]);
    assert!(out.status.success());
    let s = stdout(&out);
    let kinks: Vec<&str> = s.lines().filter(|l| l.ends_with(",1")).collect();
    assert_eq!(kinks, ["0.25,0.75,1"]);
}

#[test]
fn dumped_config_round_trips() {
    let first =
        bifront(&["speed", "--reaction", "huxley", "--reaction-param", "40", "--a", "2", "--b", "3", "--dump-config"]);
    assert!(first.status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dump.json");
    std::fs::write(&cfg, &first.stdout).unwrap();
    let second = bifront(&["speed", "--config", cfg.to_str().unwrap(), "--dump-config"]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"reaction": {"catalog": "combustion", "param": 0.3}, "model": {"coupling": {"kind": "epsilon"}, "values": [0.1, 0.01, 0.001]}}"#,
    )
    .unwrap();
    let run = |jobs: &str| bifront(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", jobs, "--seedless"]);
    let (one, four) = (run("1"), run("4"));
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 4);
}

#[test]
fn json_output_parses() {
    let out = bifront(&["speed", "--reaction", "fisher", "--a", "1", "--b", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.to_string().contains("c_star"));
}

#[test]
fn validation_suite_passes() {
    let out = bifront(&["validate"]);
    assert!(out.status.success(), "{}", stdout(&out));
}
