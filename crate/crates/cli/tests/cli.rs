use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn skec(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_skec")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn jsonl(cmd: &str, config: &Path, extra: &[&str]) -> Vec<Value> {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--format", "jsonl"];
    args.extend_from_slice(extra);
    let r = skec(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn find<'a>(rows: &'a [Value], bound: &str, direction: &str) -> &'a Value {
    rows.iter().find(|r| r["bound"] == bound && r["direction"] == direction).unwrap()
}

#[test]
fn validate_classifies_fixtures() {
    let rows = jsonl("validate", &fixture("bsc_pair.toml"), &[]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["record"], "verdict");
    assert_eq!(rows[2]["is_sd"], true);

    let rows = jsonl("validate", &fixture("correlated_noise.toml"), &[]);
    assert_eq!(rows[0]["direction"], "forward");
    assert_eq!(rows[0]["independent_components"], false);
    assert_eq!(rows[2]["is_sd"], false);

    let rows = jsonl("validate", &fixture("incomparable.toml"), &[]);
    assert_eq!(rows[0]["order"], "incomparable");
    assert!(rows[0]["witness"].is_null());
    assert_eq!(rows[1]["order"], "favor_legit");
    assert_eq!(rows[2]["is_sd"], false);
}

#[test]
fn noiseless_to_everyone_gives_zero_bounds() {
    let rows = jsonl("bounds", &fixture("noiseless_everyone.toml"), &[]);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!(r["value"].as_f64().unwrap().abs() < 1e-9, "{r}");
        assert_eq!(r["ordering_pass"], true);
    }
}

#[test]
fn bsc_pair_bounds_are_ordered() {
    let rows = jsonl("bounds", &fixture("bsc_pair.toml"), &[]);
    let names: Vec<&str> = rows.iter().map(|r| r["bound"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["lower_general", "lower_general", "icc", "icc", "lower_sd", "lower_sd", "upper", "capacity_sd_iid"]
    );
    assert!(rows.iter().all(|r| r["ordering_pass"] == true && r["schema_version"] == 1));
    assert!(rows[6]["direction"].is_null());
    let upper = rows[6]["value"].as_f64().unwrap();
    let lower = find(&rows, "lower_general", "a")["value"].as_f64().unwrap();
    assert!(lower > 0.0 && lower <= upper + 1e-6);
    assert!(find(&rows, "lower_general", "a")["argmax"].is_object());
    assert!(find(&rows, "icc", "b")["constraint_slack"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn sd_request_on_non_sd_setup_is_refused() {
    let r = skec(&["bounds", "--config", fixture("correlated_noise.toml").to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("not conditionally independent"), "{}", r.stderr);
    // without the request the sd rows are simply absent
    let rows = jsonl("bounds", &fixture("incomparable.toml"), &[]);
    assert!(rows.iter().all(|r| r["bound"] != "lower_sd" && r["bound"] != "capacity_sd_iid"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [("bounds", "bsc_pair.toml"), ("validate", "incomparable.toml"), ("simulate", "simulate_noiseless.toml")] {
        for format in ["csv", "jsonl"] {
            let outs: Vec<Vec<u8>> = (0..2)
                .map(|k| {
                    let out = dir.path().join(format!("{cmd}-{k}.{format}"));
                    let r = skec(&[
                        cmd,
                        "--config",
                        fixture(cfg).to_str().unwrap(),
                        "--seed",
                        "11",
                        "--out",
                        out.to_str().unwrap(),
                        "--format",
                        format,
                    ]);
                    assert_eq!(r.code, 0, "{}", r.stderr);
                    std::fs::read(out).unwrap()
                })
                .collect();
            assert!(!outs[0].is_empty());
            assert_eq!(outs[0], outs[1], "{cmd} {format}");
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let one = jsonl("bounds", &fixture("bsc_pair.toml"), &["--workers", "1"]);
    let three = jsonl("bounds", &fixture("bsc_pair.toml"), &["--workers", "3"]);
    assert_eq!(one, three);
}

#[test]
fn jsonl_values_round_trip_losslessly() {
    let rows = jsonl("bounds", &fixture("bsc_pair.toml"), &[]);
    let text = std::fs::read_to_string(fixture("bsc_pair.toml")).unwrap();
    let cfg = skec_cli::RunConfig::parse(&text, None).unwrap();
    let set = skec_cli::BoundSet::compute(cfg.setup.as_ref().unwrap(), &cfg.search, cfg.sd).unwrap();
    let got = find(&rows, "lower_general", "a")["value"].as_f64().unwrap();
    assert_eq!(got.to_bits(), set.general.lower.a.value.to_bits());
    let got = find(&rows, "icc", "b")["ratio"].as_f64().unwrap();
    assert_eq!(got.to_bits(), set.general.icc.b.ratio.to_bits());
    // and re-serializing the parsed lines reproduces them
    let again: Vec<String> = rows.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
    let back: Vec<Value> = again.iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows, back);
}

#[test]
fn sweep_single_point_matches_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "one.toml", "[sweep]\nlegit = 0.1\neve = 0.3\n[search]\nrestarts = 8\n");
    let rows = jsonl("sweep", &cfg, &[]);
    assert_eq!(rows.len(), 1);
    let bounds = jsonl("bounds", &fixture("bsc_pair.toml"), &[]);
    let pairs = [
        ("lower_general_a", "lower_general", "a"),
        ("lower_general_b", "lower_general", "b"),
        ("icc_a", "icc", "a"),
        ("icc_b", "icc", "b"),
        ("lower_sd_a", "lower_sd", "a"),
        ("lower_sd_b", "lower_sd", "b"),
    ];
    for (col, bound, dir) in pairs {
        assert_eq!(rows[0][col], find(&bounds, bound, dir)["value"], "{col}");
    }
    assert_eq!(rows[0]["upper"], bounds[6]["value"]);
    assert_eq!(rows[0]["ordering_pass"], true);
}

#[test]
fn eve_sweep_bounds_grow_with_eve_noise() {
    let rows = jsonl("sweep", &fixture("sweep_eve.toml"), &[]);
    assert_eq!(rows.len(), 5);
    let eve: Vec<f64> = rows.iter().map(|r| r["eve"].as_f64().unwrap()).collect();
    assert!(eve.windows(2).all(|w| w[0] < w[1]));
    for col in ["lower_general", "icc", "lower_sd", "capacity_sd_iid", "upper"] {
        let v: Vec<f64> = rows.iter().map(|r| r[col].as_f64().unwrap()).collect();
        for w in v.windows(2) {
            assert!(w[1] >= w[0] - 1e-6, "{col}: {v:?}");
        }
    }
}

#[test]
fn empty_or_out_of_range_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.toml", "[sweep]\nlegit = []\neve = 0.3\n");
    let r = skec(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1") && r.stderr.contains("sweep.legit"), "{}", r.stderr);
    let cfg = write_config(dir.path(), "wide.toml", "[sweep]\nlegit = 0.1\neve = [0.3, 0.6]\n");
    assert_eq!(skec(&["sweep", "--config", cfg.to_str().unwrap()]).code, 2);
}

#[test]
fn malformed_configs_name_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "[channels]\nforward = \"bsc_pair 0.1 0.3\"\n\n[channels.backward]\ninput = 2\nlegit_output = 2\neve_output = 2\nlegit = [[0.9, 0.2], [0.1, 0.9]]\neve = [[0.5, 0.5], [0.5, 0.5]]\n",
    );
    let r = skec(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("channels.backward.legit") && r.stderr.contains("line"), "{}", r.stderr);

    let cfg = write_config(dir.path(), "typo.toml", "[channels]\nforward = \"bsc_pair 0.1 0.3\"\nbackwards = \"bsc_pair 0.1 0.3\"\n");
    let r = skec(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn missing_files_are_io_errors() {
    let r = skec(&["validate", "--config", "/nonexistent/skec.toml"]);
    assert_eq!(r.code, 1);
    let r = skec(&["validate", "--config", fixture("bsc_pair.toml").to_str().unwrap(), "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(r.code, 1);
}

#[test]
fn noiseless_simulation_never_errs() {
    let rows = jsonl("simulate", &fixture("simulate_noiseless.toml"), &[]);
    let r = &rows[0];
    assert_eq!(r["sessions"], 1000);
    assert_eq!(r["p_error"], 0.0);
    assert_eq!(r["ok"], 1000);
    assert_eq!(r["reliability_pass"], true);
}

#[test]
fn pure_noise_eve_learns_nothing() {
    let rows = jsonl("simulate", &fixture("simulate_pure_noise_eve.toml"), &[]);
    assert!(rows[0]["leakage_ratio"].as_f64().unwrap() < 0.01);
    assert_eq!(rows[0]["secrecy_pass"], true);
}

#[test]
fn zero_key_length_gives_zero_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k0.toml",
        "[channels]\nforward = \"bsc_pair 0.05 0.3\"\nbackward = \"bsc_pair 0.05 0.3\"\n[simulate]\ntotal = 16\nkappa = 0\nsessions = 100\n",
    );
    let r = &jsonl("simulate", &cfg, &[])[0];
    for k in ["p_error", "key_entropy", "key_entropy_plugin", "key_entropy_exact", "rate", "leakage", "leakage_ratio"] {
        assert_eq!(r[k], 0.0, "{k}");
    }
}

#[test]
fn infeasible_and_oversized_plans_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "inf.toml",
        "[channels]\nforward = \"bsc_pair 0.3 0.1\"\nbackward = \"bsc_pair 0.3 0.1\"\n[simulate]\nn_f = 8\nn_b = 4\n",
    );
    let r = skec(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("H(Y_f|X_f)") && r.stderr.contains("I(X_b;Y_b)"), "{}", r.stderr);
    let cfg = write_config(
        dir.path(),
        "big.toml",
        "[channels]\nforward = \"bsc_pair 0 0.3\"\nbackward = \"bsc_pair 0 0.3\"\n[simulate]\nn_f = 20\nn_b = 20\n",
    );
    assert_eq!(skec(&["simulate", "--config", cfg.to_str().unwrap()]).code, 4);
}

#[test]
fn per_session_rows_go_to_a_sibling_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "[channels]\nforward = \"bsc_pair 0.1 0.3\"\nbackward = \"bsc_pair 0.1 0.3\"\n[simulate]\nn_f = 4\nn_b = 8\nsessions = 40\nper_session = true\n",
    );
    let out = dir.path().join("report.csv");
    let r = skec(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let sessions = std::fs::read_to_string(dir.path().join("report.sessions.csv")).unwrap();
    assert_eq!(sessions.lines().count(), 41);
    assert!(sessions.starts_with("schema_version,session,failure_mode,s,s_hat,f,b,views"));
    let report = std::fs::read_to_string(&out).unwrap();
    assert_eq!(report.lines().count(), 2);
    // stdout cannot hold two tables
    assert_eq!(skec(&["simulate", "--config", cfg.to_str().unwrap()]).code, 2);
}
