use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tricomi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricomi")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Drops the fields that legitimately differ between identical invocations.
fn strip_clock(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for key in ["started_unix", "finished_unix", "wall_seconds"] {
                map.remove(key);
            }
            map.values_mut().for_each(strip_clock);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_clock),
        _ => {}
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn critical_exponents_are_flagged() {
    let out = tricomi(&["exponents", "--n", "2", "--m", "1", "--p", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p_T = 3\n"), "{text}");
    assert!(text.contains("gamma_T = 0\n"), "{text}");
    assert!(text.contains("regime = critical"), "{text}");
}

#[test]
fn exponents_as_json() {
    let out = tricomi(&["exponents", "--n", "1", "--m", "1", "--p", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["manifest"]["subcommand"], "exponents");
    assert!((v["params"]["upper_exponent"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!(v["params"]["p_t"].is_null());
}

#[test]
fn selftest_passes_and_tags_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("selftest.csv");
    let out = tricomi(&["specfun-selftest", "--out", path(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().ends_with(",pass,config_hash"));
    assert!(lines.all(|l| l.contains(",true,")));
    assert!(text.ends_with('\n'));
}

#[test]
fn zero_amplitude_reaches_the_horizon() {
    let out = tricomi(&["simulate", "--dim", "1", "--m", "0", "--p", "2", "--epsilon", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["status"], "horizon_reached");
    assert!(v["result"]["T_eps"].is_null());
    assert_eq!(v["result"]["config_hash"], v["manifest"]["config_hash"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&tricomi(&["bogus"])), 2);
    assert_eq!(code(&tricomi(&[])), 2);
    assert_eq!(code(&tricomi(&["exponents", "--n", "0", "--m", "1", "--p", "2"])), 2);
    assert_eq!(code(&tricomi(&["simulate", "--epsilon", "1", "--n", "1000"])), 2);
    assert_eq!(code(&tricomi(&["simulate", "--epsilon", "-1"])), 2);
    assert_eq!(code(&tricomi(&["--help"])), 0);
}

#[test]
fn identical_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |csv: &str| {
        vec![
            "simulate".to_string(),
            "--epsilon".into(),
            "0.8".into(),
            "--n".into(),
            "512".into(),
            "--L".into(),
            "16".into(),
            "--t-max".into(),
            "3".into(),
            "--out".into(),
            csv.to_string(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run = |csv: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_tricomi")).args(args(path(csv))).output().unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let mut v = stdout_json(&out);
        strip_clock(&mut v);
        v
    };
    assert_eq!(run(&a), run(&b));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("t,max_v,max_u,support_radius,dt,config_hash\n"));
}

#[test]
fn lambda_and_symbols_checks_pass() {
    let out = tricomi(&["lambda", "--m", "1", "--check", "ode,wronskian,limits,asymptotics,series"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = tricomi(&["symbols", "--m", "1", "--t", "1.5", "--points", "20", "--check", "wronskian"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = tricomi(&["symbols", "--m", "0", "--t", "2", "--points", "20", "--check", "wave-limit"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // the wave limit only exists at m = 0
    let out = tricomi(&["symbols", "--m", "1", "--t", "2", "--check", "wave-limit"]);
    assert_eq!(code(&out), 2);
}

const SMALL_SWEEP: &str = "\
# short 1D sweep
grid.n = 1024
grid.half_width = 40
sim.t_max = 8
epsilons = 0.8, 0.7, 0.6
";

#[test]
fn sweep_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(&cfg, SMALL_SWEEP).unwrap();
    let out_dir = dir.path().join("out");
    std::fs::create_dir(&out_dir).unwrap();
    let out = tricomi(&["sweep", "--config", path(&cfg), "--out-dir", path(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = stdout_json(&out);
    let fit = &summary["summary"]["fit"];
    let slope = fit["slope"].as_f64().unwrap();
    assert!(slope < 0.0, "{summary}");
    assert_eq!(summary["summary"]["config"]["grid"]["n"], 1024);
    assert_eq!(summary["summary"]["blown_up"], 3);
    for file in ["records.csv", "summary.json", "manifest.json"] {
        assert!(out_dir.join(file).exists(), "{file}");
    }
    let records = out_dir.join("records.csv");
    let out = tricomi(&["fit", "--records", path(&records), "--n", "1", "--m", "1", "--p", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let refit = stdout_json(&out);
    assert_eq!(refit["analysis"]["fit"]["slope"].as_f64().unwrap(), slope);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(&cfg, r#"{"grid": {"n": 512, "half_width": 16.0}, "sim": {"t_max": 3.0}, "epsilons": [0.8, 0.4]}"#)
        .unwrap();
    let out = tricomi(&["sweep", "--config", path(&cfg), "--epsilons", "0.3,0.25,0.2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["summary"]["config"]["epsilons"], serde_json::json!([0.3, 0.25, 0.2]));
    assert_eq!(v["summary"]["config"]["grid"]["n"], 512);
    // with no blow-up there is nothing to fit, which is reported, not fatal
    assert!(v["summary"]["fit"].is_null());
    assert!(v["summary"]["fit_reason"].is_string());

    // key order in the file does not change the hash
    let reordered = dir.path().join("reordered.json");
    std::fs::write(
        &reordered,
        r#"{"epsilons": [0.8, 0.4], "sim": {"t_max": 3.0}, "grid": {"half_width": 16.0, "n": 512}}"#,
    )
    .unwrap();
    let hash = |file: &Path| {
        let out = tricomi(&["sweep", "--config", path(file), "--epsilons", "0.3,0.25,0.2"]);
        stdout_json(&out)["manifest"]["config_hash"].clone()
    };
    assert_eq!(hash(&cfg), hash(&reordered));

    std::fs::write(&cfg, r#"{"grid": {"points": 512}}"#).unwrap();
    assert_eq!(code(&tricomi(&["sweep", "--config", path(&cfg)])), 2);
}

#[test]
fn stored_trace_checks() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let out = tricomi(&[
        "simulate",
        "--epsilon",
        "0.8",
        "--n",
        "1024",
        "--L",
        "20",
        "--t-max",
        "5.8",
        "--snapshot-dt",
        "0.02",
        "--trace-json",
        path(&trace),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["result"]["status"], "blown_up");

    let csv = dir.path().join("weak.csv");
    let out = tricomi(&["verify-weakform", "--trace", path(&trace), "--M-grid", "1.5:5:0.5", "--csv", path(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["rows"].as_array().unwrap().len(), 8);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 9);

    // the unit-constant form of the inequality does not hold on this run
    let out = tricomi(&["check-inequality", "--trace", path(&trace), "--M-grid", "1.5:5:0.5"]);
    assert_eq!(code(&out), 1);
    let k = stdout_json(&out)["report"]["implied_constant"].as_f64().unwrap();
    assert!(k > 1.0 && k < 1e3, "{k}");
    let generous = format!("{}", 1.01 * k);
    let out = tricomi(&["check-inequality", "--trace", path(&trace), "--M-grid", "1.5:5:0.5", "--constant", &generous]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let wrong_m = tricomi(&["verify-weakform", "--trace", path(&trace), "--M-grid", "2", "--m", "2"]);
    assert_eq!(code(&wrong_m), 2);
    assert!(stderr(&wrong_m).contains("--m"));
    let beyond = tricomi(&["check-inequality", "--trace", path(&trace), "--M-grid", "6"]);
    assert_eq!(code(&beyond), 2);
    let missing = tricomi(&["verify-weakform", "--trace", path(&dir.path().join("nope.json")), "--M-grid", "2"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn trace_without_snapshots_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let out = tricomi(&[
        "simulate",
        "--epsilon",
        "0.5",
        "--n",
        "256",
        "--L",
        "8",
        "--t-max",
        "1",
        "--trace-json",
        path(&trace),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = tricomi(&["verify-weakform", "--trace", path(&trace), "--M-grid", "0.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("snapshot"));
}
