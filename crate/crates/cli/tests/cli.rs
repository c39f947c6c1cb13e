use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use skyq::TurbulenceModel;

fn skyq() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_skyq"));
    c.env_remove("SKYQ_OUT_DIR").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    skyq().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn profile_matches_module_per_point() {
    let o = run(&["profile", "--model", "slcd-day", "--from", "1", "--to", "20000", "--points", "100"]);
    let text = stdout(&o);
    assert!(text.starts_with("altitude_m,cn2\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 100);
    for r in rows {
        let h: f64 = r[0].parse().unwrap();
        let c: f64 = r[1].parse().unwrap();
        assert_eq!(c, TurbulenceModel::SlcdDay.cn2(h).unwrap());
        assert_eq!(r[1].split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
    }
}

#[test]
fn pdt_downlink_day_220m_mode_near_half() {
    let o = run(&[
        "pdt", "--direction", "downlink", "--daytime", "--altitude", "220", "--samples", "1000000", "--seed", "7",
    ]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 100);
    let (mut best, mut best_p) = (0.0, -1.0);
    let mut total = 0.0;
    for r in &rows {
        assert_eq!(r[0].split('.').nth(1).unwrap().len(), 5);
        let (c, p): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        total += p;
        if p > best_p {
            best = c;
            best_p = p;
        }
    }
    assert!((total - 1.0).abs() < 1e-9);
    assert!((best - 0.5).abs() <= 0.05, "mode at {best}");
}

#[test]
fn invalid_subcommand_is_a_usage_error() {
    let o = run(&["teleport-everything"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad_param = dir.path().join("bad.json");
    fs::write(&bad_param, r#"{"subcommand": "profile", "parameters": {"modle": "slcd-day"}}"#).unwrap();
    let o = run(&["profile", "--config", bad_param.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[config]"));

    let bad_top = dir.path().join("top.json");
    fs::write(&bad_top, r#"{"subcommand": "profile", "colour": "red"}"#).unwrap();
    assert_eq!(run(&["run", bad_top.to_str().unwrap()]).status.code(), Some(2));

    let nested = dir.path().join("nested.json");
    fs::write(&nested, r#"{"parameters": {"channel": {"dirction": "uplink"}}}"#).unwrap();
    assert_eq!(run(&["pdt", "--config", nested.to_str().unwrap()]).status.code(), Some(2));

    let wrong = dir.path().join("wrong.json");
    fs::write(&wrong, r#"{"subcommand": "beam"}"#).unwrap();
    assert_eq!(run(&["profile", "--config", wrong.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn flags_override_file_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    fs::write(
        &cfg,
        r#"{"subcommand": "profile", "parameters": {"from": 10, "to": 20, "points": 3}, "output_format": "json"}"#,
    )
    .unwrap();
    let o = run(&["profile", "--config", cfg.to_str().unwrap(), "--points", "5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = &v["parameters"];
    assert_eq!(p["points"], 5);
    assert_eq!(p["from"], 10.0);
    assert_eq!(p["model"], "slcd-day");
    assert_eq!(v["result"]["altitude_m"].as_array().unwrap().len(), 5);

    let o = run(&["profile", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(stdout(&o).starts_with("altitude_m,cn2"));
}

#[test]
fn nested_channel_flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pdt.json");
    fs::write(
        &cfg,
        r#"{"subcommand": "pdt", "parameters": {"channel": {"direction": "uplink", "daytime": true}, "samples": 1000}, "output_format": "json"}"#,
    )
    .unwrap();
    let o = run(&["pdt", "--config", cfg.to_str().unwrap(), "--night"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["parameters"]["channel"]["direction"], "uplink");
    assert_eq!(v["parameters"]["channel"]["daytime"], false);
    assert_eq!(v["result"]["histogram"]["n_samples"], 1000);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = skyq()
        .env("SKYQ_OUT_DIR", dir.path())
        .args(["budget", "--format", "json"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written = fs::read_to_string(dir.path().join("budget.json")).unwrap();
    let v: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 4);
    let summary = String::from_utf8_lossy(&o.stderr);
    assert_eq!(summary.lines().count(), 1);
    assert!(summary.contains("budget.json"));
}

#[test]
fn error_categories() {
    let o = run(&["pdt", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[numeric]: elliptic_channel"));

    let o = run(&["visibility-report", "--input", "/nonexistent/visibility.csv"]);
    assert_eq!(o.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&["profile", "--output", blocker.join("out.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let o = run(&["run", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn malformed_visibility_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("v.csv");
    fs::write(&f, "label,visibility_km\njan,2\nfeb,abc\n").unwrap();
    let o = run(&["visibility-report", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
}

fn run_to_file(args: &[&str], out: &Path, threads: &str) -> Vec<u8> {
    let o = skyq()
        .env("RAYON_NUM_THREADS", threads)
        .args(args)
        .args(["--output", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(out).unwrap()
}

#[test]
fn identical_config_and_seed_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["pdt", "--samples", "20000", "--altitude", "150", "--seed", "9"],
        &["pdt", "--samples", "5000", "--format", "json", "--direction", "uplink", "--night"],
        &["surface", "--samples", "500", "--altitudes", "30,220", "--zeniths-deg", "0,30,60", "--seed", "4"],
        &["netsim", "--n-repeaters", "3", "--repetitions", "50", "--seed", "2"],
        &["netsim", "--n-repeaters", "2", "--format", "json", "--event-log", "--bsm-success", "0.7"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = |tag: &str| dir.path().join(format!("{i}-{tag}"));
        let a = run_to_file(args, &path("a"), "4");
        let b = run_to_file(args, &path("b"), "4");
        let single = run_to_file(args, &path("c"), "1");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?} differs between runs");
        assert_eq!(a, single, "{args:?} differs between thread counts");
    }
}

#[test]
fn transmittance_driven_noise_uses_channel_mean() {
    let o = run(&[
        "netsim", "--n-repeaters", "1", "--noise", "transmittance-driven", "--channel-samples", "2000",
        "--repetitions", "4", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let eta = v["result"]["noise"]["eta"].as_f64().unwrap();
    assert!(eta > 0.0 && eta < 1.0);
    let f = v["result"]["statistics"]["mean_fidelity"].as_f64().unwrap();
    let lambda = eta * eta;
    assert!((f - (1.0 + lambda) / 2.0).abs() < 1e-9);
}

#[test]
fn every_checked_in_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let configs = repo_root().join("configs");
    let mut n = 0;
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        // Shrink Monte Carlo work; everything else is used as checked in.
        let mut cfg: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        if let Some(s) = cfg["parameters"].get_mut("samples") {
            *s = Value::from(1000);
        }
        if let Some(Value::String(input)) = cfg["parameters"].get("input").cloned() {
            cfg["parameters"]["input"] = Value::from(configs.join(input).to_str().unwrap());
        }
        let tmp = dir.path().join(path.file_name().unwrap());
        fs::write(&tmp, serde_json::to_string(&cfg).unwrap()).unwrap();
        let out = dir.path().join(format!("{}.out", path.file_stem().unwrap().to_str().unwrap()));
        let o = run(&["run", tmp.to_str().unwrap(), "--output", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        assert!(fs::metadata(&out).unwrap().len() > 0);
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn help_for_each_subcommand() {
    for sub in ["profile", "attenuation", "beam", "pdt", "surface", "budget", "netsim", "visibility-report", "run"] {
        let o = run(&[sub, "--help"]);
        assert!(o.status.success(), "{sub}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}
