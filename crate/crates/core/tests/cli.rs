//! Command-line behaviour, driven in-process and through the built binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use sirfb::cli::main_with_args;
use sirfb::config::ScenarioConfig;
use tempfile::TempDir;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sirfb").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{stdout}"))
}

/// Small, fast R₀ = 0.8 scenario.
const VANISHING: &str = r#"
[model]
b = 1.0
beta = 0.4
mu1 = 0.5
mu2 = 0.6
mu3 = 0.7
alpha = 0.4
d1 = 1.0
d2 = 1.0
d3 = 1.0
mu = 1.0
n = 1

[initial]
h0 = 1.0
s0 = { kind = "constant", value = 2.0 }
i0 = { kind = "bump", amplitude = 0.5 }

[grid]
length = 20.0
n_l = 200
n_h = 40

[time]
dt = 0.01
t_end = 200.0
save_stride = 50
"#;

fn scenario(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn subthreshold_run_vanishes() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "v.toml", VANISHING);
    let (code, out, _) = invoke(&["run", s(&cfg)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().last().unwrap(), "classification=VANISHING");
    assert_eq!(value(&out, "regime"), "VANISHING (R0<1)");
    assert_eq!(value(&out, "front_monotone"), "true");
}

#[test]
fn invalid_scenarios_exit_with_config_status() {
    let dir = TempDir::new().unwrap();
    let bad_mu = scenario(&dir, "a.toml", &VANISHING.replace("mu1 = 0.5", "mu1 = 0.9"));
    let (code, _, err) = invoke(&["run", s(&bad_mu)]);
    assert_eq!(code, 1);
    assert!(err.contains("mu1"), "{err}");

    let wide = scenario(&dir, "b.toml", &VANISHING.replace("h0 = 1.0", "h0 = 25.0"));
    assert_eq!(invoke(&["run", s(&wide)]).0, 1);

    let typo = scenario(&dir, "c.toml", &VANISHING.replace("alpha", "alhpa"));
    let (code, _, err) = invoke(&["thresholds", s(&typo)]);
    assert_eq!(code, 1);
    assert!(err.contains("alhpa"), "{err}");

    assert_eq!(invoke(&["run", "/nonexistent/x.toml"]).0, 1);
    assert_eq!(invoke(&["frobnicate"]).0, 1);
    assert_eq!(invoke(&["--help"]).0, 0);
}

#[test]
fn thresholds_in_three_dimensions() {
    let dir = TempDir::new().unwrap();
    let text = VANISHING.replace("beta = 0.4", "beta = 1.0").replace("n = 1", "n = 3");
    let cfg = scenario(&dir, "t.toml", &text);
    let (code, out, _) = invoke(&["thresholds", s(&cfg)]);
    assert_eq!(code, 0);
    assert!(value(&out, "h0_star").starts_with("3.14159"), "{out}");
    assert_eq!(value(&out, "r0"), "2.00000000000");
    assert!(value(&out, "regime").starts_with("UNDETERMINED") || value(&out, "regime").starts_with("VANISHING"));

    let far = scenario(&dir, "f.toml", &text.replace("h0 = 1.0", "h0 = 4.0"));
    let (_, out, _) = invoke(&["thresholds", s(&far)]);
    assert_eq!(value(&out, "regime"), "SPREADING (R0>1, h0>h0_star)");
}

#[test]
fn eigenvalue_command() {
    let (code, out, _) = invoke(&["eig", "--n", "3", "--R", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "9.86960440109");
    let (_, out, _) = invoke(&["eig", "--n", "1", "--R", "2"]);
    assert_eq!(out.trim(), "0.616850275068");
    assert_eq!(invoke(&["eig", "--n", "4", "--R", "1"]).0, 1);
    assert_eq!(invoke(&["eig", "--n", "2", "--R", "-1"]).0, 1);
}

#[test]
fn single_step_sweep_matches_run() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "v.toml", VANISHING);
    let (_, run_out, _) = invoke(&["run", s(&cfg)]);
    let (code, out, _) = invoke(&["sweep", s(&cfg), "--param", "beta", "--from", "0.4", "--to", "0.4", "--steps", "1"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "value,classification,h_end,sup_I_end");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "VANISHING");
    let h_run: f64 = value(&run_out, "h_end").parse().unwrap();
    assert!((row[2].parse::<f64>().unwrap() - h_run).abs() < 1e-10 * h_run);
}

#[test]
fn sweep_output_is_reproducible_and_flips_once() {
    let dir = TempDir::new().unwrap();
    let text = VANISHING
        .replace("beta = 0.4", "beta = 1.0")
        .replace("mu = 1.0", "mu = 2.0")
        .replace("t_end = 200.0", "t_end = 60.0")
        .replace("length = 20.0", "length = 40.0")
        .replace("n_l = 200", "n_l = 400");
    let cfg = scenario(&dir, "s.toml", &text);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let (code, _, err) = invoke(&[
            "sweep", s(&cfg), "--param", "h0", "--from", "0.3", "--to", "2.5", "--steps", "4", "--out", s(path),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let body = fs::read(&a).unwrap();
    assert_eq!(body, fs::read(&b).unwrap());
    let labels: Vec<String> = String::from_utf8(body)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(labels.len(), 4);
    assert!(labels.windows(2).filter(|w| w[0] != w[1]).count() <= 1, "{labels:?}");
}

#[test]
fn bisection_with_same_labels_exits_with_sweep_status() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "v.toml", VANISHING);
    let (code, _, err) = invoke(&["sweep", s(&cfg), "--param", "h0", "--from", "0.5", "--to", "1.5", "--bisect", "--iterations", "2"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn run_writes_requested_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "v.toml", &VANISHING.replace("t_end = 200.0", "t_end = 5.0"));
    let series = dir.path().join("series.csv");
    let profiles = dir.path().join("profiles");
    let chart = dir.path().join("chart.svg");
    let (code, _, err) = invoke(&[
        "run",
        s(&cfg),
        "--series",
        s(&series),
        "--profiles",
        s(&profiles),
        "--svg",
        s(&chart),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&series).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,h,dhdt,sup_S,sup_I,sup_R,mass_I,balance_residual");
    assert!(text.lines().count() > 2);
    let index = fs::read_to_string(profiles.join("index.csv")).unwrap();
    assert_eq!(index.lines().next().unwrap(), "frame,t,h");
    let first = fs::read_to_string(profiles.join("profile_00000.csv")).unwrap();
    assert_eq!(first.lines().next().unwrap(), "r,S,I,R");
    assert!(fs::read_to_string(&chart).unwrap().starts_with("<svg"));
}

#[test]
fn fixed_domain_run_and_ode_command() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "v.toml", &VANISHING.replace("t_end = 200.0", "t_end = 20.0"));
    let (code, out, _) = invoke(&["run", s(&cfg), "--fixed-domain"]);
    assert_eq!(code, 0);
    let label = value(&out, "classification");
    assert!(label == "VANISHING" || label == "UNDECIDED");

    let traj = dir.path().join("ode.csv");
    let (code, out, _) = invoke(&["ode", s(&cfg), "--t-end", "300", "--dt", "0.01", "--state", "1.5,0.3,0.1", "--out", s(&traj)]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "r0"), "0.800000000000");
    assert!(value(&out, "I_end").parse::<f64>().unwrap() < 1e-6);
    assert!(out.lines().all(|l| !l.starts_with("endemic=")));
    assert_eq!(fs::read_to_string(&traj).unwrap().lines().next().unwrap(), "t,S,I,R");
}

#[test]
fn convergence_command_prints_rows_and_orders() {
    let dir = TempDir::new().unwrap();
    let text = VANISHING
        .replace("beta = 0.4", "beta = 1.0")
        .replace("mu = 1.0", "mu = 0.25")
        .replace("t_end = 200.0", "t_end = 2.0")
        .replace("save_stride = 50", "save_stride = 1");
    let cfg = scenario(&dir, "c.toml", &text);
    let (code, out, err) = invoke(&["convergence", s(&cfg), "--levels", "3", "--probes", "1,2"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n_h,n_l,dt,h_end,res_t1,res_t2");
    assert!(lines[1].starts_with("40,200,"));
    assert!(out.contains("h_order[0]="));
    assert!(out.contains("residual_ratio[1]="));
}

#[test]
fn binary_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "v.toml", VANISHING);
    let bin = env!("CARGO_BIN_EXE_sirfb");
    let o = Command::new(bin).args(["run", s(&cfg)]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).ends_with("classification=VANISHING\n"));
    let o = Command::new(bin).args(["eig", "--n", "2", "--R", "1"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "5.78318596295");
    let o = Command::new(bin).args(["run", "missing.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn dumped_config_round_trips(
        beta in 0.1..5.0f64,
        mu in 0.1..5.0f64,
        h0 in 0.5..3.0f64,
        amp in 0.1..2.0f64,
        n in 1usize..=3,
        n_h in 16usize..200,
    ) {
        let mut cfg = ScenarioConfig::example();
        cfg.model.beta = beta;
        cfg.model.mu = mu;
        cfg.model.n = n;
        cfg.initial.h0 = h0;
        cfg.initial.i0 = sirfb::config::ProfileSpec::Bump { amplitude: amp };
        cfg.grid.n_h = n_h;
        let dir = TempDir::new().unwrap();
        let path = scenario(&dir, "x.toml", &cfg.to_toml());
        let (code, out, _) = invoke(&["run", s(&path), "--dump-config"]);
        prop_assert_eq!(code, 0);
        prop_assert_eq!(ScenarioConfig::parse(&out).unwrap(), cfg);
    }
}
