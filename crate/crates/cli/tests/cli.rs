use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frbcoord")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generate_writes_scenario_and_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sys.toml");
    std::fs::write(&cfg, "num_fdcs = 2\nusers_per_fdc = 2\n").unwrap();
    let scen = dir.path().join("scenario.json");
    let tensor = dir.path().join("g.bin");
    let out = run(&[
        "generate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "4",
        "--out",
        scen.to_str().unwrap(),
        "--tensor",
        tensor.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&scen).unwrap()).unwrap();
    assert_eq!(v["topology"]["num_fdcs"], 2);

    let solved = stdout_json(&run(&["solve", "--tensor", tensor.to_str().unwrap(), "--scheme", "exhaustive,single_fdc"]));
    let greedy = solved["greedy"]["min_sinr_trace"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    let exact = solved["schemes"]["exhaustive"]["min_sinr"].as_f64().unwrap();
    assert!(exact >= greedy * (1.0 - 1e-12));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["sweep", "--drops", "2", "--realizations", "2", "--power-dbm=-10,20", "--scheme", "greedy,orthogonal", "--seed", "8"];
    for (path, extra) in [(&a, None), (&b, Some("--sequential"))] {
        let mut args: Vec<&str> = common.to_vec();
        args.extend(["--out", path.to_str().unwrap()]);
        args.extend(extra);
        let summary = stdout_json(&run(&args));
        assert_eq!(summary.as_array().unwrap().len(), 4);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2 * 2);
    assert!(dir.path().join("a.summary.json").exists());
}

#[test]
fn cap_violation_is_reported_not_fatal() {
    let out = run(&["sweep", "--drops", "1", "--realizations", "1", "--power-dbm", "30", "--scheme", "exhaustive", "--cap", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn oracle_suite_passes() {
    let report = stdout_json(&run(&["oracle", "--seed", "1", "--trials", "20"]));
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["failures"] == 0));
}

#[test]
fn contract_violations_exit_nonzero() {
    let bad = run(&["sweep", "--drops", "0"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("drops"));
    assert!(!run(&["solve", "--scheme", "random"]).status.success());
    assert!(!run(&["generate", "--config", "/nonexistent/cfg.toml"]).status.success());
    assert!(!run(&["oracle", "--trials", "0"]).status.success());
}
