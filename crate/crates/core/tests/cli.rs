use std::process::{Command, Output};

fn foliate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foliate"))
        .args(args)
        .env_remove("FOLIATE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn numbers(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name).iter().map(|v| v.parse().unwrap()).collect()
}

#[test]
fn run_writes_the_reduced_euler_leaf_values() {
    let csv = stdout(&foliate(&["run", "--system", "eq1", "--method", "lie-euler", "--dt", "0.1", "--steps", "4", "--ic", "2,0"]));
    assert_eq!(csv.lines().count(), 6);
    let i = numbers(&csv, "I0");
    let mut r = 2.0f64;
    for v in i {
        assert!((v - r * r).abs() <= 1e-12);
        r += 0.1 * r * (1.0 - r * r);
    }
}

#[test]
fn lorenz_split_run_decays_at_the_reduced_rate() {
    let csv = stdout(&foliate(&["run", "--system", "lorenz", "--method", "split", "--dt", "0.01", "--steps", "1000", "--ic", "1,1,1"]));
    let i = numbers(&csv, "I0");
    let x = numbers(&csv, "x0");
    let z = numbers(&csv, "x2");
    assert_eq!(i.len(), 1001);
    let rate = (-0.2f64).exp();
    for n in 0..1000 {
        // I = x² − 20z cancels as the orbit decays, so rounding is measured
        // against the size of the cancelling terms.
        let scale = |k: usize| x[k] * x[k] + 20.0 * z[k].abs();
        let rounding = 1e-14 * scale(n).max(scale(n + 1));
        let gap = (i[n + 1] - rate * i[n]).abs();
        assert!(gap <= 1e-8 * rate * i[n].abs() + rounding, "step {n}: {gap:e}");
    }
    let well_conditioned = (0..1000).filter(|&n| i[n].abs() > 1e-3 * (x[n] * x[n] + 20.0 * z[n].abs())).count();
    assert!(well_conditioned >= 50);
}

#[test]
fn invalid_steps_exit_with_config_status() {
    let out = foliate(&["run", "--steps", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps must be ≥ 1"));
}

#[test]
fn unknown_system_lists_valid_names() {
    let out = foliate(&["run", "--system", "duffing"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["eq1", "eq2", "lorenz", "isospectral", "left-mult", "skew-product"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn divergence_exits_with_status_three_and_the_step() {
    let out = foliate(&["run", "--method", "euler", "--dt", "10", "--steps", "50"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step "));
}

#[test]
fn unmeasurable_order_exits_with_status_four() {
    let out = foliate(&["order", "--system", "skew-product", "--param", "a=0", "--param", "b=0", "--method", "rk4"]);
    assert_eq!(out.status.code(), Some(4));
}

fn spread_at(csv: &str, method: &str, step: &str) -> f64 {
    let methods = column(csv, "method");
    let steps = column(csv, "step");
    let spreads = numbers(csv, "spread");
    (0..methods.len())
        .find(|&i| methods[i] == method && steps[i] == step)
        .map(|i| spreads[i])
        .unwrap()
}

#[test]
fn figure2_preset_separates_the_methods() {
    let csv = stdout(&foliate(&["compare", "--figure2"]));
    assert_eq!(csv.lines().count(), 1 + 2 * 20 * 5);
    for step in ["0", "1", "2", "3", "4"] {
        assert!(spread_at(&csv, "lie-euler", step) <= 1e-12);
    }
    assert!(spread_at(&csv, "euler", "4") >= 1e-3);
}

#[test]
fn two_foliate_methods_on_the_integral_system() {
    let csv = stdout(&foliate(&[
        "compare", "--system", "fig1-middle", "--method", "lie-euler", "--method", "rkmk4",
        "--ic", "circle:1.5:12", "--dt", "0.05", "--steps", "40",
    ]));
    for s in numbers(&csv, "spread") {
        assert!(s <= 1e-12);
    }
}

#[test]
fn compare_needs_two_methods() {
    let out = foliate(&["compare", "--method", "euler"]);
    assert_eq!(out.status.code(), Some(2));
}

fn slope(args: &[&str]) -> f64 {
    let csv = stdout(&foliate(args));
    numbers(&csv, "fitted_slope")[0]
}

#[test]
fn order_command_measures_classical_orders() {
    let s = slope(&["order", "--system", "eq1", "--method", "lie-euler", "--ic", "0.5,0.5"]);
    assert!((s - 1.0).abs() <= 0.1, "{s}");
    let s = slope(&["order", "--system", "eq1", "--method", "rkmk4", "--ic", "0.5,0.5"]);
    assert!((s - 4.0).abs() <= 0.2, "{s}");
    let s = slope(&["order", "--system", "eq2", "--method", "midpoint", "--ic", "0.5,0.5"]);
    assert!((s - 2.0).abs() <= 0.1, "{s}");
    let s = slope(&["order", "--system", "eq2", "--method", "rk", "--tableau", "rk3", "--ic", "0.5,0.5", "--dt-list", "0.1,0.05,0.025"]);
    assert!((s - 3.0).abs() <= 0.2, "{s}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundle.json");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = foliate(&[
            "run", "--system", "isospectral", "--method", "rkmk4", "--ic", "leaf-bundle:7:4",
            "--steps", "20", "--dt", "0.05", "--format", "json", "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let doc: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(doc["data"]["columns"][0], "ic");
    assert_eq!(doc["data"]["rows"].as_array().unwrap().len(), 4 * 21);
    assert_eq!(doc["meta"]["config"]["method"], "rkmk4");
}

#[test]
fn seed_flag_wins_over_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_foliate"));
        cmd.args(["run", "--ic", "leaf-bundle:3", "--steps", "1"]);
        match env {
            Some(e) => cmd.env("FOLIATE_SEED", e),
            None => cmd.env_remove("FOLIATE_SEED"),
        };
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        stdout(&cmd.output().unwrap())
    };
    let from_env = run(Some("5"), None);
    assert_eq!(from_env, run(None, Some("5")));
    assert_ne!(from_env, run(None, None));
    assert_eq!(run(Some("9"), Some("5")), from_env);
}

#[test]
fn config_file_round_trips_through_meta() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = foliate(&["run", "--system", "eq2", "--method", "rk4", "--steps", "3", "--format", "json", "--out", first.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&first).unwrap()).unwrap();
    let mut cfg = doc["meta"]["config"].clone();
    cfg["out"] = serde_json::Value::Null;
    cfg["format"] = "csv".into();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let csv = stdout(&foliate(&["run", "--config", cfg_path.to_str().unwrap()]));
    let direct = stdout(&foliate(&["run", "--system", "eq2", "--method", "rk4", "--steps", "3"]));
    assert_eq!(csv, direct);
}
