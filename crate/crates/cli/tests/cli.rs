use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wsn-deploy"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn rl_trace_is_non_increasing() {
    let out = tempfile::tempdir().unwrap();
    let cfg = scenario("paper-uniform.scn");
    let o = run(&["--config", cfg.to_str().unwrap(), "--algorithm", "rl", "--seed", "1", "--out", out.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(out.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,objective_watts,movement_energy_node0_j,"));
    let d = column(&trace, "objective_watts");
    assert!(d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    let summary = fs::read_to_string(out.path().join("summary.toml")).unwrap();
    assert!(summary.contains(&format!("iterations = {}", d.len() - 1)));
}

#[test]
fn merl_with_zero_budget_does_not_move() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("paper-gaussian.scn")).unwrap();
    let cfg = dir.path().join("zero.scn");
    fs::write(&cfg, text.replace("total_budget_j = 40000", "total_budget_j = 0")).unwrap();
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "--algorithm", "merl", "--grid", "40x40", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dep = fs::read_to_string(out.join("deployment.csv")).unwrap();
    assert_eq!(column(&dep, "x_m"), column(&dep, "initial_x_m"));
    assert_eq!(column(&dep, "y_m"), column(&dep, "initial_y_m"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("paper-gaussian.scn");
    let mut dirs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = run(&["--config", cfg.to_str().unwrap(), "--algorithm", "lorl", "--grid", "50x50", "--seed", "9", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        dirs.push(out);
    }
    for file in ["deployment.csv", "trace.csv", "routing.csv", "summary.toml"] {
        assert_eq!(fs::read(dirs[0].join(file)).unwrap(), fs::read(dirs[1].join(file)).unwrap(), "{file}");
    }
}

#[test]
fn batch_writes_one_directory_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("paper-uniform.scn");
    let o = run(&["--config", cfg.to_str().unwrap(), "--grid", "30x30", "--seed", "5", "--batch-seeds", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for seed in 5..8 {
        assert!(dir.path().join(format!("seed-{seed}")).join("summary.toml").exists());
    }
    // A batch member matches the same seed run alone.
    let single = dir.path().join("single");
    run(&["--config", cfg.to_str().unwrap(), "--grid", "30x30", "--seed", "6", "--out", single.to_str().unwrap()]);
    assert_eq!(
        fs::read(single.join("trace.csv")).unwrap(),
        fs::read(dir.path().join("seed-6/trace.csv")).unwrap()
    );
}

#[test]
fn init_from_file_uses_given_positions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("example1.scn");
    let init = dir.path().join("init.csv");
    fs::write(&init, "x_m,y_m\n0.1,0.1\n0.2,0.9\n0.8,0.3\n0.5,0.5\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "--grid", "20x20", "--init", init.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dep = fs::read_to_string(out.join("deployment.csv")).unwrap();
    assert_eq!(column(&dep, "initial_x_m"), vec![0.1, 0.2, 0.8, 0.5]);
}

#[test]
fn unknown_algorithm_is_rejected() {
    let cfg = scenario("example1.scn");
    let o = run(&["--config", cfg.to_str().unwrap(), "--algorithm", "pso", "--out", "/tmp/unused"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown algorithm"));
}

#[test]
fn merl_without_move_costs_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--config",
        scenario("example1.scn").to_str().unwrap(),
        "--algorithm",
        "merl",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("mobility.move_cost_j_per_m"));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&[
        "--config",
        scenario("example1.scn").to_str().unwrap(),
        "--grid",
        "10x10",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert!(!o.status.success());
}

#[test]
fn bad_grid_is_rejected() {
    let o = run(&["--config", "x.scn", "--grid", "100", "--out", "/tmp/unused"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("WxH"));
}
