//! Black-box tests of the terranav binary: exit codes, output files,
//! and error reporting for each subcommand.

use std::path::Path;
use std::process::{Command, Output};

const SMALL_SCENARIO: &str = "\
schema_version = 1
seed = 3
duration_limit = 20.0
cruise_speed = 3.0

[goal]
x = 8.0
y = 0.0

[grid]
size = 128
resolution = 0.2

[roi]
half_extent = 10.0

[sensor]
rings = 6
azimuths = 90
max_range = 15.0
noise_sigma = 0.02
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_terranav"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_reaches_goal_and_writes_logs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let logs = dir.path().join("logs");
    let out = run(&["run", "--config", &cfg, "--out", logs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("outcome: goal_reached"), "stdout: {text}");
    assert!(text.contains("min clearance:"));
    assert!(text.contains("stage "));
    for file in [
        "poses.csv",
        "selections.csv",
        "paths.csv",
        "timings.csv",
        "summary.txt",
    ] {
        assert!(logs.join(file).is_file(), "{file} missing");
    }
}

#[test]
fn run_reports_timeout_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let short = SMALL_SCENARIO.replace("duration_limit = 20.0", "duration_limit = 1.5");
    let cfg = write_scenario(dir.path(), "short.toml", &short);
    let out = run(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("outcome: timeout"));
}

#[test]
fn run_reports_collision_with_exit_2() {
    // a curb too low to register as an obstacle or meaningful slope, spanning
    // the whole corridor: the planner drives straight through it
    let scenario = format!(
        "{SMALL_SCENARIO}\n[[terrain.boxes]]\n\
         x0 = 4.0\nx1 = 5.0\ny0 = -8.0\ny1 = 8.0\nheight = 0.05\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "curb.toml", &scenario);
    let out = run(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("outcome: collision"));
}

#[test]
fn missing_config_exits_64() {
    let out = run(&["run", "--config", "/no/such/file.toml"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("error"));
}

#[test]
fn unsupported_schema_exits_64() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(
        dir.path(),
        "future.toml",
        "schema_version = 99\n[goal]\nx = 8.0\ny = 0.0\n",
    );
    let out = run(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(64), "stderr: {}", stderr(&out));
}

#[test]
fn bench_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let report_dir = dir.path().join("bench");
    let out = run(&[
        "bench",
        "--config",
        &cfg,
        "--iterations",
        "2",
        "--out",
        report_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("scan ingest"));
    assert!(text.contains("trajectory sample"));
    let report = std::fs::read_to_string(report_dir.join("bench_report.txt")).unwrap();
    assert_eq!(report, text);
}

#[test]
fn dump_map_writes_selected_layers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let maps = dir.path().join("maps");
    let out = run(&[
        "dump-map",
        "--config",
        &cfg,
        "--out",
        maps.to_str().unwrap(),
        "--layers",
        "cost,height",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(maps.join("cost.grid").is_file());
    assert!(maps.join("height.grid").is_file());
    assert!(!maps.join("gradient.grid").exists(), "unrequested layer written");
}

#[test]
fn dump_map_rejects_unknown_layers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let out = run(&[
        "dump-map",
        "--config",
        &cfg,
        "--out",
        dir.path().join("maps").to_str().unwrap(),
        "--layers",
        "bogus",
    ]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("unknown layer"));
}

fn write_cloud(dir: &Path, name: &str, points: &[[f64; 3]]) -> String {
    let mut text = String::from("# x,y,z\n");
    for p in points {
        text.push_str(&format!("{},{},{}\n", p[0], p[1], p[2]));
    }
    write_scenario(dir, name, &text)
}

#[test]
fn replay_rejects_mismatched_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cloud_a = write_cloud(dir.path(), "a.csv", &[[1.0, 0.0, 0.2]]);
    let cloud_b = write_cloud(dir.path(), "b.csv", &[[1.5, 0.0, 0.2]]);
    let poses = write_scenario(dir.path(), "poses.csv", "0,0,0\n");
    let out = run(&[
        "replay",
        &cloud_a,
        &cloud_b,
        "--poses",
        &poses,
        "--out",
        dir.path().join("maps").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("counts must match"));
}

#[test]
fn replay_builds_maps_from_recorded_clouds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let cloud_a = write_cloud(
        dir.path(),
        "a.csv",
        &[[2.0, 0.0, 0.0], [2.0, 0.4, 0.9], [3.0, -1.0, 0.1]],
    );
    let cloud_b = write_cloud(
        dir.path(),
        "b.csv",
        &[[2.2, 0.0, 0.0], [2.2, 0.4, 0.9], [3.1, -1.0, 0.1]],
    );
    let poses = write_scenario(dir.path(), "poses.csv", "0,0,0\n0.2,0,0\n");
    let maps = dir.path().join("maps");
    let out = run(&[
        "replay",
        &cloud_a,
        &cloud_b,
        "--poses",
        &poses,
        "--config",
        &cfg,
        "--out",
        maps.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("replayed 2 clouds"));
    for layer in ["height", "height_filled", "gradient", "obstacle", "certainty", "cost"] {
        assert!(maps.join(format!("{layer}.grid")).is_file(), "{layer} missing");
    }
}

#[test]
fn plot_data_emits_plot_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let plots = dir.path().join("plots");
    let out = run(&[
        "plot-data",
        "--config",
        &cfg,
        "--out",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    for file in ["final_path.csv", "costmap.csv", "terrain.csv", "poses.csv"] {
        assert!(plots.join(file).is_file(), "{file} missing");
    }
    let terrain = std::fs::read_to_string(plots.join("terrain.csv")).unwrap();
    assert!(terrain.contains("goal,8,0"));
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "small.toml", SMALL_SCENARIO);
    let run_with_seed = |seed: &str, out_name: &str| {
        let logs = dir.path().join(out_name);
        let out = run(&[
            "run",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            logs.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        std::fs::read_to_string(logs.join("poses.csv")).unwrap()
    };
    let a = run_with_seed("11", "a");
    let b = run_with_seed("11", "b");
    let c = run_with_seed("12", "c");
    assert_eq!(a, b, "same seed must reproduce the same pose log");
    assert_ne!(a, c, "different sensor noise seeds should perturb the run");
}
