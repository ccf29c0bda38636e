//! End-to-end checks of the scenario loop, log export, and config loading.

use std::path::{Path, PathBuf};

use terranav::{rollout, run_scenario, run_scenario_full, Outcome, ScenarioConfig};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

#[test]
fn flat_scenario_reaches_goal_with_consistent_records() {
    let cfg = ScenarioConfig::load(&config_path("flat.toml")).unwrap();
    let products = run_scenario_full(&cfg).unwrap();
    let log = &products.log;
    assert_eq!(log.outcome, Outcome::GoalReached);

    assert!(!log.poses.is_empty());
    for w in log.poses.windows(2) {
        assert!(w[1].t > w[0].t, "pose timeline not monotone");
    }

    // every recorded selection replays to its recorded endpoint
    let params = cfg.effective_sampler();
    assert!(!log.selections.is_empty());
    for sel in &log.selections {
        let traj = rollout(&sel.profile, sel.start, params.dt);
        assert!(
            (traj.endpoint.x - sel.endpoint.x).abs() < 1e-9
                && (traj.endpoint.y - sel.endpoint.y).abs() < 1e-9,
            "selection at t={} does not replay: ({}, {}) vs ({}, {})",
            sel.t,
            traj.endpoint.x,
            traj.endpoint.y,
            sel.endpoint.x,
            sel.endpoint.y
        );
        assert!(sel.score.is_finite());
    }

    let d = (products.final_pose.x - cfg.goal.x).hypot(products.final_pose.y - cfg.goal.y);
    assert!(
        d <= cfg.goal_tolerance + 1e-9,
        "final pose {d:.3} m from goal, tolerance {}",
        cfg.goal_tolerance
    );

    // the last tick's artifacts ride along for inspection
    assert!(products.bundle.is_some());
    assert!(products.costmap.is_some());
    assert!(products.path.is_some());
}

#[test]
fn run_log_exports_all_csv_tables() {
    let cfg = ScenarioConfig::load(&config_path("flat.toml")).unwrap();
    let log = run_scenario(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    log.write_csv_dir(dir.path()).unwrap();

    let poses = std::fs::read_to_string(dir.path().join("poses.csv")).unwrap();
    assert_eq!(poses.lines().count(), log.poses.len() + 1);
    assert!(poses.starts_with("t,"));

    let selections = std::fs::read_to_string(dir.path().join("selections.csv")).unwrap();
    assert_eq!(selections.lines().count(), log.selections.len() + 1);

    let paths = std::fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    let rows: usize = log.paths.iter().map(|p| p.points.len()).sum();
    assert_eq!(paths.lines().count(), rows + 1);

    let timings = std::fs::read_to_string(dir.path().join("timings.csv")).unwrap();
    assert_eq!(timings.lines().count(), log.timings.len() + 1);

    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("goal_reached"));
}

#[test]
fn config_errors_are_flagged_as_such() {
    let err = ScenarioConfig::load(Path::new("/definitely/not/here.toml")).unwrap_err();
    assert!(err.is_config(), "missing file: {err}");

    let dir = tempfile::tempdir().unwrap();
    let garbled = dir.path().join("garbled.toml");
    std::fs::write(&garbled, "schema_version = [[[").unwrap();
    let err = ScenarioConfig::load(&garbled).unwrap_err();
    assert!(err.is_config(), "garbled file: {err}");

    let err = ScenarioConfig::from_toml_str(
        "schema_version = 1\ngoal_tolerance = 5.0\n[goal]\nx = 1.0\ny = 0.0\n",
    )
    .unwrap_err();
    assert!(err.is_config(), "goal inside tolerance: {err}");
}

#[test]
fn scenario_configs_in_the_repo_validate() {
    for name in ["flat.toml", "cone_field.toml", "corridor.toml"] {
        let cfg = ScenarioConfig::load(&config_path(name)).unwrap();
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
