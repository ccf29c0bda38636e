//! Per-stage wall-clock benchmarks with pass/fail budgets.

use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::astar::{clamp_goal, plan};
use crate::costmap::{build_costmap, inflate};
use crate::fusion::{publish_bundle, Kernel};
use crate::grid::{LayerRingBuffer, RoiTracker};
use crate::sampler::{sample_profiles, select_best};
use crate::scan::{ingest_scan, mark_obstacles};
use crate::sim::config::{ScenarioConfig, SimError};
use crate::sim::sensor::raycast_scan;

/// Budgets in milliseconds for one cycle of each stage.
pub const INGEST_BUDGET_MS: f64 = 100.0;
pub const MAP_PLAN_BUDGET_MS: f64 = 200.0;
pub const SAMPLE_BUDGET_MS: f64 = 33.0;

#[derive(Debug, Clone)]
pub struct StageBench {
    pub name: &'static str,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    pub budget_ms: f64,
}

impl StageBench {
    pub fn pass(&self) -> bool {
        self.mean_ms <= self.budget_ms
    }

    fn from_samples(name: &'static str, budget_ms: f64, mut ms: Vec<f64>) -> Self {
        ms.sort_by(f64::total_cmp);
        let n = ms.len();
        let mean = ms.iter().sum::<f64>() / n as f64;
        let p95 = ms[((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1];
        StageBench {
            name,
            mean_ms: mean,
            p95_ms: p95,
            max_ms: ms[n - 1],
            budget_ms,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub iterations: usize,
    pub stages: Vec<StageBench>,
}

impl BenchReport {
    pub fn all_pass(&self) -> bool {
        self.stages.iter().all(StageBench::pass)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} iterations per stage\n{:<28} {:>9} {:>9} {:>9} {:>9}  result",
            self.iterations, "stage", "mean ms", "p95 ms", "max ms", "budget"
        )?;
        for s in &self.stages {
            writeln!(
                f,
                "{:<28} {:>9.3} {:>9.3} {:>9.3} {:>9.1}  {}",
                s.name,
                s.mean_ms,
                s.p95_ms,
                s.max_ms,
                s.budget_ms,
                if s.pass() { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Times each pipeline stage in isolation on the scenario's own geometry:
/// scan ingestion, the fused map + costmap + planner chain, and a full
/// trajectory sampling cycle.
pub fn run_stage_benches(
    cfg: &ScenarioConfig,
    iterations: usize,
) -> Result<BenchReport, SimError> {
    cfg.validate()?;
    let iterations = iterations.max(1);
    let spec = cfg.grid;
    let terrain = cfg.terrain.build(cfg.seed);
    let kernel = Kernel::gaussian(cfg.fusion.kernel_sigma, cfg.fusion.kernel_radius)?;
    let pose = cfg.start.pose();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let tracker = RoiTracker::new(spec, cfg.roi.half_extent, cfg.roi.margin, pose)?;
    let cloud = raycast_scan(&terrain, &cfg.sensor, pose, 0.0, &mut rng);

    let mut ingest_ms = Vec::with_capacity(iterations);
    let mut last = None;
    for _ in 0..iterations {
        let t0 = Instant::now();
        let layers = ingest_scan(&cloud, pose, spec, &tracker)?;
        let layers = mark_obstacles(layers, cfg.fusion.obstacle_threshold)?;
        ingest_ms.push(t0.elapsed().as_secs_f64() * 1e3);
        last = Some(layers);
    }

    let mut buffer = LayerRingBuffer::new(spec, cfg.fusion.buffer_depth)?;
    for _ in 0..cfg.fusion.buffer_depth {
        let layers = ingest_scan(&cloud, pose, spec, &tracker)?;
        buffer.push(mark_obstacles(layers, cfg.fusion.obstacle_threshold)?)?;
    }
    drop(last);

    let goal = (cfg.goal.x, cfg.goal.y);
    let mut map_ms = Vec::with_capacity(iterations);
    let mut final_map = None;
    for _ in 0..iterations {
        let t0 = Instant::now();
        let bundle = publish_bundle(&buffer, pose, tracker.half_extent(), &kernel, 0.0)?;
        let base = build_costmap(&bundle, &cfg.cost)?;
        let map = inflate(&base, cfg.cost.robot_radius)?;
        let goal_cell = clamp_goal(goal, &map)?;
        let start_cell = map
            .grid()
            .index_of_point(pose.x, pose.y)
            .unwrap_or((map.size() / 2, map.size() / 2));
        let path = plan(&map, start_cell, goal_cell)?;
        map_ms.push(t0.elapsed().as_secs_f64() * 1e3);
        final_map = Some((map, path));
    }
    let (map, path) = final_map.expect("at least one iteration");

    let params = cfg.effective_sampler();
    let mut sample_ms = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let t0 = Instant::now();
        let profiles = sample_profiles(&params)?;
        let best = select_best(&profiles, &map, &path, pose, &params);
        sample_ms.push(t0.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(best.endpoint);
    }

    Ok(BenchReport {
        iterations,
        stages: vec![
            StageBench::from_samples("scan ingest", INGEST_BUDGET_MS, ingest_ms),
            StageBench::from_samples("fuse + costmap + plan", MAP_PLAN_BUDGET_MS, map_ms),
            StageBench::from_samples("trajectory sample", SAMPLE_BUDGET_MS, sample_ms),
        ],
    })
}
