//! Closed-loop scenario runner: a deterministic event loop driving the
//! sensor, mapping, planning, sampling, and vehicle stages at their own
//! rates against analytic ground truth.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::astar::{clamp_goal, plan, GridPath};
use crate::costmap::{build_costmap, inflate, CostMap};
use crate::fusion::{publish_bundle, Kernel, MapBundle};
use crate::grid::{LayerRingBuffer, RoiTracker};
use crate::pose::Pose2D;
use crate::sampler::{sample_profiles, select_best};
use crate::scan::{ingest_scan, mark_obstacles};
use crate::sim::config::{ScenarioConfig, SimError};
use crate::sim::runlog::{Outcome, PathRecord, PoseRecord, RunLog, SelectionRecord, TimingRecord};
use crate::sim::sensor::raycast_scan;
use crate::sim::vehicle::ProfileCursor;

/// Stage identifiers in same-instant firing order: perception first, then
/// map, plan, trajectory, and finally the vehicle step.
const SENSOR: usize = 0;
const MAP: usize = 1;
const PLAN: usize = 2;
const TRAJ: usize = 3;
const VEHICLE: usize = 4;

/// Final state kept alongside the log so callers can inspect the world the
/// run ended with (latest map, path, pose).
pub struct RunProducts {
    pub log: RunLog,
    pub bundle: Option<MapBundle>,
    pub costmap: Option<CostMap>,
    pub path: Option<GridPath>,
    pub final_pose: Pose2D,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunLog, SimError> {
    run_scenario_full(cfg).map(|p| p.log)
}

pub fn run_scenario_full(cfg: &ScenarioConfig) -> Result<RunProducts, SimError> {
    cfg.validate()?;
    let spec = cfg.grid;
    let terrain = cfg.terrain.build(cfg.seed);
    let kernel = Kernel::gaussian(cfg.fusion.kernel_sigma, cfg.fusion.kernel_radius)?;
    let sampler_params = cfg.effective_sampler();
    let profiles = sample_profiles(&sampler_params)?;
    let goal = (cfg.goal.x, cfg.goal.y);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pose = cfg.start.pose();
    let mut tracker = RoiTracker::new(spec, cfg.roi.half_extent, cfg.roi.margin, pose)?;
    let mut buffer = LayerRingBuffer::new(spec, cfg.fusion.buffer_depth)?;
    let mut bundle: Option<MapBundle> = None;
    let mut costmap: Option<CostMap> = None;
    let mut path: Option<GridPath> = None;
    let mut cursor: Option<ProfileCursor> = None;

    let mut log = RunLog {
        poses: vec![PoseRecord { t: 0.0, pose }],
        selections: Vec::new(),
        paths: Vec::new(),
        timings: Vec::new(),
        outcome: Outcome::Timeout,
        elapsed: cfg.duration_limit,
    };

    let rates = [
        cfg.sensor.rate_hz,
        cfg.rates.map_hz,
        cfg.rates.astar_hz,
        cfg.rates.traj_hz,
        cfg.rates.vehicle_hz,
    ];
    // next firing counts; the vehicle's first step lands at 1/vehicle_hz
    let mut counts = [0u64, 0, 0, 0, 1];
    let vehicle_dt = 1.0 / cfg.rates.vehicle_hz;

    'outer: loop {
        let mut stage = usize::MAX;
        let mut when = f64::INFINITY;
        for (i, (&rate, &count)) in rates.iter().zip(counts.iter()).enumerate() {
            let t = count as f64 / rate;
            if t < when - 1e-12 {
                when = t;
                stage = i;
            }
        }
        if when > cfg.duration_limit + 1e-9 {
            log.outcome = Outcome::Timeout;
            log.elapsed = cfg.duration_limit;
            break;
        }
        counts[stage] += 1;

        match stage {
            SENSOR => {
                let cloud = raycast_scan(&terrain, &cfg.sensor, pose, when, &mut rng);
                let t0 = Instant::now();
                tracker.advance(pose, buffer.grids_mut())?;
                let layers = ingest_scan(&cloud, pose, spec, &tracker)?;
                let layers = mark_obstacles(layers, cfg.fusion.obstacle_threshold)?;
                buffer.push(layers)?;
                log.timings.push(TimingRecord {
                    t: when,
                    stage: "ingest",
                    millis: t0.elapsed().as_secs_f64() * 1e3,
                });
            }
            MAP => {
                if buffer.is_empty() {
                    continue;
                }
                let t0 = Instant::now();
                let b = publish_bundle(&buffer, pose, tracker.half_extent(), &kernel, when)?;
                let base = build_costmap(&b, &cfg.cost)?;
                let inflated = inflate(&base, cfg.cost.robot_radius)?;
                log.timings.push(TimingRecord {
                    t: when,
                    stage: "map",
                    millis: t0.elapsed().as_secs_f64() * 1e3,
                });
                bundle = Some(b);
                costmap = Some(inflated);
            }
            PLAN => {
                let Some(map) = costmap.as_ref() else {
                    continue;
                };
                let t0 = Instant::now();
                let Ok(goal_cell) = clamp_goal(goal, map) else {
                    continue;
                };
                let start_cell = map
                    .grid()
                    .index_of_point(pose.x, pose.y)
                    .unwrap_or_else(|| {
                        let s = map.size();
                        (s / 2, s / 2)
                    });
                // failed cycles keep the previous path
                if let Ok(p) = plan(map, start_cell, goal_cell) {
                    log.paths.push(PathRecord {
                        t: when,
                        points: p.world_points.clone(),
                        total_cost: p.total_cost,
                    });
                    path = Some(p);
                }
                log.timings.push(TimingRecord {
                    t: when,
                    stage: "plan",
                    millis: t0.elapsed().as_secs_f64() * 1e3,
                });
            }
            TRAJ => {
                let Some(map) = costmap.as_ref() else {
                    continue;
                };
                let t0 = Instant::now();
                let fallback;
                let path_ref = match path.as_ref() {
                    Some(p) => p,
                    None => match clamp_goal(goal, map) {
                        Ok(cell) => {
                            fallback = GridPath::single(map, cell);
                            &fallback
                        }
                        Err(_) => {
                            cursor = None;
                            continue;
                        }
                    },
                };
                let best = select_best(&profiles, map, path_ref, pose, &sampler_params);
                log.timings.push(TimingRecord {
                    t: when,
                    stage: "sample",
                    millis: t0.elapsed().as_secs_f64() * 1e3,
                });
                log.selections.push(SelectionRecord {
                    t: when,
                    start: pose,
                    profile: best.profile,
                    endpoint: best.endpoint,
                    score: best.score,
                });
                cursor = Some(ProfileCursor::new(best.profile));
            }
            VEHICLE => {
                if let Some(c) = cursor.as_mut() {
                    pose = c.step(pose, vehicle_dt, &cfg.vehicle);
                }
                log.poses.push(PoseRecord { t: when, pose });
                if terrain.collides(pose.x, pose.y, cfg.vehicle.radius) {
                    log.outcome = Outcome::Collision;
                    log.elapsed = when;
                    break 'outer;
                }
                if (pose.x - goal.0).hypot(pose.y - goal.1) <= cfg.goal_tolerance {
                    log.outcome = Outcome::GoalReached;
                    log.elapsed = when;
                    break 'outer;
                }
            }
            _ => unreachable!(),
        }
    }

    Ok(RunProducts {
        log,
        bundle,
        costmap,
        path,
        final_pose: pose,
    })
}
