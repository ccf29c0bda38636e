//! Control-space trajectory sampling and scoring.
//!
//! Candidates are turn/straight/turn profiles rolled out with exact arc
//! kinematics and ranked by traversed map cost, curvature, and distance and
//! heading error against a lookahead target on the planned path.

use std::collections::HashSet;

use thiserror::Error;

use crate::astar::GridPath;
use crate::costmap::{CostMap, LETHAL};
use crate::pose::{advance_arc, wrap_angle, Pose2D};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("sampler parameter {0} is invalid")]
    BadParam(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TurnDirection {
    RightStraightLeft,
    LeftStraightRight,
}

/// Piecewise-constant control command: turn, go straight, counter-turn.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct ControlProfile {
    pub direction: TurnDirection,
    /// Turn rate magnitude in rad/s.
    pub omega: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    /// Constant forward speed in m/s.
    pub speed: f64,
}

impl ControlProfile {
    pub fn horizon(&self) -> f64 {
        self.t1 + self.t2 + self.t3
    }

    /// Signed-rate segments in execution order.
    pub fn segments(&self) -> [(f64, f64); 3] {
        let w = if self.omega == 0.0 { 0.0 } else { self.omega };
        let first = match self.direction {
            TurnDirection::RightStraightLeft => -w,
            TurnDirection::LeftStraightRight => w,
        };
        [(first, self.t1), (0.0, self.t2), (-first, self.t3)]
    }

    /// Emergency zero-speed profile.
    pub fn stop(horizon: f64) -> Self {
        Self {
            direction: TurnDirection::RightStraightLeft,
            omega: 0.0,
            t1: 0.0,
            t2: horizon,
            t3: 0.0,
            speed: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CostWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.5,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SamplerParams {
    /// Rollout horizon in seconds.
    pub horizon: f64,
    /// Maximum turn rate in rad/s.
    pub omega_max: f64,
    /// Samples per control dimension.
    pub samples: usize,
    /// Cruise speed in m/s.
    pub speed: f64,
    /// Rollout pose spacing in seconds.
    pub dt: f64,
    /// Vehicle top speed, sets the lookahead distance horizon * v_max.
    pub v_max: f64,
    pub weights: CostWeights,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            horizon: 3.0,
            omega_max: 1.0,
            samples: 10,
            speed: 3.0,
            dt: 0.05,
            v_max: 4.5,
            weights: CostWeights::default(),
        }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.samples < 2 {
            return Err(SamplerError::BadParam("samples"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(SamplerError::BadParam("horizon"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(SamplerError::BadParam("dt"));
        }
        if !(self.omega_max.is_finite() && self.omega_max >= 0.0) {
            return Err(SamplerError::BadParam("omega_max"));
        }
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(SamplerError::BadParam("speed"));
        }
        if !(self.v_max.is_finite() && self.v_max > 0.0) {
            return Err(SamplerError::BadParam("v_max"));
        }
        Ok(())
    }

    pub fn lookahead(&self) -> f64 {
        self.horizon * self.v_max
    }
}

/// Enumerates the profile lattice: `samples` turn rates over [0, omega_max]
/// crossed with segment durations on a `samples`-point lattice over the
/// horizon (t1 + t2 <= horizon), in both turn orders. Profiles that execute
/// the same effective control (zero-rate or zero-length segments) collapse
/// to their first occurrence, so exactly one straight profile survives.
pub fn sample_profiles(params: &SamplerParams) -> Result<Vec<ControlProfile>, SamplerError> {
    params.validate()?;
    let k = params.samples;
    let unit = params.horizon / (k - 1) as f64;
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<(i64, i64)>> = HashSet::new();
    for wi in 0..k {
        let omega = params.omega_max * wi as f64 / (k - 1) as f64;
        for (direction, sign) in [
            (TurnDirection::RightStraightLeft, -1i64),
            (TurnDirection::LeftStraightRight, 1i64),
        ] {
            for a in 0..k {
                for b in 0..k - a {
                    let c = k - 1 - a - b;
                    // exact integer signature of the effective control
                    let mut key: Vec<(i64, i64)> = Vec::with_capacity(3);
                    let rate_idx = if wi == 0 { 0 } else { sign * wi as i64 };
                    for (rate, units) in [
                        (rate_idx, a as i64),
                        (0, b as i64),
                        (-rate_idx, c as i64),
                    ] {
                        if units == 0 {
                            continue;
                        }
                        match key.last_mut() {
                            Some((lr, lu)) if *lr == rate => *lu += units,
                            _ => key.push((rate, units)),
                        }
                    }
                    if !seen.insert(key) {
                        continue;
                    }
                    out.push(ControlProfile {
                        direction,
                        omega,
                        t1: a as f64 * unit,
                        t2: b as f64 * unit,
                        t3: c as f64 * unit,
                        speed: params.speed,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Rolled-out candidate with poses spaced `dt` apart along the arc.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub profile: ControlProfile,
    pub poses: Vec<Pose2D>,
    pub endpoint: Pose2D,
    pub score: f64,
}

/// Integrates a profile from `start` with closed-form arcs, sampling poses
/// every `dt` seconds (segment boundaries need not align with samples).
pub fn rollout(profile: &ControlProfile, start: Pose2D, dt: f64) -> Trajectory {
    let segs = profile.segments();
    let total = profile.horizon();
    let mut poses = Vec::with_capacity((total / dt) as usize + 2);
    poses.push(start);

    let mut pose = start;
    let mut seg = 0usize;
    let mut used = 0.0f64;
    let mut advance = |pose: &mut Pose2D, mut tau: f64| {
        while tau > 1e-12 && seg < 3 {
            let (rate, dur) = segs[seg];
            let left = dur - used;
            if left <= 1e-12 {
                seg += 1;
                used = 0.0;
                continue;
            }
            let step = tau.min(left);
            *pose = advance_arc(*pose, profile.speed, rate, step);
            used += step;
            tau -= step;
        }
    };

    let full_steps = (total / dt + 1e-9).floor() as usize;
    for _ in 0..full_steps {
        advance(&mut pose, dt);
        poses.push(pose);
    }
    let remainder = total - full_steps as f64 * dt;
    if remainder > 1e-9 {
        advance(&mut pose, remainder);
        poses.push(pose);
    }
    Trajectory {
        profile: *profile,
        poses,
        endpoint: pose,
        score: f64::NAN,
    }
}

/// Visits every cell a segment passes through; exact corner crossings take
/// the two 4-connected steps so a one-cell wall can never be jumped.
pub fn for_each_supercover_cell(
    a: (f64, f64),
    b: (f64, f64),
    res: f64,
    mut visit: impl FnMut((i64, i64)),
) {
    let (mut cx, mut cy) = ((a.0 / res).floor() as i64, (a.1 / res).floor() as i64);
    let (ex, ey) = ((b.0 / res).floor() as i64, (b.1 / res).floor() as i64);
    visit((cx, cy));
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let sx: i64 = if dx > 0.0 { 1 } else { -1 };
    let sy: i64 = if dy > 0.0 { 1 } else { -1 };
    let mut tmax_x = if dx != 0.0 {
        let edge = if dx > 0.0 { (cx + 1) as f64 } else { cx as f64 } * res;
        (edge - a.0) / dx
    } else {
        f64::INFINITY
    };
    let mut tmax_y = if dy != 0.0 {
        let edge = if dy > 0.0 { (cy + 1) as f64 } else { cy as f64 } * res;
        (edge - a.1) / dy
    } else {
        f64::INFINITY
    };
    let tdx = if dx != 0.0 { res / dx.abs() } else { f64::INFINITY };
    let tdy = if dy != 0.0 { res / dy.abs() } else { f64::INFINITY };

    let mut guard = 2 * ((ex - cx).abs() + (ey - cy).abs()) + 4;
    while (cx, cy) != (ex, ey) && guard > 0 {
        guard -= 1;
        if tmax_x < tmax_y {
            cx += sx;
            tmax_x += tdx;
        } else if tmax_y < tmax_x {
            cy += sy;
            tmax_y += tdy;
        } else {
            cx += sx;
            tmax_x += tdx;
            visit((cx, cy));
            cy += sy;
            tmax_y += tdy;
        }
        visit((cx, cy));
    }
    if (cx, cy) != (ex, ey) {
        visit((ex, ey));
    }
}

/// Distinct world cells covered by a pose sequence, sorted.
pub fn traversed_cells(poses: &[Pose2D], res: f64) -> Vec<(i64, i64)> {
    let mut cells = Vec::with_capacity(poses.len() * 2);
    match poses {
        [] => {}
        [only] => cells.push((
            (only.x / res).floor() as i64,
            (only.y / res).floor() as i64,
        )),
        _ => {
            for pair in poses.windows(2) {
                for_each_supercover_cell(
                    pair[0].position(),
                    pair[1].position(),
                    res,
                    |c| cells.push(c),
                );
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// Tracking target: a point on the path and the path heading there.
#[derive(Debug, Clone, Copy)]
pub struct LookaheadTarget {
    pub point: (f64, f64),
    pub heading: f64,
}

/// First path vertex at least `distance` along the path from the robot's
/// nearest-point projection; falls back to the final vertex on short paths.
pub fn lookahead_target(path: &GridPath, robot: Pose2D, distance: f64) -> LookaheadTarget {
    let pts = &path.world_points;
    if pts.len() == 1 {
        let (px, py) = pts[0];
        let (dx, dy) = (px - robot.x, py - robot.y);
        let heading = if dx.hypot(dy) > 1e-12 {
            dy.atan2(dx)
        } else {
            robot.heading
        };
        return LookaheadTarget {
            point: pts[0],
            heading,
        };
    }

    let mut best_seg = 0usize;
    let mut best_d2 = f64::INFINITY;
    let mut best_point = pts[0];
    for i in 0..pts.len() - 1 {
        let (ax, ay) = pts[i];
        let (bx, by) = pts[i + 1];
        let (ex, ey) = (bx - ax, by - ay);
        let len2 = ex * ex + ey * ey;
        let t = if len2 > 0.0 {
            (((robot.x - ax) * ex + (robot.y - ay) * ey) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (qx, qy) = (ax + t * ex, ay + t * ey);
        let d2 = (robot.x - qx).powi(2) + (robot.y - qy).powi(2);
        if d2 < best_d2 {
            best_d2 = d2;
            best_seg = i;
            best_point = (qx, qy);
        }
    }

    let mut acc = {
        let (bx, by) = pts[best_seg + 1];
        (bx - best_point.0).hypot(by - best_point.1)
    };
    if acc >= distance {
        return LookaheadTarget {
            point: pts[best_seg + 1],
            heading: windowed_tangent(pts, best_seg + 1),
        };
    }
    for i in best_seg + 1..pts.len() - 1 {
        let (ax, ay) = pts[i];
        let (bx, by) = pts[i + 1];
        acc += (bx - ax).hypot(by - ay);
        if acc >= distance {
            return LookaheadTarget {
                point: pts[i + 1],
                heading: windowed_tangent(pts, i + 1),
            };
        }
    }
    LookaheadTarget {
        point: *pts.last().unwrap(),
        heading: windowed_tangent(pts, pts.len() - 1),
    }
}

/// Path direction at a vertex, averaged over up to 2 m of arc length on each
/// side so the 45-degree staircase of a grid path reads as its true bearing
/// instead of flapping segment to segment.
fn windowed_tangent(pts: &[(f64, f64)], vertex: usize) -> f64 {
    const WINDOW: f64 = 2.0;
    let mut back = pts[vertex];
    let mut left = WINDOW;
    for i in (0..vertex).rev() {
        let (ax, ay) = pts[i];
        let step = (back.0 - ax).hypot(back.1 - ay);
        if step >= left {
            let f = left / step;
            back = (back.0 + (ax - back.0) * f, back.1 + (ay - back.1) * f);
            break;
        }
        left -= step;
        back = pts[i];
    }
    let mut fwd = pts[vertex];
    let mut left = WINDOW;
    for i in vertex + 1..pts.len() {
        let (bx, by) = pts[i];
        let step = (bx - fwd.0).hypot(by - fwd.1);
        if step >= left {
            let f = left / step;
            fwd = (fwd.0 + (bx - fwd.0) * f, fwd.1 + (by - fwd.1) * f);
            break;
        }
        left -= step;
        fwd = pts[i];
    }
    let (dx, dy) = (fwd.0 - back.0, fwd.1 - back.1);
    if dx.hypot(dy) > 1e-12 {
        dy.atan2(dx)
    } else if vertex + 1 < pts.len() {
        let (bx, by) = pts[vertex + 1];
        (by - pts[vertex].1).atan2(bx - pts[vertex].0)
    } else {
        let (ax, ay) = pts[vertex - 1];
        (pts[vertex].1 - ay).atan2(pts[vertex].0 - ax)
    }
}

/// Candidate cost: summed cost of distinct traversed cells, plus weighted
/// curvature, target distance, and heading error. Any lethal cell makes the
/// candidate infeasible (+inf). Cells outside the map contribute nothing.
pub fn score(
    traj: &Trajectory,
    map: &CostMap,
    target: &LookaheadTarget,
    weights: &CostWeights,
    omega_max: f64,
) -> f64 {
    let res = map.grid().spec().resolution;
    let mut map_term = 0.0;
    for cell in traversed_cells(&traj.poses, res) {
        if let Some(v) = map.grid().value_at_cell(cell) {
            if v == LETHAL {
                return f64::INFINITY;
            }
            map_term += v;
        }
    }
    let curvature = if omega_max > 0.0 {
        traj.profile.omega / omega_max
    } else {
        0.0
    };
    let dist = (traj.endpoint.x - target.point.0).hypot(traj.endpoint.y - target.point.1);
    let herr = wrap_angle(traj.endpoint.heading - target.heading).abs();
    map_term + weights.alpha * curvature + weights.beta * dist + weights.gamma * herr
}

/// Zero-speed fallback when every candidate is infeasible.
fn stop_trajectory(robot: Pose2D, params: &SamplerParams) -> Trajectory {
    let mut traj = rollout(&ControlProfile::stop(params.horizon), robot, params.dt);
    traj.score = f64::INFINITY;
    traj
}

/// Rolls out and scores every profile against the path's lookahead target
/// and returns the lowest-scoring feasible trajectory (ties keep the earlier
/// profile). All-infeasible input yields the stop trajectory.
pub fn select_best(
    profiles: &[ControlProfile],
    map: &CostMap,
    path: &GridPath,
    robot: Pose2D,
    params: &SamplerParams,
) -> Trajectory {
    let target = lookahead_target(path, robot, params.lookahead());
    let mut best: Option<Trajectory> = None;
    for profile in profiles {
        let mut traj = rollout(profile, robot, params.dt);
        let s = score(&traj, map, &target, &params.weights, params.omega_max);
        if !s.is_finite() {
            continue;
        }
        traj.score = s;
        if best.as_ref().map_or(true, |b| s < b.score) {
            best = Some(traj);
        }
    }
    best.unwrap_or_else(|| stop_trajectory(robot, params))
}

/// Closed-loop pure-pursuit rollout along a path: each step steers an arc
/// through the lookahead point, with no knowledge of the costmap.
pub fn pure_pursuit_rollout(
    path: &GridPath,
    robot: Pose2D,
    speed: f64,
    lookahead: f64,
    horizon: f64,
    dt: f64,
    omega_max: f64,
) -> Trajectory {
    let mut pose = robot;
    let mut poses = vec![pose];
    let steps = (horizon / dt + 1e-9).floor() as usize;
    for _ in 0..steps {
        let target = lookahead_target(path, pose, lookahead);
        let (dx, dy) = (target.point.0 - pose.x, target.point.1 - pose.y);
        let ly = -pose.heading.sin() * dx + pose.heading.cos() * dy;
        let d2 = dx * dx + dy * dy;
        let omega = if d2 > 1e-9 {
            (speed * 2.0 * ly / d2).clamp(-omega_max, omega_max)
        } else {
            0.0
        };
        pose = advance_arc(pose, speed, omega, dt);
        poses.push(pose);
    }
    Trajectory {
        profile: ControlProfile {
            direction: TurnDirection::LeftStraightRight,
            omega: 0.0,
            t1: 0.0,
            t2: horizon,
            t3: 0.0,
            speed,
        },
        endpoint: pose,
        poses,
        score: f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, LocalGrid};

    fn free_map(size: usize, res: f64) -> CostMap {
        let spec = GridSpec::new(size, res).unwrap();
        CostMap::new(LocalGrid::new(spec, (0, 0), 0.0), Pose2D::default(), 0.0)
    }

    #[test]
    fn lattice_size_and_straight_dedup() {
        let params = SamplerParams::default();
        let profiles = sample_profiles(&params).unwrap();
        assert!(profiles.len() <= 2 * 10 * 55);
        let straight: Vec<_> = profiles
            .iter()
            .filter(|p| p.omega == 0.0 || p.t1 + p.t3 < 1e-12)
            .collect();
        assert_eq!(straight.len(), 1);
        assert_eq!(straight[0].omega, 0.0);
        for p in &profiles {
            assert!((p.horizon() - params.horizon).abs() < 1e-9);
            assert!(p.omega >= 0.0 && p.omega <= params.omega_max + 1e-12);
        }
    }

    #[test]
    fn two_sample_lattice_hits_the_corners() {
        let params = SamplerParams {
            samples: 2,
            ..Default::default()
        };
        let profiles = sample_profiles(&params).unwrap();
        let t = params.horizon;
        for p in &profiles {
            for v in [p.t1, p.t2, p.t3] {
                assert!(v == 0.0 || (v - t).abs() < 1e-12);
            }
            assert!(p.omega == 0.0 || p.omega == params.omega_max);
        }
        assert!(profiles
            .iter()
            .any(|p| p.omega == params.omega_max && p.t1 == t));
    }

    #[test]
    fn single_arc_rollout_matches_the_circle() {
        let profile = ControlProfile {
            direction: TurnDirection::LeftStraightRight,
            omega: 0.5,
            t1: 3.0,
            t2: 0.0,
            t3: 0.0,
            speed: 2.0,
        };
        let traj = rollout(&profile, Pose2D::default(), 0.05);
        let r = 2.0 / 0.5;
        assert!((traj.endpoint.x - r * (1.5f64).sin()).abs() < 1e-9);
        assert!((traj.endpoint.y - r * (1.0 - (1.5f64).cos())).abs() < 1e-9);
        assert!((traj.endpoint.heading - 1.5).abs() < 1e-9);
        assert_eq!(traj.poses.len(), 61);
        for pair in traj.poses.windows(2) {
            let d = pair[0].distance_to(pair[1]);
            let chord = 2.0 * r * (0.5 * 0.05 / 2.0f64).sin();
            assert!((d - chord).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_turns_restore_the_heading() {
        let profile = ControlProfile {
            direction: TurnDirection::RightStraightLeft,
            omega: 0.8,
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
            speed: 3.0,
        };
        let traj = rollout(&profile, Pose2D::new(0.0, 0.0, 0.7), 0.05);
        assert!(wrap_angle(traj.endpoint.heading - 0.7).abs() < 1e-9);
    }

    #[test]
    fn supercover_cannot_jump_a_corner() {
        let mut cells = Vec::new();
        for_each_supercover_cell((0.1, 0.1), (0.5, 0.5), 0.2, |c| cells.push(c));
        assert!(cells.contains(&(1, 0)));
        assert!(cells.contains(&(1, 1)));
        assert_eq!(*cells.last().unwrap(), (2, 2));
        let chain_ok = cells
            .windows(2)
            .all(|w| (w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs() == 1);
        assert!(chain_ok);
    }

    #[test]
    fn lookahead_walks_the_path() {
        let pts: Vec<(f64, f64)> = (0..=40).map(|i| (i as f64 * 0.5, 0.0)).collect();
        let path = GridPath {
            cells: vec![],
            world_points: pts,
            total_cost: 0.0,
        };
        let t = lookahead_target(&path, Pose2D::default(), 13.5);
        assert_eq!(t.point, (13.5, 0.0));
        assert_eq!(t.heading, 0.0);

        let t = lookahead_target(&path, Pose2D::new(9.8, 2.0, 1.0), 5.0);
        assert_eq!(t.point, (15.0, 0.0));

        let t = lookahead_target(&path, Pose2D::default(), 100.0);
        assert_eq!(t.point, (20.0, 0.0));
    }

    #[test]
    fn score_terms() {
        let map = free_map(64, 0.2);
        let weights = CostWeights {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        };
        let profile = ControlProfile::stop(3.0);
        let traj = rollout(&profile, Pose2D::default(), 0.05);
        let target = LookaheadTarget {
            point: (5.0, 5.0),
            heading: 1.0,
        };
        assert_eq!(score(&traj, &map, &target, &weights, 1.0), 0.0);

        let curved = ControlProfile {
            omega: 0.5,
            ..ControlProfile::stop(3.0)
        };
        let traj = rollout(&curved, Pose2D::default(), 0.05);
        let weights = CostWeights {
            alpha: 2.0,
            beta: 0.0,
            gamma: 0.0,
        };
        assert!((score(&traj, &map, &target, &weights, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lethal_cells_make_a_candidate_infeasible() {
        let spec = GridSpec::new(64, 0.2).unwrap();
        let mut grid = LocalGrid::new(spec, (0, 0), 0.0);
        let idx = grid.index_of_point(1.0, 0.1).unwrap();
        grid.set(idx.0, idx.1, LETHAL);
        let map = CostMap::new(grid, Pose2D::default(), 0.0);
        let profile = ControlProfile {
            direction: TurnDirection::LeftStraightRight,
            omega: 0.0,
            t1: 0.0,
            t2: 3.0,
            t3: 0.0,
            speed: 3.0,
        };
        let traj = rollout(&profile, Pose2D::new(0.1, 0.1, 0.0), 0.05);
        let target = LookaheadTarget {
            point: (9.0, 0.0),
            heading: 0.0,
        };
        let s = score(&traj, &map, &target, &CostWeights::default(), 1.0);
        assert_eq!(s, f64::INFINITY);
    }

    #[test]
    fn straight_wins_on_a_free_map_toward_a_straight_target() {
        let map = free_map(256, 0.2);
        let pts: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64 * 0.2, 0.0)).collect();
        let path = GridPath {
            cells: vec![],
            world_points: pts,
            total_cost: 0.0,
        };
        let params = SamplerParams::default();
        let profiles = sample_profiles(&params).unwrap();
        let best = select_best(&profiles, &map, &path, Pose2D::default(), &params);
        assert_eq!(best.profile.omega, 0.0);
        assert!(best.score.is_finite());
        assert!((best.endpoint.y).abs() < 1e-9);
    }

    #[test]
    fn all_lethal_falls_back_to_the_stop_profile() {
        let spec = GridSpec::new(32, 0.2).unwrap();
        let grid = LocalGrid::new(spec, (0, 0), LETHAL);
        let map = CostMap::new(grid, Pose2D::default(), 0.0);
        let path = GridPath {
            cells: vec![],
            world_points: vec![(2.0, 0.0)],
            total_cost: 0.0,
        };
        let params = SamplerParams::default();
        let profiles = sample_profiles(&params).unwrap();
        let best = select_best(&profiles, &map, &path, Pose2D::default(), &params);
        assert_eq!(best.profile.speed, 0.0);
        assert_eq!(best.score, f64::INFINITY);
        assert_eq!(best.endpoint, Pose2D::default());
    }
}
