//! 8-connected A* over the inflated costmap.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::costmap::{CostMap, LETHAL};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("goal point is not finite")]
    BadGoal,
    #[error("start cell is lethal")]
    LethalStart,
    #[error("no traversable path between start and goal")]
    NoPath,
    #[error("costmap has no traversable cell")]
    MapFull,
}

/// Planned cell path with world-space vertices at cell centers.
#[derive(Debug, Clone)]
pub struct GridPath {
    pub cells: Vec<(usize, usize)>,
    pub world_points: Vec<(f64, f64)>,
    pub total_cost: f64,
}

impl GridPath {
    /// Degenerate single-vertex path, used when no plan is available.
    pub fn single(map: &CostMap, cell: (usize, usize)) -> Self {
        Self {
            cells: vec![cell],
            world_points: vec![map.grid().cell_center(cell.0, cell.1)],
            total_cost: 0.0,
        }
    }
}

/// Selects the planning goal cell for a world-space goal.
///
/// In-map goals use their own cell. Out-of-map goals clamp to the nearest
/// boundary cell. A lethal result falls back to the non-lethal cell nearest
/// the goal (ties: lower cost, then row-major order).
pub fn clamp_goal(goal: (f64, f64), map: &CostMap) -> Result<(usize, usize), PlanError> {
    if !(goal.0.is_finite() && goal.1.is_finite()) {
        return Err(PlanError::BadGoal);
    }
    let grid = map.grid();
    let s = grid.size() as i64;
    let half = s / 2;
    let (center_x, center_y) = grid.center_cell();
    let (gx, gy) = grid.spec().floor_cell(goal.0, goal.1);
    let col = (gx - center_x + half).clamp(0, s - 1) as usize;
    let row = (gy - center_y + half).clamp(0, s - 1) as usize;
    if !map.is_lethal(col, row) {
        return Ok((col, row));
    }
    let mut best: Option<((usize, usize), f64, f64)> = None;
    for row in 0..grid.size() {
        for col in 0..grid.size() {
            let cost = map.get(col, row);
            if cost == LETHAL {
                continue;
            }
            let (cx, cy) = grid.cell_center(col, row);
            let d2 = (cx - goal.0).powi(2) + (cy - goal.1).powi(2);
            let better = match best {
                None => true,
                Some((_, bd2, bcost)) => {
                    d2 < bd2 || (d2 == bd2 && cost < bcost)
                }
            };
            if better {
                best = Some(((col, row), d2, cost));
            }
        }
    }
    best.map(|(cell, _, _)| cell).ok_or(PlanError::MapFull)
}

#[derive(Clone, Copy)]
struct Open {
    f: f64,
    h: f64,
    seq: u64,
    idx: u32,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // max-heap: lowest f wins, then lowest h, then first inserted
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(other.h.total_cmp(&self.h))
            .then(other.seq.cmp(&self.seq))
    }
}

const STEPS: [(i64, i64, f64); 8] = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, std::f64::consts::SQRT_2),
    (1, -1, std::f64::consts::SQRT_2),
    (-1, 1, std::f64::consts::SQRT_2),
    (-1, -1, std::f64::consts::SQRT_2),
];

/// Shortest 8-connected path where each step costs its cell length plus the
/// mean of the endpoint cell costs times that length.
pub fn plan(
    map: &CostMap,
    start: (usize, usize),
    goal: (usize, usize),
) -> Result<GridPath, PlanError> {
    let s = map.size();
    let n = s * s;
    let at = |cell: (usize, usize)| cell.1 * s + cell.0;
    if map.is_lethal(start.0, start.1) {
        return Err(PlanError::LethalStart);
    }
    if map.is_lethal(goal.0, goal.1) {
        return Err(PlanError::NoPath);
    }
    let heur = |idx: usize| -> f64 {
        let (col, row) = (idx % s, idx / s);
        let dx = col as f64 - goal.0 as f64;
        let dy = row as f64 - goal.1 as f64;
        dx.hypot(dy)
    };

    let start_idx = at(start);
    let goal_idx = at(goal);
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![u32::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    g[start_idx] = 0.0;
    heap.push(Open {
        f: heur(start_idx),
        h: heur(start_idx),
        seq,
        idx: start_idx as u32,
    });

    while let Some(node) = heap.pop() {
        let idx = node.idx as usize;
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        if idx == goal_idx {
            break;
        }
        let (col, row) = ((idx % s) as i64, (idx / s) as i64);
        let here = map.get(col as usize, row as usize);
        for &(dx, dy, len) in &STEPS {
            let (nc, nr) = (col + dx, row + dy);
            if nc < 0 || nc >= s as i64 || nr < 0 || nr >= s as i64 {
                continue;
            }
            let nidx = (nr as usize) * s + nc as usize;
            if closed[nidx] {
                continue;
            }
            let there = map.get(nc as usize, nr as usize);
            if there == LETHAL {
                continue;
            }
            let w = len + 0.5 * (here + there) * len;
            debug_assert!(heur(idx) <= w + heur(nidx) + 1e-9);
            let ng = g[idx] + w;
            if ng < g[nidx] {
                g[nidx] = ng;
                parent[nidx] = idx as u32;
                seq += 1;
                let h = heur(nidx);
                heap.push(Open {
                    f: ng + h,
                    h,
                    seq,
                    idx: nidx as u32,
                });
            }
        }
    }

    if !closed[goal_idx] {
        return Err(PlanError::NoPath);
    }
    let mut cells = Vec::new();
    let mut idx = goal_idx;
    loop {
        cells.push((idx % s, idx / s));
        if idx == start_idx {
            break;
        }
        idx = parent[idx] as usize;
    }
    cells.reverse();
    let world_points = cells
        .iter()
        .map(|&(c, r)| map.grid().cell_center(c, r))
        .collect();
    Ok(GridPath {
        cells,
        world_points,
        total_cost: g[goal_idx],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, LocalGrid};
    use crate::pose::Pose2D;

    fn map_from(costs: &[&[f64]], resolution: f64) -> CostMap {
        let size = costs.len();
        let spec = GridSpec::new(size, resolution).unwrap();
        let mut grid = LocalGrid::new(spec, (0, 0), 0.0);
        for (row, line) in costs.iter().enumerate() {
            for (col, &c) in line.iter().enumerate() {
                grid.set(col, row, c);
            }
        }
        CostMap::new(grid, Pose2D::default(), 0.0)
    }

    fn zero_map(size: usize, resolution: f64) -> CostMap {
        let spec = GridSpec::new(size, resolution).unwrap();
        CostMap::new(LocalGrid::new(spec, (0, 0), 0.0), Pose2D::default(), 0.0)
    }

    #[test]
    fn free_diagonal_costs_nine_root_two() {
        let map = zero_map(10, 0.2);
        let path = plan(&map, (0, 0), (9, 9)).unwrap();
        assert_eq!(path.cells.len(), 10);
        assert_eq!(path.cells[0], (0, 0));
        assert_eq!(*path.cells.last().unwrap(), (9, 9));
        assert!((path.total_cost - 9.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn start_equals_goal() {
        let map = zero_map(4, 0.2);
        let path = plan(&map, (2, 1), (2, 1)).unwrap();
        assert_eq!(path.cells, vec![(2, 1)]);
        assert_eq!(path.total_cost, 0.0);
    }

    #[test]
    fn wall_forces_a_detour_through_the_gap() {
        let l = LETHAL;
        let map = map_from(
            &[
                &[0.0, 0.0, l, 0.0, 0.0],
                &[0.0, 0.0, l, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, l, 0.0, 0.0],
                &[0.0, 0.0, l, 0.0, 0.0],
            ],
            0.2,
        );
        let path = plan(&map, (0, 0), (4, 0)).unwrap();
        assert!(path.cells.contains(&(2, 2)));
        assert!(path.cells.iter().all(|&(c, r)| !map.is_lethal(c, r)));
    }

    #[test]
    fn sealed_goal_has_no_path() {
        let l = LETHAL;
        let map = map_from(
            &[
                &[0.0, l, 0.0],
                &[l, l, 0.0],
                &[0.0, 0.0, 0.0],
            ],
            0.2,
        );
        assert_eq!(plan(&map, (0, 0), (2, 2)).unwrap_err(), PlanError::NoPath);
    }

    #[test]
    fn lethal_start_is_rejected() {
        let mut map = zero_map(4, 0.2);
        map.grid_mut().set(1, 1, LETHAL);
        assert_eq!(plan(&map, (1, 1), (3, 3)).unwrap_err(), PlanError::LethalStart);
    }

    #[test]
    fn far_east_goal_clamps_to_the_boundary_row() {
        let spec = GridSpec::new(512, 0.2).unwrap();
        let map = CostMap::new(LocalGrid::new(spec, (0, 0), 0.0), Pose2D::default(), 0.0);
        let cell = clamp_goal((100.0, 0.1), &map).unwrap();
        assert_eq!(cell, (511, 256));
    }

    #[test]
    fn lethal_clamp_falls_back_to_nearest_free_cell() {
        // power-of-two resolution keeps symmetric distances exactly equal
        let mut map = zero_map(16, 0.25);
        let goal_cell = (8usize, 8usize);
        let (gx, gy) = map.grid().cell_center(goal_cell.0, goal_cell.1);
        map.grid_mut().set(8, 8, LETHAL);
        map.grid_mut().set(7, 8, LETHAL);
        map.grid_mut().set(9, 8, 0.0);
        map.grid_mut().set(8, 7, 0.5);
        map.grid_mut().set(8, 9, 0.0);
        // equidistant ring: (8,7) loses on cost, then (9,8) beats (8,9) row-major
        assert_eq!(clamp_goal((gx, gy), &map).unwrap(), (9, 8));
    }

    #[test]
    fn full_map_is_an_error() {
        let spec = GridSpec::new(4, 0.2).unwrap();
        let grid = LocalGrid::new(spec, (0, 0), LETHAL);
        let map = CostMap::new(grid, Pose2D::default(), 0.0);
        assert_eq!(clamp_goal((0.1, 0.1), &map).unwrap_err(), PlanError::MapFull);
    }
}
