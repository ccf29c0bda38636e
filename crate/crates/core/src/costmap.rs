//! Traversal cost from terrain slope, observation confidence and obstacles.

use thiserror::Error;

use crate::fusion::MapBundle;
use crate::grid::LocalGrid;
use crate::pose::Pose2D;

/// Impassable cell marker, strictly above every finite cost.
pub const LETHAL: f64 = f64::INFINITY;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("cost parameter {0} must be non-negative and finite")]
    BadParam(&'static str),
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CostParams {
    /// Cost per unit slope magnitude.
    pub gradient_scale: f64,
    /// Cost of a fully unobserved cell.
    pub unknown_cost: f64,
    /// Slope at or above which a cell is impassable.
    pub lethal_gradient: f64,
    /// Obstacle inflation radius in meters.
    pub robot_radius: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            gradient_scale: 10.0,
            unknown_cost: 1.0,
            lethal_gradient: 1.0,
            robot_radius: 0.7,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), CostError> {
        let checks = [
            ("gradient_scale", self.gradient_scale),
            ("unknown_cost", self.unknown_cost),
            ("lethal_gradient", self.lethal_gradient),
            ("robot_radius", self.robot_radius),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CostError::BadParam(name));
            }
        }
        Ok(())
    }
}

/// Vehicle-centered traversal cost grid.
#[derive(Debug, Clone)]
pub struct CostMap {
    cost: LocalGrid,
    origin: Pose2D,
    stamp: f64,
}

impl CostMap {
    pub fn new(cost: LocalGrid, origin: Pose2D, stamp: f64) -> Self {
        Self {
            cost,
            origin,
            stamp,
        }
    }

    pub fn grid(&self) -> &LocalGrid {
        &self.cost
    }

    pub fn grid_mut(&mut self) -> &mut LocalGrid {
        &mut self.cost
    }

    pub fn origin(&self) -> Pose2D {
        self.origin
    }

    pub fn stamp(&self) -> f64 {
        self.stamp
    }

    pub fn size(&self) -> usize {
        self.cost.size()
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.cost.get(col, row)
    }

    pub fn is_lethal(&self, col: usize, row: usize) -> bool {
        self.cost.get(col, row) == LETHAL
    }
}

/// Per-cell cost: lethal on obstacles and steep slopes, otherwise scaled
/// slope plus an uncertainty penalty. Unknown slope contributes nothing;
/// unknown cells stay traversable at the unknown-cost penalty.
pub fn build_costmap(bundle: &MapBundle, params: &CostParams) -> Result<CostMap, CostError> {
    params.validate()?;
    let size = bundle.spec().size;
    let mut cost = LocalGrid::new(bundle.spec(), bundle.height.center_cell(), 0.0);
    for row in 0..size {
        for col in 0..size {
            let g = bundle.gradient_mag.get(col, row);
            let c = if bundle.obstacle.get(col, row) == 1.0 {
                LETHAL
            } else if g.is_finite() && g >= params.lethal_gradient {
                LETHAL
            } else {
                let slope = if g.is_finite() { g } else { 0.0 };
                let certainty = bundle.certainty.get(col, row);
                params.gradient_scale * slope + params.unknown_cost * (1.0 - certainty)
            };
            cost.set(col, row, c);
        }
    }
    Ok(CostMap::new(cost, bundle.origin, bundle.stamp))
}

/// Disc offsets of euclidean cell radius `r`.
fn disc_offsets(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Dilates lethal cells by a disc of ceil(radius/resolution) cells and
/// replaces every finite cost with the maximum over the same disc.
pub fn inflate(map: &CostMap, radius: f64) -> Result<CostMap, CostError> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(CostError::BadParam("robot_radius"));
    }
    let res = map.grid().spec().resolution;
    let r = (radius / res).ceil() as i64;
    if r == 0 {
        return Ok(map.clone());
    }
    let offsets = disc_offsets(r);
    let size = map.size() as i64;
    let mut out = LocalGrid::new(map.grid().spec(), map.grid().center_cell(), 0.0);
    for row in 0..size {
        for col in 0..size {
            let mut best = f64::NEG_INFINITY;
            for &(dx, dy) in &offsets {
                let (nx, ny) = (col + dx, row + dy);
                if nx < 0 || nx >= size || ny < 0 || ny >= size {
                    continue;
                }
                let v = map.get(nx as usize, ny as usize);
                if v > best {
                    best = v;
                    if best == LETHAL {
                        break;
                    }
                }
            }
            out.set(col as usize, row as usize, best);
        }
    }
    Ok(CostMap::new(out, map.origin, map.stamp))
}
