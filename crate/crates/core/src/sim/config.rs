//! Scenario configuration: a versioned TOML schema covering the terrain,
//! the vehicle, the sensor, and every pipeline stage's parameters.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astar::PlanError;
use crate::costmap::{CostError, CostParams};
use crate::grid::{GridError, GridSpec, RoiTracker};
use crate::pose::Pose2D;
use crate::sampler::{SamplerError, SamplerParams};
use crate::scan::ScanError;
use crate::sim::sensor::SensorSpec;
use crate::sim::terrain::{BoxObstacle, Bump, Cylinder, GrassPatch, Ramp, TerrainModel};
use crate::sim::vehicle::VehicleModel;
use crate::fusion::FusionError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// True for configuration problems (bad file, bad schema, bad values),
    /// which map to a distinct process exit code.
    pub fn is_config(&self) -> bool {
        matches!(self, SimError::Config(_))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct RateConfig {
    pub map_hz: f64,
    pub astar_hz: f64,
    pub traj_hz: f64,
    pub vehicle_hz: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            map_hz: 10.0,
            astar_hz: 5.0,
            traj_hz: 30.0,
            vehicle_hz: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PoseConfig {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl PoseConfig {
    pub fn pose(&self) -> Pose2D {
        Pose2D::new(self.x, self.y, self.heading)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointConfig {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct RoiConfig {
    pub half_extent: f64,
    pub margin: f64,
}

impl Default for RoiConfig {
    fn default() -> Self {
        Self {
            half_extent: 40.0,
            margin: 0.45,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionConfig {
    pub buffer_depth: usize,
    pub kernel_sigma: f64,
    pub kernel_radius: usize,
    pub obstacle_threshold: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            buffer_depth: 5,
            kernel_sigma: 2.0,
            kernel_radius: 3,
            obstacle_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TerrainConfig {
    pub base: f64,
    pub ramps: Vec<Ramp>,
    pub bumps: Vec<Bump>,
    pub grass: Vec<GrassPatch>,
    pub cylinders: Vec<Cylinder>,
    pub boxes: Vec<BoxObstacle>,
}

impl TerrainConfig {
    pub fn build(&self, noise_seed: u64) -> TerrainModel {
        TerrainModel {
            base: self.base,
            ramps: self.ramps.clone(),
            bumps: self.bumps.clone(),
            grass: self.grass.clone(),
            cylinders: self.cylinders.clone(),
            boxes: self.boxes.clone(),
            noise_seed,
        }
    }
}

fn default_grid() -> GridSpec {
    GridSpec {
        size: 512,
        resolution: 0.2,
    }
}

fn default_duration() -> f64 {
    60.0
}

fn default_cruise() -> f64 {
    3.0
}

fn default_goal_tolerance() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_duration")]
    pub duration_limit: f64,
    /// Commanded cruise speed; becomes the sampler's segment speed, clipped
    /// to the vehicle's `v_max`.
    #[serde(default = "default_cruise")]
    pub cruise_speed: f64,
    #[serde(default)]
    pub start: PoseConfig,
    pub goal: PointConfig,
    #[serde(default = "default_goal_tolerance")]
    pub goal_tolerance: f64,
    #[serde(default)]
    pub rates: RateConfig,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub roi: RoiConfig,
    #[serde(default)]
    pub fusion: FusionConfig,
    #[serde(default)]
    pub cost: CostParams,
    #[serde(default)]
    pub sampler: SamplerParams,
    #[serde(default)]
    pub vehicle: VehicleModel,
    #[serde(default)]
    pub sensor: SensorSpec,
    #[serde(default)]
    pub terrain: TerrainConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Sampler parameters as actually run: cruise speed clipped to the
    /// vehicle limits and the lookahead tied to the vehicle's top speed.
    pub fn effective_sampler(&self) -> SamplerParams {
        let mut p = self.sampler;
        p.speed = self.cruise_speed.min(self.vehicle.v_max).max(0.0);
        p.omega_max = p.omega_max.min(self.vehicle.omega_max);
        p.v_max = self.vehicle.v_max;
        p
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(self.duration_limit.is_finite() && self.duration_limit > 0.0) {
            return fail("duration_limit must be positive".into());
        }
        if !(self.cruise_speed.is_finite() && self.cruise_speed >= 0.0) {
            return fail("cruise_speed must be non-negative".into());
        }
        if !(self.goal_tolerance.is_finite() && self.goal_tolerance > 0.0) {
            return fail("goal_tolerance must be positive".into());
        }
        if !(self.goal.x.is_finite() && self.goal.y.is_finite()) {
            return fail("goal must be finite".into());
        }
        let start = self.start.pose();
        if !(start.x.is_finite() && start.y.is_finite() && start.heading.is_finite()) {
            return fail("start pose must be finite".into());
        }
        if (self.goal.x - start.x).hypot(self.goal.y - start.y) <= self.goal_tolerance {
            return fail("goal lies within the goal tolerance of the start pose".into());
        }
        for (name, hz) in [
            ("rates.map_hz", self.rates.map_hz),
            ("rates.astar_hz", self.rates.astar_hz),
            ("rates.traj_hz", self.rates.traj_hz),
            ("rates.vehicle_hz", self.rates.vehicle_hz),
            ("sensor.rate_hz", self.sensor.rate_hz),
        ] {
            if !(hz.is_finite() && hz > 0.0) {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.sensor.max_range <= 0.0 || !self.sensor.max_range.is_finite() {
            return fail("sensor.max_range must be positive".into());
        }
        if self.sensor.noise_sigma < 0.0 || !self.sensor.noise_sigma.is_finite() {
            return fail("sensor.noise_sigma must be non-negative".into());
        }
        if self.fusion.buffer_depth == 0 {
            return fail("fusion.buffer_depth must be at least 1".into());
        }
        if !(self.fusion.obstacle_threshold.is_finite() && self.fusion.obstacle_threshold >= 0.0)
        {
            return fail("fusion.obstacle_threshold must be non-negative".into());
        }
        if !(self.fusion.kernel_sigma.is_finite() && self.fusion.kernel_sigma > 0.0) {
            return fail("fusion.kernel_sigma must be positive".into());
        }
        if self.fusion.kernel_radius == 0 {
            return fail("fusion.kernel_radius must be at least 1".into());
        }
        if !(self.vehicle.v_max.is_finite() && self.vehicle.v_max > 0.0) {
            return fail("vehicle.v_max must be positive".into());
        }
        if !(self.vehicle.omega_max.is_finite() && self.vehicle.omega_max >= 0.0) {
            return fail("vehicle.omega_max must be non-negative".into());
        }
        if !(self.vehicle.radius.is_finite() && self.vehicle.radius >= 0.0) {
            return fail("vehicle.radius must be non-negative".into());
        }
        self.cost
            .validate()
            .map_err(|e| SimError::Config(e.to_string()))?;
        self.effective_sampler()
            .validate()
            .map_err(|e| SimError::Config(e.to_string()))?;
        // grid + roi geometry must admit the tracker
        RoiTracker::new(self.grid, self.roi.half_extent, self.roi.margin, start)
            .map_err(|e| SimError::Config(e.to_string()))?;
        let terrain = self.terrain.build(self.seed);
        if terrain.collides(start.x, start.y, self.vehicle.radius) {
            return fail("start pose collides with an obstacle".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "schema_version = 1\n[goal]\nx = 20.0\ny = 0.0\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.grid.size, 512);
        assert_eq!(cfg.grid.resolution, 0.2);
        assert_eq!(cfg.rates.vehicle_hz, 50.0);
        assert_eq!(cfg.fusion.buffer_depth, 5);
        assert_eq!(cfg.sensor.rings, 32);
        assert_eq!(cfg.effective_sampler().speed, 3.0);
    }

    #[test]
    fn bad_toml_and_bad_values_are_config_errors() {
        let err = ScenarioConfig::from_toml_str("schema_version = ").unwrap_err();
        assert!(err.is_config());
        let err = ScenarioConfig::from_toml_str("schema_version = 2\n[goal]\nx=1.0\ny=0.0\n")
            .unwrap_err();
        assert!(err.is_config());
        let err = ScenarioConfig::from_toml_str(
            "schema_version = 1\nduration_limit = -3.0\n[goal]\nx=20.0\ny=0.0\n",
        )
        .unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn goal_on_top_of_start_is_rejected() {
        let err =
            ScenarioConfig::from_toml_str("schema_version = 1\n[goal]\nx = 0.5\ny = 0.0\n")
                .unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn cruise_speed_is_clipped_to_the_vehicle() {
        let cfg = ScenarioConfig::from_toml_str(
            "schema_version = 1\ncruise_speed = 9.0\n[goal]\nx = 20.0\ny = 0.0\n",
        )
        .unwrap();
        assert_eq!(cfg.effective_sampler().speed, 4.5);
    }

    #[test]
    fn terrain_tables_parse() {
        let cfg = ScenarioConfig::from_toml_str(
            r#"
schema_version = 1
[goal]
x = 30.0
y = 0.0
[terrain]
base = 0.5
[[terrain.cylinders]]
cx = 10.0
cy = 1.0
radius = 0.4
height = 2.0
[[terrain.grass]]
x0 = 4.0
x1 = 8.0
y0 = -2.0
y1 = 2.0
blade_height = 0.8
"#,
        )
        .unwrap();
        let t = cfg.terrain.build(cfg.seed);
        assert_eq!(t.cylinders.len(), 1);
        assert_eq!(t.grass[0].pitch, 0.1);
        assert!(!t.is_flat());
    }
}
