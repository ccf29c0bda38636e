//! Deterministic closed-loop simulation harness.

pub mod bench;
pub mod config;
pub mod runlog;
pub mod runner;
pub mod sensor;
pub mod terrain;
pub mod vehicle;

pub use bench::{run_stage_benches, BenchReport, StageBench};
pub use config::{RateConfig, ScenarioConfig, SimError};
pub use runlog::{Outcome, PathRecord, PoseRecord, RunLog, SelectionRecord, TimingRecord};
pub use runner::{run_scenario, run_scenario_full, RunProducts};
pub use sensor::{raycast_scan, SensorSpec};
pub use terrain::{BoxObstacle, Bump, Cylinder, GrassPatch, Ramp, TerrainModel};
pub use vehicle::{ProfileCursor, VehicleModel};
