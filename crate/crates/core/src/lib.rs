//! Robot-centric terrain mapping and local planning for off-road driving.
//!
//! Lidar scans rasterize into height/certainty layers on a wrappable grid
//! that follows the vehicle without ever moving in memory. Buffered scans
//! fuse into a vehicle-centered terrain bundle (hole-filled heights, slope,
//! obstacles), which feeds a costmap, an 8-connected A* planner, and a
//! control-space trajectory sampler that tracks the planned path. A
//! deterministic simulation harness closes the loop for testing and
//! benchmarking.

pub mod astar;
pub mod costmap;
pub mod dump;
pub mod fusion;
pub mod grid;
pub mod pose;
pub mod sampler;
pub mod scan;
pub mod sim;

pub use astar::{clamp_goal, plan, GridPath, PlanError};
pub use costmap::{build_costmap, inflate, CostError, CostMap, CostParams, LETHAL};
pub use dump::{parse_grid_dump, write_grid_dump, write_local_grid, DumpError, GridDump};
pub use fusion::{
    compute_gradient, fill_holes, fuse_buffer, publish_bundle, recency_weight, recenter,
    FusedLayers, FusionError, Kernel, MapBundle,
};
pub use grid::{GridError, GridSpec, LayerRingBuffer, LocalGrid, RoiTracker, WrapGrid};
pub use pose::{advance_arc, wrap_angle, Pose2D};
pub use sampler::{
    lookahead_target, pure_pursuit_rollout, rollout, sample_profiles, score, select_best,
    ControlProfile, CostWeights, LookaheadTarget, SamplerError, SamplerParams, Trajectory,
    TurnDirection,
};
pub use scan::{ingest_scan, mark_obstacles, PointCloud, ScanError, ScanLayerSet};
pub use sim::{
    raycast_scan, run_scenario, run_scenario_full, run_stage_benches, BenchReport, Outcome,
    ProfileCursor, RateConfig, RunLog, RunProducts, ScenarioConfig, SensorSpec, SimError,
    StageBench, TerrainModel, VehicleModel,
};
