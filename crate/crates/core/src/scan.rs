//! Point cloud ingestion into per-scan grid layers.

use std::io::BufRead;

use thiserror::Error;

use crate::grid::{GridError, GridSpec, RoiTracker, WrapGrid};
use crate::pose::Pose2D;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("obstacle threshold must be non-negative, got {0}")]
    BadThreshold(f64),
    #[error("cloud line {line}: {reason}")]
    BadCloudLine { line: usize, reason: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Unordered 3D points in world meters.
#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
    pub stamp: f64,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>, stamp: f64) -> Self {
        Self { points, stamp }
    }

    /// Parses `x,y,z` CSV lines; blank lines and `#` comments are skipped,
    /// non-finite points are dropped.
    pub fn from_csv<R: BufRead>(reader: R, stamp: f64) -> Result<Self, ScanError> {
        let mut points = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let mut coords = [0.0f64; 3];
            let mut fields = text.split(',');
            for c in &mut coords {
                let field = fields.next().ok_or_else(|| ScanError::BadCloudLine {
                    line: i + 1,
                    reason: "expected 3 comma-separated values".into(),
                })?;
                *c = field
                    .trim()
                    .parse()
                    .map_err(|e| ScanError::BadCloudLine {
                        line: i + 1,
                        reason: format!("{e}"),
                    })?;
            }
            if fields.next().is_some() {
                return Err(ScanError::BadCloudLine {
                    line: i + 1,
                    reason: "expected 3 comma-separated values".into(),
                });
            }
            if coords.iter().all(|c| c.is_finite()) {
                points.push(coords);
            }
        }
        Ok(Self { points, stamp })
    }
}

/// Grid layers extracted from a single scan.
#[derive(Debug, Clone)]
pub struct ScanLayerSet {
    pub max_height: WrapGrid,
    pub min_height: WrapGrid,
    pub certainty: WrapGrid,
    pub obstacle: WrapGrid,
    pub stamp: f64,
}

impl ScanLayerSet {
    pub fn empty(spec: GridSpec, stamp: f64) -> Self {
        Self {
            max_height: WrapGrid::new(spec, f64::NEG_INFINITY),
            min_height: WrapGrid::new(spec, f64::INFINITY),
            certainty: WrapGrid::new(spec, 0.0),
            obstacle: WrapGrid::new(spec, 0.0),
            stamp,
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.max_height.spec()
    }

    pub fn grids_mut(&mut self) -> impl Iterator<Item = &mut WrapGrid> {
        [
            &mut self.max_height,
            &mut self.min_height,
            &mut self.certainty,
            &mut self.obstacle,
        ]
        .into_iter()
    }
}

/// Rasterizes a cloud into fresh max/min height and certainty layers.
///
/// Only points strictly inside the ROI radius (planar distance to the robot)
/// are kept; each one raises its cell's max height, lowers the min height and
/// marks the cell seen.
pub fn ingest_scan(
    cloud: &PointCloud,
    robot: Pose2D,
    spec: GridSpec,
    roi: &RoiTracker,
) -> Result<ScanLayerSet, ScanError> {
    let mut layers = ScanLayerSet::empty(spec, cloud.stamp);
    let radius = roi.half_extent();
    for p in &cloud.points {
        let dist = (p[0] - robot.x).hypot(p[1] - robot.y);
        if dist >= radius {
            continue;
        }
        let (c, r) = spec.world_to_cell(p[0], p[1])?;
        if p[2] > layers.max_height.get(c, r) {
            layers.max_height.set(c, r, p[2]);
        }
        if p[2] < layers.min_height.get(c, r) {
            layers.min_height.set(c, r, p[2]);
        }
        layers.certainty.set(c, r, 1.0);
    }
    Ok(layers)
}

/// Marks cells whose observed height spread strictly exceeds `threshold`.
pub fn mark_obstacles(mut layers: ScanLayerSet, threshold: f64) -> Result<ScanLayerSet, ScanError> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(ScanError::BadThreshold(threshold));
    }
    let size = layers.spec().size;
    for row in 0..size {
        for col in 0..size {
            if layers.certainty.get(col, row) != 1.0 {
                continue;
            }
            let spread = layers.max_height.get(col, row) - layers.min_height.get(col, row);
            if spread > threshold {
                layers.obstacle.set(col, row, 1.0);
            }
        }
    }
    Ok(layers)
}
