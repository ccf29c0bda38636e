//! Buffered-scan fusion into a vehicle-centered terrain bundle.

use thiserror::Error;

use crate::grid::{GridSpec, LayerRingBuffer, LocalGrid, WrapGrid};
use crate::pose::Pose2D;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("cannot fuse an empty buffer")]
    EmptyBuffer,
    #[error("kernel radius must be positive")]
    BadKernelRadius,
    #[error("kernel weights must be positive and finite")]
    BadKernelWeights,
    #[error("grid spec mismatch between layers")]
    SpecMismatch,
}

/// Recency weight of buffer slot `i` (0 = newest) for depth `n`.
pub fn recency_weight(slot: usize, depth: usize) -> f64 {
    (depth - slot) as f64 / depth as f64
}

/// Fusion output, still in wrapped map memory.
#[derive(Debug, Clone)]
pub struct FusedLayers {
    pub height: WrapGrid,
    pub certainty: WrapGrid,
    pub obstacle: WrapGrid,
}

/// Combines buffered scans per cell: heights are averaged with certainty
/// times a linearly decaying recency weight, certainty is the achieved
/// fraction of the total available weight, obstacles are OR-ed.
pub fn fuse_buffer(buffer: &LayerRingBuffer) -> Result<FusedLayers, FusionError> {
    if buffer.is_empty() {
        return Err(FusionError::EmptyBuffer);
    }
    let spec = buffer.spec();
    let depth = buffer.depth();
    let mut height = WrapGrid::new(spec, f64::NAN);
    let mut certainty = WrapGrid::new(spec, 0.0);
    let mut obstacle = WrapGrid::new(spec, 0.0);

    let weights: Vec<f64> = (0..buffer.len()).map(|i| recency_weight(i, depth)).collect();
    let weight_total: f64 = weights.iter().sum();

    for row in 0..spec.size {
        for col in 0..spec.size {
            let mut num = 0.0;
            let mut den = 0.0;
            let mut hit = false;
            for (slot, layers) in buffer.iter().enumerate() {
                let c = layers.certainty.get(col, row);
                if c > 0.0 {
                    let w = c * weights[slot];
                    num += layers.max_height.get(col, row) * w;
                    den += w;
                }
                if layers.obstacle.get(col, row) == 1.0 {
                    hit = true;
                }
            }
            if den > 0.0 {
                height.set(col, row, num / den);
                certainty.set(col, row, den / weight_total);
            }
            if hit {
                obstacle.set(col, row, 1.0);
            }
        }
    }
    Ok(FusedLayers {
        height,
        certainty,
        obstacle,
    })
}

/// Copies fused wrapped layers into vehicle-centered grids.
///
/// The output center cell is the robot's cell; anything outside the ROI
/// window comes back as NaN height with zero certainty and no obstacle.
pub fn recenter(
    fused: &FusedLayers,
    robot: Pose2D,
    half_extent: f64,
) -> (LocalGrid, LocalGrid, LocalGrid) {
    let spec = fused.height.spec();
    let center = spec.floor_cell(robot.x, robot.y);
    let half_cells = (half_extent / spec.resolution).floor() as i64;
    let mut height = LocalGrid::new(spec, center, f64::NAN);
    let mut certainty = LocalGrid::new(spec, center, 0.0);
    let mut obstacle = LocalGrid::new(spec, center, 0.0);
    for row in 0..spec.size {
        for col in 0..spec.size {
            let cell = height.world_cell(col, row);
            if (cell.0 - center.0).abs() > half_cells || (cell.1 - center.1).abs() > half_cells {
                continue;
            }
            height.set(col, row, fused.height.get_cell(cell));
            certainty.set(col, row, fused.certainty.get_cell(cell));
            obstacle.set(col, row, fused.obstacle.get_cell(cell));
        }
    }
    (height, certainty, obstacle)
}

/// Truncated convolution kernel with strictly positive weights.
#[derive(Debug, Clone)]
pub struct Kernel {
    radius: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(radius: usize, weights: Vec<f64>) -> Result<Self, FusionError> {
        if radius == 0 {
            return Err(FusionError::BadKernelRadius);
        }
        let side = 2 * radius + 1;
        if weights.len() != side * side
            || !weights.iter().all(|w| w.is_finite() && *w > 0.0)
        {
            return Err(FusionError::BadKernelWeights);
        }
        let total: f64 = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { radius, weights })
    }

    /// Gaussian truncated to a (2*radius+1)^2 window.
    pub fn gaussian(sigma: f64, radius: usize) -> Result<Self, FusionError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(FusionError::BadKernelWeights);
        }
        let side = 2 * radius as i64 + 1;
        let mut weights = Vec::with_capacity((side * side) as usize);
        for dy in -(radius as i64)..=radius as i64 {
            for dx in -(radius as i64)..=radius as i64 {
                let d2 = (dx * dx + dy * dy) as f64;
                weights.push((-d2 / (2.0 * sigma * sigma)).exp());
            }
        }
        Self::new(radius, weights)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn weight(&self, dx: i64, dy: i64) -> f64 {
        let side = 2 * self.radius + 1;
        let col = (dx + self.radius as i64) as usize;
        let row = (dy + self.radius as i64) as usize;
        self.weights[row * side + col]
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::gaussian(2.0, 3).unwrap()
    }
}

/// Fills unknown height cells by normalized convolution over known
/// neighbors; known cells pass through untouched. Certainty is smoothed
/// into the same holes with the plain kernel average so it decays toward
/// zero away from data. Cells with no support in the window stay unknown.
pub fn fill_holes(
    height: &LocalGrid,
    certainty: &LocalGrid,
    kernel: &Kernel,
) -> Result<(LocalGrid, LocalGrid), FusionError> {
    if height.spec() != certainty.spec() || height.center_cell() != certainty.center_cell() {
        return Err(FusionError::SpecMismatch);
    }
    let size = height.size() as i64;
    let r = kernel.radius() as i64;
    let mut height_out = height.clone();
    let mut certainty_out = certainty.clone();
    for row in 0..size {
        for col in 0..size {
            if certainty.get(col as usize, row as usize) > 0.0 {
                continue;
            }
            let mut num = 0.0;
            let mut den = 0.0;
            let mut cert_num = 0.0;
            for dy in -r..=r {
                let ny = row + dy;
                if ny < 0 || ny >= size {
                    continue;
                }
                for dx in -r..=r {
                    let nx = col + dx;
                    if nx < 0 || nx >= size {
                        continue;
                    }
                    let c = certainty.get(nx as usize, ny as usize);
                    if c <= 0.0 {
                        continue;
                    }
                    let kw = kernel.weight(dx, dy);
                    num += kw * c * height.get(nx as usize, ny as usize);
                    den += kw * c;
                    cert_num += kw * c;
                }
            }
            if den > 0.0 {
                height_out.set(col as usize, row as usize, num / den);
                certainty_out.set(col as usize, row as usize, cert_num);
            }
        }
    }
    Ok((height_out, certainty_out))
}

/// Slope magnitude in m/m from central differences (one-sided at borders).
/// Cells that are unknown, or whose stencil touches an unknown height,
/// yield an unknown gradient.
pub fn compute_gradient(height: &LocalGrid) -> LocalGrid {
    let size = height.size();
    let res = height.spec().resolution;
    let mut out = LocalGrid::new(height.spec(), height.center_cell(), f64::NAN);
    let diff = |lo: f64, hi: f64, span: f64| (hi - lo) / (span * res);
    for row in 0..size {
        for col in 0..size {
            if height.get(col, row).is_nan() {
                continue;
            }
            let gx = if col == 0 {
                diff(height.get(0, row), height.get(1.min(size - 1), row), 1.0)
            } else if col == size - 1 {
                diff(height.get(col - 1, row), height.get(col, row), 1.0)
            } else {
                diff(height.get(col - 1, row), height.get(col + 1, row), 2.0)
            };
            let gy = if row == 0 {
                diff(height.get(col, 0), height.get(col, 1.min(size - 1)), 1.0)
            } else if row == size - 1 {
                diff(height.get(col, row - 1), height.get(col, row), 1.0)
            } else {
                diff(height.get(col, row - 1), height.get(col, row + 1), 2.0)
            };
            out.set(col, row, gx.hypot(gy));
        }
    }
    out
}

/// Published map product: vehicle-centered terrain layers.
#[derive(Debug, Clone)]
pub struct MapBundle {
    pub height: LocalGrid,
    pub height_filled: LocalGrid,
    pub gradient_mag: LocalGrid,
    pub obstacle: LocalGrid,
    pub certainty: LocalGrid,
    pub origin: Pose2D,
    pub stamp: f64,
}

impl MapBundle {
    pub fn spec(&self) -> GridSpec {
        self.height.spec()
    }
}

/// Full fusion pipeline: fuse the buffer, recenter on the robot, fill holes,
/// differentiate.
pub fn publish_bundle(
    buffer: &LayerRingBuffer,
    robot: Pose2D,
    half_extent: f64,
    kernel: &Kernel,
    stamp: f64,
) -> Result<MapBundle, FusionError> {
    let fused = fuse_buffer(buffer)?;
    let (height, certainty, obstacle) = recenter(&fused, robot, half_extent);
    let (height_filled, certainty_filled) = fill_holes(&height, &certainty, kernel)?;
    let gradient_mag = compute_gradient(&height_filled);
    Ok(MapBundle {
        height,
        height_filled,
        gradient_mag,
        obstacle,
        certainty: certainty_filled,
        origin: robot,
        stamp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::scan::ScanLayerSet;

    fn small_spec() -> GridSpec {
        GridSpec::new(16, 0.5).unwrap()
    }

    fn scan_with(spec: GridSpec, cells: &[((usize, usize), f64)]) -> ScanLayerSet {
        let mut s = ScanLayerSet::empty(spec, 0.0);
        for &((c, r), h) in cells {
            s.max_height.set(c, r, h);
            s.min_height.set(c, r, h);
            s.certainty.set(c, r, 1.0);
        }
        s
    }

    #[test]
    fn two_scan_recency_average() {
        let spec = small_spec();
        let mut buf = LayerRingBuffer::new(spec, 2).unwrap();
        buf.push(scan_with(spec, &[((3, 3), 3.0)])).unwrap();
        buf.push(scan_with(spec, &[((3, 3), 1.0)])).unwrap();
        let fused = fuse_buffer(&buf).unwrap();
        // newest weight 1, older weight 1/2: (1*1 + 3*0.5) / 1.5
        assert!((fused.height.get(3, 3) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(fused.certainty.get(3, 3), 1.0);
    }

    #[test]
    fn unseen_cells_fuse_to_nan_with_zero_certainty() {
        let spec = small_spec();
        let mut buf = LayerRingBuffer::new(spec, 2).unwrap();
        buf.push(scan_with(spec, &[((3, 3), 1.0)])).unwrap();
        let fused = fuse_buffer(&buf).unwrap();
        assert!(fused.height.get(0, 0).is_nan());
        assert_eq!(fused.certainty.get(0, 0), 0.0);
        assert_eq!(fused.obstacle.get(0, 0), 0.0);
    }

    #[test]
    fn obstacle_is_or_of_buffered_scans() {
        let spec = small_spec();
        let mut buf = LayerRingBuffer::new(spec, 3).unwrap();
        let mut old = scan_with(spec, &[((2, 2), 0.4)]);
        old.obstacle.set(2, 2, 1.0);
        buf.push(old).unwrap();
        buf.push(scan_with(spec, &[((2, 2), 0.4)])).unwrap();
        let fused = fuse_buffer(&buf).unwrap();
        assert_eq!(fused.obstacle.get(2, 2), 1.0);
    }

    #[test]
    fn empty_buffer_is_an_error() {
        let buf = LayerRingBuffer::new(small_spec(), 2).unwrap();
        assert!(matches!(fuse_buffer(&buf), Err(FusionError::EmptyBuffer)));
    }

    #[test]
    fn recenter_puts_the_robot_in_the_middle() {
        let spec = small_spec();
        let mut buf = LayerRingBuffer::new(spec, 1).unwrap();
        let robot = Pose2D::new(10.3, -7.9, 0.0);
        let mut scan = ScanLayerSet::empty(spec, 0.0);
        scan.max_height.set_world(robot.x, robot.y, 2.5).unwrap();
        scan.min_height.set_world(robot.x, robot.y, 2.5).unwrap();
        scan.certainty.set_world(robot.x, robot.y, 1.0).unwrap();
        buf.push(scan).unwrap();
        let fused = fuse_buffer(&buf).unwrap();
        let (height, certainty, _) = recenter(&fused, robot, 3.0);
        let mid = spec.size / 2;
        assert_eq!(height.get(mid, mid), 2.5);
        assert_eq!(certainty.get(mid, mid), 1.0);
        assert!(height.get(0, 0).is_nan());
    }

    #[test]
    fn symmetric_hole_fills_to_the_midpoint() {
        let spec = GridSpec::new(8, 0.5).unwrap();
        let mut height = LocalGrid::new(spec, (4, 4), f64::NAN);
        let mut certainty = LocalGrid::new(spec, (4, 4), 0.0);
        for row in 0..8 {
            height.set(2, row, 0.0);
            height.set(4, row, 1.0);
            certainty.set(2, row, 1.0);
            certainty.set(4, row, 1.0);
        }
        let kernel = Kernel::gaussian(1.0, 1).unwrap();
        let (filled, cert) = fill_holes(&height, &certainty, &kernel).unwrap();
        assert!((filled.get(3, 4) - 0.5).abs() < 1e-12);
        assert_eq!(filled.get(2, 4), 0.0);
        assert_eq!(filled.get(4, 4), 1.0);
        assert!(cert.get(3, 4) > 0.0 && cert.get(3, 4) < 1.0);
        assert!(filled.get(7, 4).is_nan());
        assert_eq!(cert.get(7, 4), 0.0);
    }

    #[test]
    fn gradient_of_affine_field_is_constant() {
        let spec = GridSpec::new(12, 0.2).unwrap();
        let mut height = LocalGrid::new(spec, (6, 6), f64::NAN);
        for row in 0..12 {
            for col in 0..12 {
                let (x, y) = height.cell_center(col, row);
                height.set(col, row, 0.1 * x + 0.2 * y);
            }
        }
        let grad = compute_gradient(&height);
        let expected = 0.05f64.sqrt();
        for &g in grad.values() {
            assert!((g - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_near_unknown_cells_is_unknown() {
        let spec = GridSpec::new(8, 0.2).unwrap();
        let mut height = LocalGrid::new(spec, (4, 4), f64::NAN);
        for row in 0..8 {
            for col in 0..8 {
                height.set(col, row, 1.0);
            }
        }
        height.set(3, 3, f64::NAN);
        let grad = compute_gradient(&height);
        assert!(grad.get(3, 3).is_nan());
        assert!(grad.get(2, 3).is_nan());
        assert!(grad.get(4, 3).is_nan());
        assert!(grad.get(3, 2).is_nan());
        assert!(!grad.get(1, 1).is_nan());
    }
}
