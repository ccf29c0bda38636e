//! Fixed-size wrappable grid storage.
//!
//! The map never moves in memory: world coordinates are folded into the
//! grid with a euclidean modulo, so the vehicle travels across a stationary
//! allocation while stale cells behind it are cleared strip by strip.

use std::collections::VecDeque;

use thiserror::Error;

use crate::pose::Pose2D;
use crate::scan::ScanLayerSet;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid size must be positive")]
    BadSize,
    #[error("grid resolution must be positive and finite, got {0}")]
    BadResolution(f64),
    #[error("point ({0}, {1}) is not finite")]
    NonFinitePoint(f64, f64),
    #[error("ring buffer depth must be positive")]
    BadDepth,
    #[error("grid spec does not match the buffer spec")]
    SpecMismatch,
    #[error("ROI square plus margin does not fit the map extent")]
    RoiTooLarge,
    #[error("pose moved {moved:.3} m, beyond the {margin:.3} m ROI margin")]
    RoiOverrun { moved: f64, margin: f64 },
}

/// Grid geometry: cell count per side and cell edge length in meters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub size: usize,
    pub resolution: f64,
}

impl GridSpec {
    pub fn new(size: usize, resolution: f64) -> Result<Self, GridError> {
        if size == 0 {
            return Err(GridError::BadSize);
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GridError::BadResolution(resolution));
        }
        Ok(Self { size, resolution })
    }

    /// Map extent per side in meters.
    pub fn extent(&self) -> f64 {
        self.size as f64 * self.resolution
    }

    /// Unbounded world cell containing a point (floor division).
    pub fn floor_cell(&self, x: f64, y: f64) -> (i64, i64) {
        (
            (x / self.resolution).floor() as i64,
            (y / self.resolution).floor() as i64,
        )
    }

    /// Folds an unbounded cell index into grid memory.
    pub fn wrap_index(&self, c: i64) -> usize {
        c.rem_euclid(self.size as i64) as usize
    }

    /// Memory cell for a world point: floor-scaled coordinate, euclidean modulo.
    pub fn world_to_cell(&self, x: f64, y: f64) -> Result<(usize, usize), GridError> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(GridError::NonFinitePoint(x, y));
        }
        let (cx, cy) = self.floor_cell(x, y);
        Ok((self.wrap_index(cx), self.wrap_index(cy)))
    }

    /// World coordinate of an unbounded cell's center.
    pub fn cell_center(&self, c: i64) -> f64 {
        (c as f64 + 0.5) * self.resolution
    }
}

/// One float layer of wrappable map memory.
#[derive(Debug, Clone)]
pub struct WrapGrid {
    spec: GridSpec,
    fill: f64,
    cells: Vec<f64>,
}

impl WrapGrid {
    pub fn new(spec: GridSpec, fill: f64) -> Self {
        Self {
            spec,
            fill,
            cells: vec![fill; spec.size * spec.size],
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn fill_value(&self) -> f64 {
        self.fill
    }

    #[inline]
    fn idx(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.spec.size && row < self.spec.size);
        row * self.spec.size + col
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.cells[self.idx(col, row)]
    }

    pub fn set(&mut self, col: usize, row: usize, value: f64) {
        let i = self.idx(col, row);
        self.cells[i] = value;
    }

    /// Value at the memory cell a world point folds into.
    pub fn get_world(&self, x: f64, y: f64) -> Result<f64, GridError> {
        let (c, r) = self.spec.world_to_cell(x, y)?;
        Ok(self.get(c, r))
    }

    pub fn set_world(&mut self, x: f64, y: f64, value: f64) -> Result<(), GridError> {
        let (c, r) = self.spec.world_to_cell(x, y)?;
        self.set(c, r, value);
        Ok(())
    }

    /// Value at an unbounded world cell.
    pub fn get_cell(&self, cell: (i64, i64)) -> f64 {
        self.get(self.spec.wrap_index(cell.0), self.spec.wrap_index(cell.1))
    }

    pub fn set_cell(&mut self, cell: (i64, i64), value: f64) {
        let (c, r) = (self.spec.wrap_index(cell.0), self.spec.wrap_index(cell.1));
        self.set(c, r, value);
    }

    pub fn clear_col(&mut self, col: usize) {
        for row in 0..self.spec.size {
            let i = self.idx(col, row);
            self.cells[i] = self.fill;
        }
    }

    pub fn clear_row(&mut self, row: usize) {
        let s = self.spec.size;
        self.cells[row * s..(row + 1) * s].fill(self.fill);
    }

    pub fn reset(&mut self) {
        self.cells.fill(self.fill);
    }

    pub fn values(&self) -> &[f64] {
        &self.cells
    }
}

/// Region-of-interest bookkeeping for wrappable grids.
///
/// Valid data lives in the square window of `half_extent` meters around the
/// last pose. Advancing the pose clears exactly the rows/columns that fell
/// off the trailing edge, so an update costs O(moved strip), not O(map).
#[derive(Debug, Clone)]
pub struct RoiTracker {
    spec: GridSpec,
    half_extent: f64,
    margin: f64,
    half_cells: i64,
    last_pose: Pose2D,
}

impl RoiTracker {
    pub fn new(
        spec: GridSpec,
        half_extent: f64,
        margin: f64,
        start: Pose2D,
    ) -> Result<Self, GridError> {
        if !(half_extent.is_finite() && half_extent > 0.0)
            || !(margin.is_finite() && margin > 0.0)
        {
            return Err(GridError::RoiTooLarge);
        }
        if 2.0 * half_extent + margin > spec.extent() {
            return Err(GridError::RoiTooLarge);
        }
        let half_cells = (half_extent / spec.resolution).floor() as i64;
        let window = 2 * half_cells + 1;
        let max_shift = (margin / spec.resolution).ceil() as i64 + 1;
        if window + max_shift > spec.size as i64 {
            return Err(GridError::RoiTooLarge);
        }
        Ok(Self {
            spec,
            half_extent,
            margin,
            half_cells,
            last_pose: start,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn last_pose(&self) -> Pose2D {
        self.last_pose
    }

    /// ROI half side length in whole cells.
    pub fn half_cells(&self) -> i64 {
        self.half_cells
    }

    /// Anchor cell of the current window.
    pub fn anchor(&self) -> (i64, i64) {
        self.spec.floor_cell(self.last_pose.x, self.last_pose.y)
    }

    /// Whether an unbounded world cell is inside the current window.
    pub fn contains_cell(&self, cell: (i64, i64)) -> bool {
        let (ax, ay) = self.anchor();
        (cell.0 - ax).abs() <= self.half_cells && (cell.1 - ay).abs() <= self.half_cells
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.contains_cell(self.spec.floor_cell(x, y))
    }

    /// Moves the window to `new_pose`, clearing newly stale strips in every
    /// supplied grid. Returns the number of memory cells cleared per grid.
    pub fn advance<'a>(
        &mut self,
        new_pose: Pose2D,
        grids: impl IntoIterator<Item = &'a mut WrapGrid>,
    ) -> Result<usize, GridError> {
        let moved = self.last_pose.distance_to(new_pose);
        if moved > self.margin + 1e-9 {
            return Err(GridError::RoiOverrun {
                moved,
                margin: self.margin,
            });
        }
        let (ox, oy) = self.anchor();
        self.last_pose = new_pose;
        let (nx, ny) = self.anchor();

        let cols = trailing_strips(self.spec.size, self.half_cells, ox, nx - ox);
        let rows = trailing_strips(self.spec.size, self.half_cells, oy, ny - oy);
        if cols.is_empty() && rows.is_empty() {
            return Ok(0);
        }
        for grid in grids {
            if grid.spec != self.spec {
                return Err(GridError::SpecMismatch);
            }
            for &c in &cols {
                grid.clear_col(c);
            }
            for &r in &rows {
                grid.clear_row(r);
            }
        }
        let s = self.spec.size;
        Ok(cols.len() * s + rows.len() * s - cols.len() * rows.len())
    }
}

/// Memory indices of window strips that a shift of `delta` cells leaves behind.
fn trailing_strips(size: usize, half_cells: i64, old_anchor: i64, delta: i64) -> Vec<usize> {
    let s = size as i64;
    let n = delta.unsigned_abs().min(size as u64) as i64;
    let mut out = Vec::with_capacity(n as usize);
    for k in 0..n {
        let c = if delta > 0 {
            old_anchor - half_cells + k
        } else {
            old_anchor + half_cells - k
        };
        let m = c.rem_euclid(s) as usize;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Fixed-depth buffer of scan layer sets, newest first.
#[derive(Debug)]
pub struct LayerRingBuffer {
    spec: GridSpec,
    depth: usize,
    slots: VecDeque<ScanLayerSet>,
}

impl LayerRingBuffer {
    pub fn new(spec: GridSpec, depth: usize) -> Result<Self, GridError> {
        if depth == 0 {
            return Err(GridError::BadDepth);
        }
        Ok(Self {
            spec,
            depth,
            slots: VecDeque::with_capacity(depth),
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Inserts the newest scan, evicting the oldest once full.
    pub fn push(&mut self, layers: ScanLayerSet) -> Result<(), GridError> {
        if layers.spec() != self.spec {
            return Err(GridError::SpecMismatch);
        }
        if self.slots.len() == self.depth {
            self.slots.pop_back();
        }
        self.slots.push_front(layers);
        Ok(())
    }

    /// Slots ordered newest (slot 0) to oldest.
    pub fn iter(&self) -> impl Iterator<Item = &ScanLayerSet> {
        self.slots.iter()
    }

    /// Every layer grid of every buffered scan, for ROI maintenance.
    pub fn grids_mut(&mut self) -> impl Iterator<Item = &mut WrapGrid> {
        self.slots.iter_mut().flat_map(|s| s.grids_mut())
    }
}

/// Dense vehicle-centered grid: a one-to-one unwrapped window of world cells.
#[derive(Debug, Clone)]
pub struct LocalGrid {
    spec: GridSpec,
    center_cell: (i64, i64),
    cells: Vec<f64>,
}

impl LocalGrid {
    pub fn new(spec: GridSpec, center_cell: (i64, i64), fill: f64) -> Self {
        Self {
            spec,
            center_cell,
            cells: vec![fill; spec.size * spec.size],
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn size(&self) -> usize {
        self.spec.size
    }

    /// World cell mapped to the grid's center index (size/2, size/2).
    pub fn center_cell(&self) -> (i64, i64) {
        self.center_cell
    }

    #[inline]
    fn idx(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.spec.size && row < self.spec.size);
        row * self.spec.size + col
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.cells[self.idx(col, row)]
    }

    pub fn set(&mut self, col: usize, row: usize, value: f64) {
        let i = self.idx(col, row);
        self.cells[i] = value;
    }

    /// Unbounded world cell behind a grid index.
    pub fn world_cell(&self, col: usize, row: usize) -> (i64, i64) {
        let h = (self.spec.size / 2) as i64;
        (
            self.center_cell.0 + col as i64 - h,
            self.center_cell.1 + row as i64 - h,
        )
    }

    pub fn index_of_cell(&self, cell: (i64, i64)) -> Option<(usize, usize)> {
        let h = (self.spec.size / 2) as i64;
        let col = cell.0 - self.center_cell.0 + h;
        let row = cell.1 - self.center_cell.1 + h;
        let s = self.spec.size as i64;
        if col >= 0 && col < s && row >= 0 && row < s {
            Some((col as usize, row as usize))
        } else {
            None
        }
    }

    pub fn index_of_point(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !(x.is_finite() && y.is_finite()) {
            return None;
        }
        self.index_of_cell(self.spec.floor_cell(x, y))
    }

    pub fn value_at_point(&self, x: f64, y: f64) -> Option<f64> {
        self.index_of_point(x, y).map(|(c, r)| self.get(c, r))
    }

    pub fn value_at_cell(&self, cell: (i64, i64)) -> Option<f64> {
        self.index_of_cell(cell).map(|(c, r)| self.get(c, r))
    }

    /// World coordinates of a grid index's cell center.
    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        let (wx, wy) = self.world_cell(col, row);
        (self.spec.cell_center(wx), self.spec.cell_center(wy))
    }

    pub fn values(&self) -> &[f64] {
        &self.cells
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec::new(512, 0.2).unwrap()
    }

    #[test]
    fn negative_coordinates_fold_from_the_far_edge() {
        assert_eq!(spec().world_to_cell(-0.2, 0.0).unwrap(), (511, 0));
        assert_eq!(spec().world_to_cell(1.0, 0.4).unwrap(), (5, 2));
        assert_eq!(spec().world_to_cell(0.0, 0.0).unwrap(), (0, 0));
    }

    #[test]
    fn world_to_cell_is_periodic() {
        // probe points sit mid-cell: on exact cell boundaries the shifted
        // coordinate can round across the boundary and is allowed to
        let s = spec();
        for &x in &[-37.31, -0.11, 0.05, 51.3, 1e4 + 0.1] {
            let base = s.world_to_cell(x, -x).unwrap();
            for k in [-3i32, -1, 1, 2] {
                let shifted = s.world_to_cell(x + k as f64 * s.extent(), -x).unwrap();
                assert_eq!(base.0, shifted.0, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn non_finite_points_rejected() {
        assert!(matches!(
            spec().world_to_cell(f64::NAN, 0.0),
            Err(GridError::NonFinitePoint(..))
        ));
        assert!(spec().world_to_cell(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn one_cell_move_clears_one_column_strip() {
        let s = GridSpec::new(32, 0.5).unwrap();
        let mut grid = WrapGrid::new(s, f64::NAN);
        let mut roi = RoiTracker::new(s, 5.0, 0.5, Pose2D::default()).unwrap();
        let cleared = roi
            .advance(Pose2D::new(0.5, 0.0, 0.0), std::iter::once(&mut grid))
            .unwrap();
        assert_eq!(cleared, 32);
    }

    #[test]
    fn advance_is_idempotent_for_a_fixed_pose() {
        let s = GridSpec::new(32, 0.5).unwrap();
        let mut grid = WrapGrid::new(s, 0.0);
        let pose = Pose2D::new(3.7, -1.2, 0.4);
        let mut roi = RoiTracker::new(s, 5.0, 0.5, Pose2D::new(3.4, -1.2, 0.0)).unwrap();
        roi.advance(pose, std::iter::once(&mut grid)).unwrap();
        let snapshot = grid.values().to_vec();
        let cleared = roi.advance(pose, std::iter::once(&mut grid)).unwrap();
        assert_eq!(cleared, 0);
        assert_eq!(grid.values(), &snapshot[..]);
    }

    #[test]
    fn overrun_is_an_error() {
        let s = GridSpec::new(64, 0.2).unwrap();
        let mut roi = RoiTracker::new(s, 5.0, 0.4, Pose2D::default()).unwrap();
        let err = roi
            .advance(Pose2D::new(0.6, 0.0, 0.0), std::iter::empty())
            .unwrap_err();
        assert!(matches!(err, GridError::RoiOverrun { .. }));
    }

    #[test]
    fn roi_must_fit_the_map() {
        let s = GridSpec::new(64, 0.2).unwrap();
        assert_eq!(
            RoiTracker::new(s, 6.35, 0.4, Pose2D::default()).unwrap_err(),
            GridError::RoiTooLarge
        );
    }

    #[test]
    fn local_grid_round_trips_world_cells() {
        let s = GridSpec::new(16, 0.25).unwrap();
        let g = LocalGrid::new(s, (100, -40), f64::NAN);
        assert_eq!(g.world_cell(8, 8), (100, -40));
        assert_eq!(g.index_of_cell((100, -40)), Some((8, 8)));
        assert_eq!(g.index_of_cell((100 + 7, -40 - 8)), Some((15, 0)));
        assert_eq!(g.index_of_cell((100 + 8, -40)), None);
        let (cx, cy) = g.cell_center(8, 8);
        assert_eq!(g.index_of_point(cx, cy), Some((8, 8)));
    }
}
