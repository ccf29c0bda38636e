//! Analytic ground-truth terrain: height primitives plus solid obstacles.

use serde::{Deserialize, Serialize};

/// Linear rise from 0 at the x0 edge to `height` at the x1 edge, inside the
/// rectangle only.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Ramp {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub height: f64,
}

impl Ramp {
    fn height_at(&self, x: f64, y: f64) -> f64 {
        if x < self.x0 || x > self.x1 || y < self.y0 || y > self.y1 {
            return 0.0;
        }
        let span = self.x1 - self.x0;
        if span <= 0.0 {
            return 0.0;
        }
        self.height * (x - self.x0) / span
    }
}

/// Smooth compact bump (raised cosine) of the given apex height and radius.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bump {
    pub cx: f64,
    pub cy: f64,
    pub height: f64,
    pub radius: f64,
}

impl Bump {
    fn height_at(&self, x: f64, y: f64) -> f64 {
        let d = (x - self.cx).hypot(y - self.cy);
        if d >= self.radius || self.radius <= 0.0 {
            return 0.0;
        }
        let c = (std::f64::consts::FRAC_PI_2 * d / self.radius).cos();
        self.height * c * c
    }
}

/// Rectangular patch of tall grass: a ragged canopy of random blade heights
/// on a small noise lattice. Drivable, but scans see a large height spread.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GrassPatch {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub blade_height: f64,
    /// Noise lattice pitch in meters.
    #[serde(default = "default_grass_pitch")]
    pub pitch: f64,
}

fn default_grass_pitch() -> f64 {
    0.1
}

impl GrassPatch {
    fn canopy_at(&self, x: f64, y: f64, seed: u64) -> f64 {
        if x < self.x0 || x > self.x1 || y < self.y0 || y > self.y1 {
            return 0.0;
        }
        let ix = (x / self.pitch).floor() as i64;
        let iy = (y / self.pitch).floor() as i64;
        self.blade_height * hash01(ix, iy, seed)
    }
}

/// Vertical cylinder obstacle standing on the ground.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Cylinder {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub height: f64,
}

/// Axis-aligned box obstacle standing on the ground.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoxObstacle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub height: f64,
}

/// Deterministic per-cell noise in [0, 1).
fn hash01(ix: i64, iy: i64, seed: u64) -> f64 {
    let mut h = seed
        ^ (ix as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (iy as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 30;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64
}

#[derive(Debug, Clone, Default)]
pub struct TerrainModel {
    pub base: f64,
    pub ramps: Vec<Ramp>,
    pub bumps: Vec<Bump>,
    pub grass: Vec<GrassPatch>,
    pub cylinders: Vec<Cylinder>,
    pub boxes: Vec<BoxObstacle>,
    pub noise_seed: u64,
}

impl TerrainModel {
    pub fn flat(base: f64) -> Self {
        Self {
            base,
            ..Default::default()
        }
    }

    /// Load-bearing surface height (what the vehicle stands on).
    pub fn ground(&self, x: f64, y: f64) -> f64 {
        let mut h = self.base;
        for r in &self.ramps {
            h += r.height_at(x, y);
        }
        for b in &self.bumps {
            h += b.height_at(x, y);
        }
        h
    }

    /// Lidar-visible surface height: ground plus any grass canopy.
    pub fn surface(&self, x: f64, y: f64) -> f64 {
        let mut h = self.ground(x, y);
        let mut canopy = 0.0f64;
        for g in &self.grass {
            canopy = canopy.max(g.canopy_at(x, y, self.noise_seed));
        }
        h += canopy;
        h
    }

    /// True when the surface is a plain horizontal plane, so rays can be
    /// intersected analytically instead of marched.
    pub fn is_flat(&self) -> bool {
        self.ramps.is_empty() && self.bumps.is_empty() && self.grass.is_empty()
    }

    /// Ground-track rectangles of every height feature. A ray whose 2D
    /// track misses all of them sees a plain `base` plane.
    pub fn feature_rects(&self) -> Vec<[f64; 4]> {
        let mut rects = Vec::new();
        for r in &self.ramps {
            rects.push([r.x0, r.x1, r.y0, r.y1]);
        }
        for b in &self.bumps {
            rects.push([
                b.cx - b.radius,
                b.cx + b.radius,
                b.cy - b.radius,
                b.cy + b.radius,
            ]);
        }
        for g in &self.grass {
            rects.push([g.x0, g.x1, g.y0, g.y1]);
        }
        rects
    }

    /// Upper bound on the surface height anywhere.
    pub fn max_surface(&self) -> f64 {
        let mut h = self.base;
        for r in &self.ramps {
            h += r.height.max(0.0);
        }
        for b in &self.bumps {
            h += b.height.max(0.0);
        }
        for g in &self.grass {
            h += g.blade_height.max(0.0);
        }
        h
    }

    /// Distance from a point to the nearest obstacle surface; infinite when
    /// the scene has no obstacles.
    pub fn clearance(&self, x: f64, y: f64) -> f64 {
        let mut d = f64::INFINITY;
        for c in &self.cylinders {
            d = d.min((x - c.cx).hypot(y - c.cy) - c.radius);
        }
        for b in &self.boxes {
            let nx = x.clamp(b.x0, b.x1);
            let ny = y.clamp(b.y0, b.y1);
            d = d.min((x - nx).hypot(y - ny));
        }
        d
    }

    /// Whether a vehicle disc at (x, y) intersects any solid obstacle.
    pub fn collides(&self, x: f64, y: f64, radius: f64) -> bool {
        for c in &self.cylinders {
            if (x - c.cx).hypot(y - c.cy) <= c.radius + radius {
                return true;
            }
        }
        for b in &self.boxes {
            let nx = x.clamp(b.x0, b.x1);
            let ny = y.clamp(b.y0, b.y1);
            if (x - nx).hypot(y - ny) <= radius {
                return true;
            }
        }
        false
    }
}
