//! Simulated spinning multi-ring range sensor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pose::Pose2D;
use crate::scan::PointCloud;
use crate::sim::terrain::TerrainModel;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorSpec {
    pub rings: usize,
    pub azimuths: usize,
    pub elevation_min_deg: f64,
    pub elevation_max_deg: f64,
    pub max_range: f64,
    /// Sensor origin height above the ground under the vehicle.
    pub mount_height: f64,
    pub rate_hz: f64,
    /// Gaussian range noise in meters; 0 disables the noise draw entirely.
    pub noise_sigma: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            rings: 32,
            azimuths: 360,
            elevation_min_deg: -25.0,
            elevation_max_deg: 15.0,
            max_range: 50.0,
            mount_height: 1.5,
            rate_hz: 10.0,
            noise_sigma: 0.0,
        }
    }
}

/// Cast every beam of one revolution against the terrain and obstacles,
/// returning hit points in world coordinates.
pub fn raycast_scan(
    terrain: &TerrainModel,
    spec: &SensorSpec,
    pose: Pose2D,
    stamp: f64,
    rng: &mut impl Rng,
) -> PointCloud {
    let origin = [
        pose.x,
        pose.y,
        terrain.ground(pose.x, pose.y) + spec.mount_height,
    ];
    let feature_rects = terrain.feature_rects();
    let mut points = Vec::with_capacity(spec.rings * spec.azimuths / 2);
    for ring in 0..spec.rings {
        let frac = if spec.rings > 1 {
            ring as f64 / (spec.rings - 1) as f64
        } else {
            0.0
        };
        let elev = (spec.elevation_min_deg
            + frac * (spec.elevation_max_deg - spec.elevation_min_deg))
            .to_radians();
        let (se, ce) = elev.sin_cos();
        for az in 0..spec.azimuths {
            let yaw = pose.heading + std::f64::consts::TAU * az as f64 / spec.azimuths as f64;
            let dir = [ce * yaw.cos(), ce * yaw.sin(), se];
            if let Some(mut t) = cast_ray(terrain, &feature_rects, origin, dir, spec.max_range) {
                if spec.noise_sigma > 0.0 {
                    t += spec.noise_sigma * standard_normal(rng);
                }
                if t > 0.0 && t <= spec.max_range {
                    points.push([
                        origin[0] + t * dir[0],
                        origin[1] + t * dir[1],
                        origin[2] + t * dir[2],
                    ]);
                }
            }
        }
    }
    PointCloud { points, stamp }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Nearest intersection distance along the ray, if within range.
fn cast_ray(
    terrain: &TerrainModel,
    feature_rects: &[[f64; 4]],
    o: [f64; 3],
    d: [f64; 3],
    max_range: f64,
) -> Option<f64> {
    let mut best = max_range;
    let mut hit = false;

    for c in &terrain.cylinders {
        let base = terrain.ground(c.cx, c.cy);
        if let Some(t) = ray_cylinder(o, d, c.cx, c.cy, c.radius, base, base + c.height) {
            if t < best {
                best = t;
                hit = true;
            }
        }
    }
    for b in &terrain.boxes {
        let base = terrain.ground(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
        if let Some(t) = ray_box(o, d, b, base, base + b.height) {
            if t < best {
                best = t;
                hit = true;
            }
        }
    }

    // outside every feature rectangle the surface is the plain base plane,
    // so marching is confined to the track's feature interval
    let plane_t = if d[2] < -1e-12 {
        let t = (terrain.base - o[2]) / d[2];
        (t > 0.0).then_some(t)
    } else {
        None
    };
    let mut enter = f64::INFINITY;
    let mut exit = f64::NEG_INFINITY;
    for r in feature_rects {
        if let Some((t0, t1)) = track_rect_interval(o, d, best, r) {
            enter = enter.min(t0);
            exit = exit.max(t1);
        }
    }

    if enter.is_finite() && plane_t.map_or(true, |t| t >= enter) {
        if let Some(t) = march_surface(terrain, o, d, enter, exit.min(best)) {
            if t < best {
                best = t;
                hit = true;
            }
            return hit.then_some(best);
        }
    }
    if let Some(t) = plane_t {
        if t < best {
            best = t;
            hit = true;
        }
    }

    hit.then_some(best)
}

/// Parameter interval where the 2D ground track of the ray segment
/// [0, t_end] overlaps an axis-aligned rectangle [x0, x1, y0, y1].
fn track_rect_interval(
    o: [f64; 3],
    d: [f64; 3],
    t_end: f64,
    r: &[f64; 4],
) -> Option<(f64, f64)> {
    let mut tmin = 0.0f64;
    let mut tmax = t_end;
    for (oi, di, lo, hi) in [(o[0], d[0], r[0], r[1]), (o[1], d[1], r[2], r[3])] {
        if di.abs() < 1e-18 {
            if oi < lo || oi > hi {
                return None;
            }
            continue;
        }
        let t0 = (lo - oi) / di;
        let t1 = (hi - oi) / di;
        let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        tmin = tmin.max(t0);
        tmax = tmax.min(t1);
        if tmin > tmax {
            return None;
        }
    }
    Some((tmin, tmax))
}

fn ray_cylinder(
    o: [f64; 3],
    d: [f64; 3],
    cx: f64,
    cy: f64,
    r: f64,
    z0: f64,
    z1: f64,
) -> Option<f64> {
    let ox = o[0] - cx;
    let oy = o[1] - cy;
    let a = d[0] * d[0] + d[1] * d[1];
    if a < 1e-18 {
        return None;
    }
    let b = 2.0 * (ox * d[0] + oy * d[1]);
    let c = ox * ox + oy * oy - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
        if t > 1e-9 {
            let z = o[2] + t * d[2];
            if z >= z0 && z <= z1 {
                return Some(t);
            }
        }
    }
    None
}

fn ray_box(o: [f64; 3], d: [f64; 3], b: &BoxRect, z0: f64, z1: f64) -> Option<f64> {
    let mut tmin = 1e-9f64;
    let mut tmax = f64::INFINITY;
    for (oi, di, lo, hi) in [
        (o[0], d[0], b.x0, b.x1),
        (o[1], d[1], b.y0, b.y1),
        (o[2], d[2], z0, z1),
    ] {
        if di.abs() < 1e-18 {
            if oi < lo || oi > hi {
                return None;
            }
            continue;
        }
        let t0 = (lo - oi) / di;
        let t1 = (hi - oi) / di;
        let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        tmin = tmin.max(t0);
        tmax = tmax.min(t1);
        if tmin > tmax {
            return None;
        }
    }
    Some(tmin)
}

type BoxRect = crate::sim::terrain::BoxObstacle;

/// Coarse march over [t_start, t_end] followed by bisection against the
/// height field.
fn march_surface(
    terrain: &TerrainModel,
    o: [f64; 3],
    d: [f64; 3],
    t_start: f64,
    t_end: f64,
) -> Option<f64> {
    const STEP: f64 = 0.25;
    if !(t_end > t_start) {
        return None;
    }
    let ceiling = terrain.max_surface();
    let at = |t: f64| [o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]];
    let mut t_prev = t_start;
    let p0 = at(t_prev);
    if p0[2] - terrain.surface(p0[0], p0[1]) <= 0.0 {
        return Some(t_prev);
    }
    let mut t = t_prev + STEP;
    loop {
        let t_clamped = t.min(t_end);
        let p = at(t_clamped);
        if p[2] - terrain.surface(p[0], p[1]) <= 0.0 {
            return Some(bisect(terrain, o, d, t_prev, t_clamped));
        }
        if t_clamped >= t_end {
            return None;
        }
        if d[2] >= 0.0 && p[2] > ceiling {
            return None;
        }
        t_prev = t_clamped;
        t += STEP;
    }
}

fn bisect(terrain: &TerrainModel, o: [f64; 3], d: [f64; 3], mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let p = [o[0] + mid * d[0], o[1] + mid * d[1], o[2] + mid * d[2]];
        if p[2] - terrain.surface(p[0], p[1]) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
