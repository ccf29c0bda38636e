//! Planar pose and angle helpers shared across the stack.

use std::f64::consts::PI;

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// 2D pose in world meters; heading in radians, normalized to (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: wrap_angle(heading),
        }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn distance_to(&self, other: Pose2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl Default for Pose2D {
    fn default() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
        }
    }
}

/// Advances a unicycle pose along a constant-rate arc for `tau` seconds.
///
/// Closed form, no integration error: a zero rate is a straight segment,
/// otherwise the pose moves along a circle of radius `speed / rate`.
pub fn advance_arc(pose: Pose2D, speed: f64, rate: f64, tau: f64) -> Pose2D {
    if rate.abs() < 1e-12 {
        return Pose2D::new(
            pose.x + speed * tau * pose.heading.cos(),
            pose.y + speed * tau * pose.heading.sin(),
            pose.heading,
        );
    }
    let h2 = pose.heading + rate * tau;
    let r = speed / rate;
    Pose2D::new(
        pose.x + r * (h2.sin() - pose.heading.sin()),
        pose.y - r * (h2.cos() - pose.heading.cos()),
        h2,
    )
}
