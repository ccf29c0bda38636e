//! Kinematic vehicle and the cursor that plays a control profile forward.

use serde::{Deserialize, Serialize};

use crate::pose::{advance_arc, Pose2D};
use crate::sampler::ControlProfile;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleModel {
    pub v_max: f64,
    pub omega_max: f64,
    pub radius: f64,
}

impl Default for VehicleModel {
    fn default() -> Self {
        Self {
            v_max: 4.5,
            omega_max: 1.0,
            radius: 0.7,
        }
    }
}

/// Plays one profile forward in arbitrary time slices, preserving exact
/// segment boundaries. Once the profile is exhausted the vehicle holds still.
#[derive(Debug, Clone)]
pub struct ProfileCursor {
    profile: ControlProfile,
    seg: usize,
    used: f64,
}

impl ProfileCursor {
    pub fn new(profile: ControlProfile) -> Self {
        Self {
            profile,
            seg: 0,
            used: 0.0,
        }
    }

    pub fn profile(&self) -> &ControlProfile {
        &self.profile
    }

    pub fn exhausted(&self) -> bool {
        let segs = self.profile.segments();
        let mut seg = self.seg;
        let mut used = self.used;
        while seg < segs.len() && segs[seg].1 - used <= 1e-12 {
            seg += 1;
            used = 0.0;
        }
        seg >= segs.len()
    }

    /// Advances by `dt` seconds, clamping commands to the vehicle's limits.
    pub fn step(&mut self, pose: Pose2D, dt: f64, limits: &VehicleModel) -> Pose2D {
        let speed = self.profile.speed.clamp(0.0, limits.v_max);
        let segs = self.profile.segments();
        let mut pose = pose;
        let mut left = dt;
        while left > 1e-12 && self.seg < segs.len() {
            let (rate, dur) = segs[self.seg];
            let avail = dur - self.used;
            if avail <= 1e-12 {
                self.seg += 1;
                self.used = 0.0;
                continue;
            }
            let tau = left.min(avail);
            let rate = rate.clamp(-limits.omega_max, limits.omega_max);
            pose = advance_arc(pose, speed, rate, tau);
            self.used += tau;
            left -= tau;
        }
        pose
    }
}
