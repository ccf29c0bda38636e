//! Run products: pose trace, planner paths, trajectory selections, stage
//! timings, and the final outcome, with CSV export.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::pose::Pose2D;
use crate::sampler::ControlProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    GoalReached,
    Collision,
    Timeout,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::GoalReached => 0,
            Outcome::Collision => 2,
            Outcome::Timeout => 3,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Outcome::GoalReached => "goal_reached",
            Outcome::Collision => "collision",
            Outcome::Timeout => "timeout",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PoseRecord {
    pub t: f64,
    pub pose: Pose2D,
}

#[derive(Debug, Clone, Copy)]
pub struct SelectionRecord {
    pub t: f64,
    pub start: Pose2D,
    pub profile: ControlProfile,
    pub endpoint: Pose2D,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct PathRecord {
    pub t: f64,
    pub points: Vec<(f64, f64)>,
    pub total_cost: f64,
}

#[derive(Debug, Clone)]
pub struct TimingRecord {
    pub t: f64,
    pub stage: &'static str,
    pub millis: f64,
}

#[derive(Debug)]
pub struct RunLog {
    pub poses: Vec<PoseRecord>,
    pub selections: Vec<SelectionRecord>,
    pub paths: Vec<PathRecord>,
    pub timings: Vec<TimingRecord>,
    pub outcome: Outcome,
    /// Simulated seconds elapsed when the run ended.
    pub elapsed: f64,
}

impl RunLog {
    /// Hash of everything that must be identical across repeated runs with
    /// the same seed. Wall-clock timings are measurements, not state, and
    /// are deliberately left out.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.f64(self.elapsed);
        h.u64(self.outcome.exit_code() as u64);
        h.u64(self.poses.len() as u64);
        for p in &self.poses {
            h.f64(p.t);
            h.f64(p.pose.x);
            h.f64(p.pose.y);
            h.f64(p.pose.heading);
        }
        h.u64(self.selections.len() as u64);
        for s in &self.selections {
            h.f64(s.t);
            h.f64(s.start.x);
            h.f64(s.start.y);
            h.f64(s.start.heading);
            h.f64(s.profile.omega);
            h.f64(s.profile.t1);
            h.f64(s.profile.t2);
            h.f64(s.profile.t3);
            h.f64(s.profile.speed);
            h.f64(s.endpoint.x);
            h.f64(s.endpoint.y);
            h.f64(s.endpoint.heading);
            h.f64(s.score);
        }
        h.u64(self.paths.len() as u64);
        for p in &self.paths {
            h.f64(p.t);
            h.f64(p.total_cost);
            h.u64(p.points.len() as u64);
            for (x, y) in &p.points {
                h.f64(*x);
                h.f64(*y);
            }
        }
        h.finish()
    }

    pub fn poses_csv(&self) -> String {
        let mut s = String::from("t,x,y,heading\n");
        for p in &self.poses {
            writeln!(s, "{},{},{},{}", p.t, p.pose.x, p.pose.y, p.pose.heading).unwrap();
        }
        s
    }

    pub fn selections_csv(&self) -> String {
        let mut s = String::from(
            "t,start_x,start_y,start_heading,direction,omega,t1,t2,t3,speed,end_x,end_y,end_heading,score\n",
        );
        for r in &self.selections {
            writeln!(
                s,
                "{},{},{},{},{:?},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.start.x,
                r.start.y,
                r.start.heading,
                r.profile.direction,
                r.profile.omega,
                r.profile.t1,
                r.profile.t2,
                r.profile.t3,
                r.profile.speed,
                r.endpoint.x,
                r.endpoint.y,
                r.endpoint.heading,
                r.score
            )
            .unwrap();
        }
        s
    }

    pub fn paths_csv(&self) -> String {
        let mut s = String::from("t,vertex,x,y,total_cost\n");
        for p in &self.paths {
            for (i, (x, y)) in p.points.iter().enumerate() {
                writeln!(s, "{},{},{},{},{}", p.t, i, x, y, p.total_cost).unwrap();
            }
        }
        s
    }

    pub fn timings_csv(&self) -> String {
        let mut s = String::from("t,stage,millis\n");
        for r in &self.timings {
            writeln!(s, "{},{},{}", r.t, r.stage, r.millis).unwrap();
        }
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "outcome: {}\nelapsed: {:.3}\nposes: {}\nselections: {}\npaths: {}\n",
            self.outcome,
            self.elapsed,
            self.poses.len(),
            self.selections.len(),
            self.paths.len()
        )
    }

    /// Writes all tables plus a summary into `dir`, creating it if needed.
    pub fn write_csv_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("poses.csv"), self.poses_csv())?;
        std::fs::write(dir.join("selections.csv"), self.selections_csv())?;
        std::fs::write(dir.join("paths.csv"), self.paths_csv())?;
        std::fs::write(dir.join("timings.csv"), self.timings_csv())?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn u64(&mut self, v: u64) {
        for byte in v.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
