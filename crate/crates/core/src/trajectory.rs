//! Time-stamped rollout records shared by every simulator.

use std::fmt;
use std::io::{self, Write};

use crate::diffdrive::DiffDriveState;
use crate::holonomic::PointMassState;
use crate::report::sig9;
use crate::{Vec2, WorldPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Reached,
    Timeout,
    Collided,
    Diverged,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Reached => "REACHED",
            Termination::Timeout => "TIMEOUT",
            Termination::Collided => "COLLIDED",
            Termination::Diverged => "DIVERGED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RobotState {
    /// Holonomic point, kinematic or with mass.
    PointMass(PointMassState),
    DiffDrive(DiffDriveState),
}

impl RobotState {
    pub fn position(&self) -> WorldPoint {
        match self {
            RobotState::PointMass(s) => s.position,
            RobotState::DiffDrive(s) => Vec2::new(s.x, s.y),
        }
    }

    pub fn heading(&self) -> Option<f64> {
        match self {
            RobotState::PointMass(_) => None,
            RobotState::DiffDrive(s) => Some(s.theta),
        }
    }

    pub fn speed(&self) -> f64 {
        match self {
            RobotState::PointMass(s) => s.velocity.norm(),
            RobotState::DiffDrive(s) => s.v.abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: RobotState,
    /// Applied actuation: velocity command, force, wheel speeds or wheel
    /// torques depending on the plant.
    pub control: Vec2,
    /// Distance to the target, or the lateral error for lane/tracking fields.
    pub dist: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Spacing of the recorded samples. Every gap equals `dt` except
    /// possibly the last one, which ends where the run terminated.
    pub dt: f64,
    pub termination: Termination,
    /// Largest heading change over a single integration step (diff-drive
    /// plants only).
    pub max_heading_step: Option<f64>,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }

    pub fn duration(&self) -> f64 {
        self.last().t - self.first().t
    }

    pub fn positions(&self) -> impl Iterator<Item = WorldPoint> + '_ {
        self.samples.iter().map(|s| s.state.position())
    }

    /// Writes `t,x,y,theta,v,omega,u1,u2,dist`; heading columns stay empty
    /// for holonomic plants.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,y,theta,v,omega,u1,u2,dist")?;
        for s in &self.samples {
            let p = s.state.position();
            let (theta, v, omega) = match s.state {
                RobotState::PointMass(_) => (String::new(), String::new(), String::new()),
                RobotState::DiffDrive(d) => (sig9(d.theta), sig9(d.v), sig9(d.omega)),
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                sig9(s.t),
                sig9(p.x),
                sig9(p.y),
                theta,
                v,
                omega,
                sig9(s.control.x),
                sig9(s.control.y),
                sig9(s.dist)
            )?;
        }
        Ok(())
    }
}
