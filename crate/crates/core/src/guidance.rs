//! Guidance fields `ug(x, y)` and the purely kinematic gradient planner
//! `x' = ug(x)`.

use std::sync::Arc;

use nalgebra::SVector;
use thiserror::Error;

use crate::gridmap::GridMap;
use crate::holonomic::PointMassState;
use crate::potential::{FieldError, PotentialField};
use crate::sim::{rollout, Plant, SimConfig, SimError};
use crate::trajectory::{RobotState, Trajectory};
use crate::{Vec2, WorldPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuidanceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("guidance vector is zero; direction undefined")]
    ZeroGuidance,
}

/// Floor on |grad V| when normalizing.
pub const MIN_GRADIENT_NORM: f64 = 1e-300;

/// Reference path `y_ref(x)` for tracking fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    /// `amplitude` on `[rise, fall)`, zero elsewhere.
    SquarePulse {
        rise: f64,
        fall: f64,
        amplitude: f64,
    },
    Sinusoid {
        amplitude: f64,
        period: f64,
    },
}

impl Reference {
    pub fn square_pulse() -> Self {
        Reference::SquarePulse { rise: 4.0, fall: 12.0, amplitude: 1.0 }
    }

    pub fn sinusoid() -> Self {
        Reference::Sinusoid { amplitude: 1.0, period: 8.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Reference::SquarePulse { rise, fall, amplitude } => {
                if (rise..fall).contains(&x) {
                    amplitude
                } else {
                    0.0
                }
            }
            Reference::Sinusoid { amplitude, period } => amplitude * (std::f64::consts::TAU * x / period).sin(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum GuidanceField {
    /// `gain * (-grad V)`, or `gain * (-grad V) / |grad V|` when normalized.
    Harmonic { field: Arc<PotentialField>, normalize: bool, gain: f64 },
    /// Move along +x at `speed` and pull toward `y = 0`: `(speed, -centering * y)`.
    Lane { speed: f64, centering: f64 },
    /// `(speed, gain * (y_ref(x) - y))`.
    Tracking { reference: Reference, speed: f64, gain: f64 },
}

impl GuidanceField {
    pub fn harmonic(field: PotentialField) -> Self {
        GuidanceField::Harmonic { field: Arc::new(field), normalize: false, gain: 1.0 }
    }

    pub fn lane(speed: f64, centering: f64) -> Self {
        GuidanceField::Lane { speed, centering }
    }

    /// Evaluates the field; harmonic fields are only defined in free space.
    pub fn eval(&self, p: WorldPoint) -> Result<Vec2, GuidanceError> {
        if let GuidanceField::Harmonic { field, .. } = self {
            field.gradient_at(p)?;
        }
        Ok(self.eval_unchecked(p))
    }

    /// Same formula without the free-space check; harmonic fields are
    /// clamped to the grid. Used inside integrator stages.
    pub(crate) fn eval_unchecked(&self, p: WorldPoint) -> Vec2 {
        match self {
            GuidanceField::Harmonic { field, normalize, gain } => {
                let grad = field.sample(p).1;
                if *normalize {
                    -grad * (*gain / grad.norm().max(MIN_GRADIENT_NORM))
                } else {
                    -grad * *gain
                }
            }
            GuidanceField::Lane { speed, centering } => Vec2::new(*speed, -centering * p.y),
            GuidanceField::Tracking { reference, speed, gain } => {
                Vec2::new(*speed, gain * (reference.value(p.x) - p.y))
            }
        }
    }

    pub fn potential(&self) -> Option<&PotentialField> {
        match self {
            GuidanceField::Harmonic { field, .. } => Some(field),
            _ => None,
        }
    }

    pub fn map(&self) -> Option<&GridMap> {
        self.potential().map(PotentialField::map)
    }

    pub fn target(&self) -> Option<WorldPoint> {
        self.map().map(GridMap::target_point)
    }

    /// Scaled potential `gain * V(p)` whose negative gradient is the field
    /// (unnormalized harmonic fields only).
    pub fn potential_at(&self, p: WorldPoint) -> Option<f64> {
        match self {
            GuidanceField::Harmonic { field, normalize: false, gain } => Some(gain * field.sample(p).0),
            _ => None,
        }
    }

    /// Signed lateral error for lane and tracking fields.
    pub fn signed_error(&self, p: WorldPoint) -> Option<f64> {
        match self {
            GuidanceField::Harmonic { .. } => None,
            GuidanceField::Lane { .. } => Some(p.y),
            GuidanceField::Tracking { reference, .. } => Some(p.y - reference.value(p.x)),
        }
    }

    /// Distance to the target, or |lateral error| when there is no target.
    pub fn error_at(&self, p: WorldPoint) -> f64 {
        match self.target() {
            Some(target) => (p - target).norm(),
            None => self.signed_error(p).unwrap_or(0.0).abs(),
        }
    }

    pub fn collides(&self, a: WorldPoint, b: WorldPoint) -> bool {
        self.map().is_some_and(|m| m.segment_collides(a, b))
    }

    /// 2% of the start-to-target distance, floored at a quarter cell.
    pub fn default_arrival_eps(&self, start: WorldPoint) -> Option<f64> {
        let map = self.map()?;
        let d = (start - map.target_point()).norm();
        Some((0.02 * d).max(0.25 * map.cell_size()))
    }
}

pub fn eval_guidance(g: &GuidanceField, p: WorldPoint) -> Result<Vec2, GuidanceError> {
    g.eval(p)
}

struct KinematicPoint<'a> {
    guidance: &'a GuidanceField,
}

impl Plant<2> for KinematicPoint<'_> {
    fn derivative(&self, _t: f64, x: &SVector<f64, 2>) -> Result<SVector<f64, 2>, GuidanceError> {
        Ok(self.guidance.eval_unchecked(*x))
    }

    fn control(&self, _t: f64, x: &SVector<f64, 2>) -> Result<Vec2, GuidanceError> {
        Ok(self.guidance.eval_unchecked(*x))
    }

    fn state(&self, x: &SVector<f64, 2>) -> RobotState {
        RobotState::PointMass(PointMassState::new(*x, self.guidance.eval_unchecked(*x)))
    }

    fn has_inertia(&self) -> bool {
        false
    }
}

/// Integrates `x' = ug(x)` with fixed-step RK4 from `start`.
///
/// Terminates `Reached` within the arrival radius of a harmonic field's
/// target, `Collided` when a step segment enters an obstacle, `Timeout` at
/// `t_max`. The recorded control is the velocity command `ug`.
pub fn kinematic_trajectory(g: &GuidanceField, start: WorldPoint, cfg: &SimConfig) -> Result<Trajectory, SimError> {
    rollout(&KinematicPoint { guidance: g }, g, start, cfg)
}
