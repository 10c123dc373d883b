//! Second-order point mass driven by a guidance field, with the damping
//! laws compared on it: linear viscous, nonlinear anisotropic (NADF) and a
//! sliding-mode baseline.

use nalgebra::SVector;

use crate::guidance::{GuidanceError, GuidanceField};
use crate::sim::{rollout, Plant, SimConfig, SimError};
use crate::trajectory::{RobotState, Trajectory};
use crate::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMassState {
    pub position: Vec2,
    pub velocity: Vec2,
}

impl PointMassState {
    pub fn new(position: Vec2, velocity: Vec2) -> Self {
        Self { position, velocity }
    }

    pub fn at_rest(position: Vec2) -> Self {
        Self::new(position, Vec2::zeros())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HolonomicLaw {
    /// The guidance vector used directly as the force.
    GradientOnly,
    /// `ug - b * v`.
    LinearDamping { b: f64 },
    /// `ug + nadf_force(ug, v, bd)`.
    Nadf { bd: f64 },
    /// Saturated switching on the velocity error toward
    /// `desired_speed * ug / |ug|`, per axis.
    SlidingMode { u0: f64, boundary_layer: f64, desired_speed: f64 },
}

impl HolonomicLaw {
    pub fn name(&self) -> &'static str {
        match self {
            HolonomicLaw::GradientOnly => "gradient_only",
            HolonomicLaw::LinearDamping { .. } => "linear_damping",
            HolonomicLaw::Nadf { .. } => "nadf",
            HolonomicLaw::SlidingMode { .. } => "sliding_mode",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomicController {
    pub law: HolonomicLaw,
    /// kg
    pub mass: f64,
}

impl HolonomicController {
    pub fn new(law: HolonomicLaw) -> Self {
        Self { law, mass: 1.0 }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(format!("{name} must be > 0, got {v}"))
            }
        };
        positive("mass", self.mass)?;
        match self.law {
            HolonomicLaw::GradientOnly => Ok(()),
            HolonomicLaw::LinearDamping { b } => positive("b", b),
            HolonomicLaw::Nadf { bd } => positive("bd", bd),
            HolonomicLaw::SlidingMode { u0, boundary_layer, desired_speed } => {
                positive("u0", u0)?;
                positive("boundary_layer", boundary_layer)?;
                positive("desired_speed", desired_speed)
            }
        }
    }
}

/// Unit step used to switch on the backsliding term.
#[inline]
fn step(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Nonlinear anisotropic damping force.
///
/// Damps the velocity component normal to the guidance vector, and the
/// component along it only when it opposes the guidance (backsliding).
/// Motion in the guidance direction is left untouched.
pub fn nadf_force(ug: Vec2, v: Vec2, bd: f64) -> Result<Vec2, GuidanceError> {
    let norm = ug.norm();
    if norm == 0.0 {
        return Err(GuidanceError::ZeroGuidance);
    }
    let dir = ug / norm;
    Ok(nadf_force_with_normal(ug, v, bd, Vec2::new(-dir.y, dir.x)))
}

/// [`nadf_force`] with an explicit unit normal `n` to `ug`; the result does
/// not depend on which of the two normals is passed.
pub fn nadf_force_with_normal(ug: Vec2, v: Vec2, bd: f64, n: Vec2) -> Vec2 {
    let norm = ug.norm();
    let along = ug.dot(&v);
    let lateral = n * n.dot(&v);
    let backslide = ug * (along / norm * step(-along) / norm);
    -(lateral + backslide) * bd
}

#[inline]
fn sat(z: f64) -> f64 {
    z.clamp(-1.0, 1.0)
}

pub fn control_force(ctrl: &HolonomicController, state: &PointMassState, ug: Vec2) -> Result<Vec2, GuidanceError> {
    let v = state.velocity;
    match ctrl.law {
        HolonomicLaw::GradientOnly => Ok(ug),
        HolonomicLaw::LinearDamping { b } => Ok(ug - v * b),
        HolonomicLaw::Nadf { bd } => Ok(ug + nadf_force(ug, v, bd)?),
        HolonomicLaw::SlidingMode { u0, boundary_layer, desired_speed } => {
            let norm = ug.norm();
            if norm == 0.0 {
                return Err(GuidanceError::ZeroGuidance);
            }
            let err = (ug / norm * desired_speed - v) / boundary_layer;
            Ok(Vec2::new(sat(err.x), sat(err.y)) * u0)
        }
    }
}

/// `0.5 M |v|^2 + gain * V(x)` for unnormalized harmonic guidance.
pub fn mechanical_energy(state: &PointMassState, g: &GuidanceField, mass: f64) -> Option<f64> {
    g.potential_at(state.position).map(|v| 0.5 * mass * state.velocity.norm_squared() + v)
}

struct PointMassPlant<'a> {
    ctrl: &'a HolonomicController,
    guidance: &'a GuidanceField,
}

impl PointMassPlant<'_> {
    fn force(&self, x: &SVector<f64, 4>) -> Result<Vec2, GuidanceError> {
        let state = unpack(x);
        let ug = self.guidance.eval_unchecked(state.position);
        control_force(self.ctrl, &state, ug)
    }
}

fn unpack(x: &SVector<f64, 4>) -> PointMassState {
    PointMassState::new(Vec2::new(x[0], x[1]), Vec2::new(x[2], x[3]))
}

impl Plant<4> for PointMassPlant<'_> {
    fn derivative(&self, _t: f64, x: &SVector<f64, 4>) -> Result<SVector<f64, 4>, GuidanceError> {
        let a = self.force(x)? / self.ctrl.mass;
        Ok(SVector::<f64, 4>::new(x[2], x[3], a.x, a.y))
    }

    fn control(&self, _t: f64, x: &SVector<f64, 4>) -> Result<Vec2, GuidanceError> {
        self.force(x)
    }

    fn state(&self, x: &SVector<f64, 4>) -> RobotState {
        RobotState::PointMass(unpack(x))
    }

    fn has_inertia(&self) -> bool {
        true
    }
}

/// RK4 rollout of `M x'' = control_force(x, x', ug(x))`, with the force
/// re-evaluated at every stage. Records the applied force per sample.
pub fn simulate_point_mass(
    ctrl: &HolonomicController,
    g: &GuidanceField,
    start: PointMassState,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    ctrl.validate().map_err(SimError::InvalidConfig)?;
    let x0 = SVector::<f64, 4>::new(start.position.x, start.position.y, start.velocity.x, start.velocity.y);
    rollout(&PointMassPlant { ctrl, guidance: g }, g, x0, cfg)
}
