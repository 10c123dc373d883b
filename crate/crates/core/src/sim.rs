//! Shared closed-loop rollout driver.

use nalgebra::SVector;
use thiserror::Error;

use crate::diffdrive::wrap_angle;
use crate::guidance::{GuidanceError, GuidanceField};
use crate::ode::rk4_step;
use crate::trajectory::{RobotState, Sample, Termination, Trajectory};
use crate::{Vec2, WorldPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation settings: {0}")]
    InvalidConfig(String),
    #[error("start point ({x}, {y}) is not in free space")]
    StartBlocked { x: f64, y: f64 },
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
}

/// Speeds above this are treated as numerical blow-up.
const DIVERGENCE_SPEED: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    /// Integration step (s).
    pub dt: f64,
    pub t_max: f64,
    /// Arrival radius around the target. Defaults to 2% of the
    /// start-to-target distance, never below a quarter cell.
    pub arrival_eps: Option<f64>,
    /// Plants with inertia only count as arrived below this speed.
    /// Defaults to the arrival radius per second.
    pub settle_speed: Option<f64>,
    /// Keep every n-th integration step in the trajectory.
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(dt: f64, t_max: f64) -> Self {
        Self { dt, t_max, arrival_eps: None, settle_speed: None, record_every: 1 }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.arrival_eps = Some(eps);
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return Err(SimError::InvalidConfig(format!("t_max must be >= dt, got {}", self.t_max)));
        }
        if let Some(eps) = self.arrival_eps {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(SimError::InvalidConfig(format!("arrival eps must be > 0, got {eps}")));
            }
        }
        if let Some(v) = self.settle_speed {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::InvalidConfig(format!("settle speed must be > 0, got {v}")));
            }
        }
        if self.record_every == 0 {
            return Err(SimError::InvalidConfig("record_every must be >= 1".into()));
        }
        Ok(())
    }

    /// Arrival radius for a run starting at `start`, if the field has a target.
    pub fn resolve_eps(&self, guidance: &GuidanceField, start: WorldPoint) -> Option<f64> {
        self.arrival_eps.or_else(|| guidance.default_arrival_eps(start))
    }
}

/// A plant closed with its controller: state derivative plus what to record.
pub(crate) trait Plant<const N: usize> {
    fn derivative(&self, t: f64, x: &SVector<f64, N>) -> Result<SVector<f64, N>, GuidanceError>;

    /// Actuation applied at state `x`, as recorded in the trajectory.
    fn control(&self, t: f64, x: &SVector<f64, N>) -> Result<Vec2, GuidanceError>;

    fn state(&self, x: &SVector<f64, N>) -> RobotState;

    /// Whether arrival also requires the speed to settle.
    fn has_inertia(&self) -> bool;

    /// Index of the heading angle in the state vector, if any.
    fn heading_index(&self) -> Option<usize> {
        None
    }
}

pub(crate) fn rollout<const N: usize, P: Plant<N>>(
    plant: &P,
    guidance: &GuidanceField,
    x0: SVector<f64, N>,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    let start = plant.state(&x0);
    let start_pos = start.position();
    if let Some(map) = guidance.map() {
        if !map.is_traversable_at(start_pos) {
            return Err(SimError::StartBlocked { x: start_pos.x, y: start_pos.y });
        }
    }
    let eps = cfg.resolve_eps(guidance, start_pos);
    let settle = cfg.settle_speed.or(eps).unwrap_or(f64::INFINITY);
    let arrived = |s: &RobotState| {
        guidance.target().is_some()
            && eps.is_some_and(|e| guidance.error_at(s.position()) <= e)
            && (!plant.has_inertia() || s.speed() <= settle)
    };
    let sample = |t: f64, x: &SVector<f64, N>| {
        let state = plant.state(x);
        Sample {
            t,
            state,
            control: plant.control(t, x).unwrap_or_else(|_| Vec2::zeros()),
            dist: guidance.error_at(state.position()),
        }
    };

    let mut samples = vec![sample(0.0, &x0)];
    let mut max_heading_step = plant.heading_index().map(|_| 0.0_f64);
    let finish = |samples, termination, max_heading_step| Trajectory {
        samples,
        dt: cfg.dt * cfg.record_every as f64,
        termination,
        max_heading_step,
    };
    if arrived(&start) {
        return Ok(finish(samples, Termination::Reached, max_heading_step));
    }

    let steps = (cfg.t_max / cfg.dt - 1e-9).ceil() as usize;
    let mut x = x0;
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * cfg.dt;
        let t = k as f64 * cfg.dt;
        let mut next = match rk4_step(t_prev, &x, cfg.dt, |t, x| plant.derivative(t, x)) {
            Ok(next) => next,
            Err(_) => return Ok(finish(samples, Termination::Diverged, max_heading_step)),
        };
        if let Some(i) = plant.heading_index() {
            next[i] = wrap_angle(next[i]);
            let step = wrap_angle(next[i] - x[i]).abs();
            max_heading_step = max_heading_step.map(|m| m.max(step));
        }
        let state = plant.state(&next);
        if next.iter().any(|v| !v.is_finite()) || state.speed() > DIVERGENCE_SPEED {
            return Ok(finish(samples, Termination::Diverged, max_heading_step));
        }
        if guidance.collides(plant.state(&x).position(), state.position()) {
            samples.push(sample(t, &next));
            return Ok(finish(samples, Termination::Collided, max_heading_step));
        }
        x = next;
        let done = arrived(&state);
        if done || k % cfg.record_every == 0 || k == steps {
            samples.push(sample(t, &x));
        }
        if done {
            return Ok(finish(samples, Termination::Reached, max_heading_step));
        }
    }
    Ok(finish(samples, Termination::Timeout, max_heading_step))
}
