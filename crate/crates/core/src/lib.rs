//! Harmonic potential field navigation: grid maps, a Laplace solver,
//! gradient guidance, and damping controllers for point-mass and
//! differential-drive robots.

pub mod diffdrive;
pub mod experiments;
pub mod gridmap;
pub mod guidance;
pub mod holonomic;
pub mod ode;
pub mod potential;
pub mod report;
pub mod sim;
pub mod trajectory;

/// Planar vector in world coordinates (m, m/s, N ...).
pub type Vec2 = nalgebra::Vector2<f64>;
/// A location in the world frame (m).
pub type WorldPoint = Vec2;

pub use gridmap::{CellLabel, GridMap, MapError};
pub use guidance::{GuidanceError, GuidanceField};
pub use potential::{BoundaryCondition, BoundaryMode, PotentialField, SolveError, SolverConfig, SolverMethod};
pub use sim::{SimConfig, SimError};
pub use trajectory::{RobotState, Sample, Termination, Trajectory};
