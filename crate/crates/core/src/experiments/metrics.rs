//! Scalar summaries of a trajectory.

use crate::gridmap::GridMap;
use crate::trajectory::{RobotState, Termination, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMetrics {
    pub termination: Termination,
    /// Time after which the error stays within the arrival radius.
    pub settling_time: Option<f64>,
    /// Target runs: largest distance after first arrival. Lane and tracking
    /// runs: largest |lateral error| after the first crossing.
    pub overshoot: f64,
    /// `None` for fields without a map.
    pub min_clearance: Option<f64>,
    pub collided: bool,
    pub control_effort: f64,
    pub path_length: f64,
}

/// Smallest sample time after which every recorded error is `<= eps`.
pub fn settling_time(traj: &Trajectory, eps: f64) -> Option<f64> {
    let last_out = traj.samples.iter().rposition(|s| s.dist > eps);
    match last_out {
        None => Some(traj.first().t),
        Some(k) => traj.samples.get(k + 1).map(|s| s.t),
    }
}

/// Largest distance to the target from the first arrival within `eps` on.
pub fn target_overshoot(traj: &Trajectory, eps: f64) -> f64 {
    match traj.samples.iter().position(|s| s.dist <= eps) {
        Some(k) => traj.samples[k..].iter().map(|s| s.dist).fold(0.0, f64::max),
        None => 0.0,
    }
}

/// Largest |error| after the signed error first crosses (or touches) zero.
/// `signed` gives the signed error for each sample.
pub fn crossing_overshoot(signed: &[f64]) -> f64 {
    let Some(s0) = signed.iter().copied().find(|&e| e != 0.0).map(f64::signum) else {
        return 0.0;
    };
    match signed.iter().position(|&e| e * s0 <= 0.0) {
        Some(k) => signed[k..].iter().map(|e| e.abs()).fold(0.0, f64::max),
        None => 0.0,
    }
}

/// Minimum over samples of the distance to the nearest obstacle cell;
/// zero for a collided run.
pub fn min_clearance(traj: &Trajectory, map: &GridMap) -> f64 {
    if traj.termination == Termination::Collided {
        return 0.0;
    }
    traj.positions().map(|p| map.clearance_at(p)).fold(f64::INFINITY, f64::min)
}

fn effort_integrand(state: &RobotState, u: crate::Vec2) -> f64 {
    match state {
        RobotState::PointMass(_) => u.norm(),
        RobotState::DiffDrive(_) => u.x.abs() + u.y.abs(),
    }
}

/// Trapezoidal integral of the control magnitude: Euclidean norm for
/// holonomic plants, `|u1| + |u2|` for wheel torques or speeds.
pub fn control_effort(traj: &Trajectory) -> f64 {
    traj.samples
        .windows(2)
        .map(|w| {
            let a = effort_integrand(&w[0].state, w[0].control);
            let b = effort_integrand(&w[1].state, w[1].control);
            0.5 * (a + b) * (w[1].t - w[0].t)
        })
        .sum()
}

pub fn path_length(traj: &Trajectory) -> f64 {
    traj.samples.windows(2).map(|w| (w[1].state.position() - w[0].state.position()).norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomic::PointMassState;
    use crate::trajectory::Sample;
    use crate::Vec2;

    fn traj(dists: &[f64]) -> Trajectory {
        let samples = dists
            .iter()
            .enumerate()
            .map(|(k, &d)| Sample {
                t: k as f64,
                state: RobotState::PointMass(PointMassState::at_rest(Vec2::new(k as f64, 0.0))),
                control: Vec2::new(3.0, 4.0),
                dist: d,
            })
            .collect();
        Trajectory { samples, dt: 1.0, termination: Termination::Timeout, max_heading_step: None }
    }

    #[test]
    fn settling_semantics() {
        assert_eq!(settling_time(&traj(&[3.0, 2.0, 0.5, 0.1]), 1.0), Some(2.0));
        assert_eq!(settling_time(&traj(&[3.0, 0.5, 2.0, 0.5, 0.2]), 1.0), Some(3.0));
        assert_eq!(settling_time(&traj(&[3.0, 0.5, 2.0]), 1.0), None);
        assert_eq!(settling_time(&traj(&[0.0]), 1.0), Some(0.0));
    }

    #[test]
    fn overshoot_definitions() {
        assert_eq!(target_overshoot(&traj(&[3.0, 0.5, 1.5, 0.2]), 1.0), 1.5);
        assert_eq!(target_overshoot(&traj(&[3.0, 2.0]), 1.0), 0.0);
        assert_eq!(crossing_overshoot(&[-1.0, -0.5, 0.3, 0.4, -0.1]), 0.4);
        assert_eq!(crossing_overshoot(&[1.0, 0.5, 0.2]), 0.0);
        assert_eq!(crossing_overshoot(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn effort_and_length() {
        let t = traj(&[1.0, 1.0, 1.0]);
        assert!((control_effort(&t) - 10.0).abs() < 1e-12);
        assert!((path_length(&t) - 2.0).abs() < 1e-12);
    }
}
