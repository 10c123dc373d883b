//! Running scenarios and comparing controllers.

use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use super::metrics::{
    control_effort, crossing_overshoot, min_clearance, path_length, settling_time, target_overshoot, RunMetrics,
};
use super::scenario::{ControllerSpec, FieldSpec, RobotModel, Scenario, Variant};
use crate::diffdrive::{simulate_diff_drive, simulate_unicycle, DiffDriveState};
use crate::guidance::{kinematic_trajectory, GuidanceField};
use crate::holonomic::{simulate_point_mass, HolonomicController, HolonomicLaw, PointMassState};
use crate::potential::{solve, BoundaryCondition, SolveError, SolverConfig};
use crate::report::{aligned_table, sig9};
use crate::sim::SimError;
use crate::trajectory::{Termination, Trajectory};

/// Settling radius used for lane and tracking runs without an explicit `eps`.
pub const DEFAULT_LATERAL_EPS: f64 = 0.05;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("inconsistent scenario: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub metrics: RunMetrics,
    pub guidance: GuidanceField,
}

/// Builds the guidance field, solving the potential for harmonic fields.
pub fn build_guidance(field: &FieldSpec) -> Result<GuidanceField, RunError> {
    Ok(match field {
        FieldSpec::Harmonic { map, bc, normalize, gain, .. } => {
            let solved = solve(map, &BoundaryCondition::new(*bc), &SolverConfig::default())?;
            solved.ensure_converged()?;
            GuidanceField::Harmonic { field: Arc::new(solved), normalize: *normalize, gain: *gain }
        }
        FieldSpec::Lane { speed, centering } => GuidanceField::Lane { speed: *speed, centering: *centering },
        FieldSpec::Tracking { reference, speed, gain } => {
            GuidanceField::Tracking { reference: *reference, speed: *speed, gain: *gain }
        }
    })
}

/// Settling radius used for metrics.
pub fn metrics_eps(s: &Scenario, g: &GuidanceField) -> f64 {
    s.sim.resolve_eps(g, s.start_point()).unwrap_or(DEFAULT_LATERAL_EPS)
}

pub fn compute_metrics(traj: &Trajectory, g: &GuidanceField, eps: f64) -> RunMetrics {
    let collided = traj.termination == Termination::Collided;
    let settled = matches!(traj.termination, Termination::Reached | Termination::Timeout);
    let overshoot = if g.target().is_some() {
        target_overshoot(traj, eps)
    } else {
        let signed: Vec<f64> = traj.positions().map(|p| g.signed_error(p).unwrap_or(0.0)).collect();
        crossing_overshoot(&signed)
    };
    RunMetrics {
        termination: traj.termination,
        settling_time: if settled { settling_time(traj, eps) } else { None },
        overshoot,
        min_clearance: g.map().map(|m| min_clearance(traj, m)),
        collided,
        control_effort: control_effort(traj),
        path_length: path_length(traj),
    }
}

/// Runs `s` with controller `ctrl` on an already built guidance field.
pub fn run_with_guidance(s: &Scenario, g: &GuidanceField, ctrl: &ControllerSpec) -> Result<RunOutput, RunError> {
    let start = s.start_point();
    let traj = match (&s.robot, ctrl) {
        (RobotModel::Point, ControllerSpec::Gradient) => kinematic_trajectory(g, start, &s.sim)?,
        (RobotModel::PointMass { mass }, ControllerSpec::Holonomic(law)) => {
            let c = HolonomicController { law: *law, mass: *mass };
            simulate_point_mass(&c, g, PointMassState::at_rest(start), &s.sim)?
        }
        (RobotModel::DiffDrive(params), ControllerSpec::Kinematic { k_theta, reversed_heading }) => {
            if s.slip.is_some() {
                return Err(RunError::Inconsistent("wheel slip needs a torque controller".into()));
            }
            let st = DiffDriveState::at_rest(start.x, start.y, s.theta);
            simulate_unicycle(g, params, st, *k_theta, *reversed_heading, &s.sim)?
        }
        (RobotModel::DiffDrive(params), ControllerSpec::Torque(c)) => {
            let st = DiffDriveState::at_rest(start.x, start.y, s.theta);
            simulate_diff_drive(c, params, g, st, s.slip, &s.sim)?
        }
        (robot, c) => {
            return Err(RunError::Inconsistent(format!(
                "controller '{}' cannot drive robot '{}'",
                c.name(),
                robot.kind().name()
            )))
        }
    };
    let metrics = compute_metrics(&traj, g, metrics_eps(s, g));
    Ok(RunOutput { trajectory: traj, metrics, guidance: g.clone() })
}

pub fn run_scenario(s: &Scenario) -> Result<RunOutput, RunError> {
    let g = build_guidance(&s.field)?;
    run_with_guidance(s, &g, &s.controller)
}

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub label: String,
    pub metrics: RunMetrics,
}

/// `a / b` for each metric of an ordered pair of rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairRatio {
    pub a: usize,
    pub b: usize,
    pub settling_time: Option<f64>,
    pub effort: f64,
    pub overshoot: f64,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub scenario: String,
    pub rows: Vec<ComparisonRow>,
    /// Every pair `i < j`.
    pub ratios: Vec<PairRatio>,
}

/// `a / b`, with equal values (including two zeros) giving exactly 1.
fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// Runs every variant on the same field, start and settings. Variants run
/// concurrently; rows keep the variant order.
pub fn compare_controllers(base: &Scenario, variants: &[Variant]) -> Result<ComparisonReport, RunError> {
    if variants.len() < 2 {
        return Err(RunError::Inconsistent(format!("comparison needs at least 2 variants, got {}", variants.len())));
    }
    if let Some(v) = variants.iter().find(|v| v.controller.robot_kind() != base.robot.kind()) {
        return Err(RunError::Inconsistent(format!(
            "variant '{}' cannot drive robot '{}'",
            v.label,
            base.robot.kind().name()
        )));
    }
    let g = build_guidance(&base.field)?;
    let rows = variants
        .par_iter()
        .map(|v| {
            run_with_guidance(base, &g, &v.controller)
                .map(|out| ComparisonRow { label: v.label.clone(), metrics: out.metrics })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut ratios = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let (ma, mb) = (&rows[a].metrics, &rows[b].metrics);
            ratios.push(PairRatio {
                a,
                b,
                settling_time: ma.settling_time.zip(mb.settling_time).map(|(x, y)| ratio(x, y)),
                effort: ratio(ma.control_effort, mb.control_effort),
                overshoot: ratio(ma.overshoot, mb.overshoot),
            });
        }
    }
    Ok(ComparisonReport { scenario: base.name.clone(), rows, ratios })
}

fn opt(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

impl ComparisonReport {
    const HEADER: [&'static str; 11] = [
        "controller",
        "termination",
        "settling_time",
        "overshoot",
        "min_clearance",
        "collided",
        "effort",
        "path_length",
        "ts_ratio",
        "effort_ratio",
        "overshoot_ratio",
    ];

    /// Ratio of the first row's metric to `row`'s.
    pub fn versus_first(&self, row: usize) -> (Option<f64>, f64, f64) {
        if row == 0 {
            let first = &self.rows[0].metrics;
            return (first.settling_time.map(|_| 1.0), 1.0, 1.0);
        }
        let r = self.ratios.iter().find(|r| r.a == 0 && r.b == row).expect("pair recorded");
        (r.settling_time, r.effort, r.overshoot)
    }

    fn cells(&self) -> Vec<Vec<String>> {
        let mut out = vec![Self::HEADER.iter().map(|s| s.to_string()).collect()];
        for (i, row) in self.rows.iter().enumerate() {
            let m = &row.metrics;
            let (ts, effort, over) = self.versus_first(i);
            out.push(vec![
                row.label.clone(),
                m.termination.to_string(),
                opt(m.settling_time),
                sig9(m.overshoot),
                opt(m.min_clearance),
                m.collided.to_string(),
                sig9(m.control_effort),
                sig9(m.path_length),
                opt(ts),
                sig9(effort),
                sig9(over),
            ]);
        }
        out
    }

    /// One row per variant; ratios are first row over this row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for row in self.cells() {
            let quoted: Vec<String> = row
                .iter()
                .map(|c| if c.contains(',') { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
                .collect();
            writeln!(out, "{}", quoted.join(","))?;
        }
        Ok(())
    }

    pub fn to_table(&self) -> String {
        aligned_table(&self.cells())
    }
}

/// Bisects the sliding-mode gain `u0` in `[lo, hi]` so the settling time
/// approaches `target_ts`. Assumes settling time decreases with `u0`;
/// runs that do not settle count as too slow.
pub fn calibrate_sliding_mode(
    s: &Scenario,
    target_ts: f64,
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
) -> Result<f64, RunError> {
    let ControllerSpec::Holonomic(HolonomicLaw::SlidingMode { boundary_layer, desired_speed, .. }) = s.controller
    else {
        return Err(RunError::Inconsistent("calibration needs a sliding_mode controller".into()));
    };
    let g = build_guidance(&s.field)?;
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let c = ControllerSpec::Holonomic(HolonomicLaw::SlidingMode { u0: mid, boundary_layer, desired_speed });
        let ts = run_with_guidance(s, &g, &c)?.metrics.settling_time;
        match ts {
            Some(ts) if ts <= target_ts => hi = mid,
            _ => lo = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}
