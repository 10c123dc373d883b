use std::f64::consts::{PI, TAU};

use hpfnav_core::diffdrive::{
    body_acceleration, dimension_matrix, dynamics_matrix, simulate_diff_drive, simulate_unicycle, wrap_angle,
    DiffDriveParams, DiffDriveState, TorqueController, TorqueLaw,
};
use hpfnav_core::experiments::metrics::crossing_overshoot;
use hpfnav_core::experiments::metrics::settling_time;
use hpfnav_core::guidance::kinematic_trajectory;
use hpfnav_core::holonomic::{nadf_force, nadf_force_with_normal};
use hpfnav_core::{GuidanceField, RobotState, SimConfig, Trajectory, Vec2};
use nalgebra::Matrix2;
use proptest::prelude::*;

fn lane() -> GuidanceField {
    GuidanceField::lane(1.0, 1.0)
}

fn final_diff_state(traj: &Trajectory) -> DiffDriveState {
    match traj.last().state {
        RobotState::DiffDrive(s) => s,
        RobotState::PointMass(_) => unreachable!(),
    }
}

#[test]
fn kinematic_planner_joins_the_lane_from_any_heading() {
    let cfg = SimConfig::new(0.01, 40.0);
    for k in 0..16 {
        let theta = -PI + (k as f64 + 1.0) * TAU / 16.0;
        let traj = simulate_unicycle(
            &lane(),
            &DiffDriveParams::default(),
            DiffDriveState::at_rest(0.0, 1.0, theta),
            1.0,
            false,
            &cfg,
        )
        .unwrap();
        let end = final_diff_state(&traj);
        assert!(end.y.abs() < 0.05 && end.theta.abs() < 0.05, "theta0 {theta}: {end:?}");
        assert!(traj.samples.iter().all(|s| {
            let th = s.state.heading().unwrap();
            th > -PI && th <= PI
        }));
    }
}

#[test]
fn reversed_heading_error_does_not_converge() {
    let cfg = SimConfig::new(0.01, 40.0);
    let traj = simulate_unicycle(
        &lane(),
        &DiffDriveParams::default(),
        DiffDriveState::at_rest(0.0, 1.0, 0.3),
        1.0,
        true,
        &cfg,
    )
    .unwrap();
    let end = final_diff_state(&traj);
    assert!(end.y.abs() > 0.05 || end.theta.abs() > 0.05, "{end:?}");
}

fn lane_run(law: TorqueLaw, kd: f64) -> Trajectory {
    let ctrl = TorqueController::new(law, 2.0, kd);
    let start = DiffDriveState::at_rest(0.0, -1.0, PI / 2.0);
    simulate_diff_drive(&ctrl, &DiffDriveParams::default(), &lane(), start, None, &SimConfig::new(0.01, 40.0)).unwrap()
}

fn lateral(traj: &Trajectory) -> Vec<f64> {
    traj.positions().map(|p| p.y).collect()
}

#[test]
fn mass_without_damping_does_not_settle() {
    let undamped = lane_run(TorqueLaw::Linear, 0.0);
    assert_eq!(settling_time(&undamped, 0.05), None);
    let tail = undamped.samples.iter().filter(|s| s.t > 30.0).map(|s| s.dist).fold(0.0, f64::max);
    assert!(tail > 0.5);
    let damped = lane_run(TorqueLaw::Linear, 2.0);
    assert!(settling_time(&damped, 0.05).is_some());
}

#[test]
fn refined_laws_overshoot_less() {
    let lin = lane_run(TorqueLaw::Linear, 2.0);
    let dir = lane_run(TorqueLaw::DirectionSensitive, 2.0);
    let joint = lane_run(TorqueLaw::JointSensitive, 2.0);
    let (o13, o15, o16) =
        (crossing_overshoot(&lateral(&lin)), crossing_overshoot(&lateral(&dir)), crossing_overshoot(&lateral(&joint)));
    assert!(o16 <= o15 && o15 <= o13, "{o16} {o15} {o13}");
    assert!(settling_time(&dir, 0.05).unwrap() <= settling_time(&lin, 0.05).unwrap());
}

#[test]
fn rk4_converges_at_fourth_order_on_lane() {
    let err = |dt: f64| {
        let traj = kinematic_trajectory(&lane(), Vec2::new(0.0, 1.0), &SimConfig::new(dt, 2.0)).unwrap();
        let end = traj.last();
        (end.state.position().y - (-end.t).exp()).abs()
    };
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

/// Largest gap between the central second difference of the recorded
/// positions and the acceleration implied by the recorded torques.
fn fd_acceleration_error(dt: f64) -> f64 {
    let ctrl = TorqueController::new(TorqueLaw::JointSensitive, 2.0, 2.0);
    let params = DiffDriveParams::default();
    let start = DiffDriveState::at_rest(0.0, -1.0, PI / 2.0);
    let traj = simulate_diff_drive(&ctrl, &params, &lane(), start, None, &SimConfig::new(dt, 6.0)).unwrap();
    let b = dynamics_matrix(&params).0;
    traj.samples
        .windows(3)
        .map(|w| {
            let fd = (w[2].state.position() - 2.0 * w[1].state.position() + w[0].state.position()) / (dt * dt);
            let RobotState::DiffDrive(s) = w[1].state else { unreachable!() };
            let v_dot = (b * w[1].control)[0];
            (fd - body_acceleration(&s, v_dot)).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn finite_difference_acceleration_is_second_order() {
    let (e1, e2) = (fd_acceleration_error(0.01), fd_acceleration_error(0.005));
    assert!(e1 < 1e-3, "{e1}");
    let ratio = e1 / e2;
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

fn params() -> impl Strategy<Value = DiffDriveParams> {
    (0.01..1.0f64, 0.05..2.0f64, 0.1..100.0f64, prop::bool::ANY).prop_map(|(r, w, m, flip)| DiffDriveParams {
        wheel_radius: r,
        width: w,
        mass: m,
        turn_sign: if flip { -1.0 } else { 1.0 },
    })
}

fn near_identity(m: Matrix2<f64>) -> bool {
    (m - Matrix2::identity()).abs().max() <= 1e-12
}

proptest! {
    #[test]
    fn matrices_invert(p in params()) {
        let (a, a_inv) = dimension_matrix(&p);
        prop_assert!(near_identity(a * a_inv));
        let (b, b_inv) = dynamics_matrix(&p);
        prop_assert!(near_identity(b * b_inv));
    }

    #[test]
    fn wrap_angle_is_half_open(a in -1e3..1e3f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let k = ((a - w) / TAU).round();
        prop_assert!((a - w - k * TAU).abs() < 1e-9);
    }

    #[test]
    fn nadf_null_space(ux in -5.0..5.0f64, uy in -5.0..5.0f64, s in 0.0..10.0f64, bd in 0.1..10.0f64) {
        let ug = Vec2::new(ux, uy);
        prop_assume!(ug.norm() > 1e-3);
        prop_assert!(nadf_force(ug, ug * s, bd).unwrap().norm() <= 1e-12 * (1.0 + s * ug.norm()));
        let dir = ug.normalize();
        let n = Vec2::new(-dir.y, dir.x);
        prop_assert_eq!(nadf_force_with_normal(ug, ug * s, bd, n), nadf_force_with_normal(ug, ug * s, bd, -n));
    }
}
