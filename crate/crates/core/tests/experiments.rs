use hpfnav_core::experiments::metrics::{control_effort, path_length};
use hpfnav_core::experiments::{
    compare_controllers, run_scenario, ControllerSpec, RunError, Scenario, ScenarioError, Variant,
};
use hpfnav_core::holonomic::HolonomicLaw;
use hpfnav_core::{Termination, Trajectory};

fn shipped(name: &str) -> Scenario {
    Scenario::shipped(name).unwrap()
}

#[test]
fn nadf_reaches_target_without_contact() {
    let out = run_scenario(&shipped("fig7_nadf")).unwrap();
    assert_eq!(out.metrics.termination, Termination::Reached);
    assert!(!out.metrics.collided);
    assert!(out.metrics.min_clearance.unwrap() > 0.0);
    assert!(out.metrics.settling_time.unwrap().is_finite());
}

#[test]
fn start_on_target_settles_immediately() {
    let mut s = shipped("fig7_nadf");
    let map = s.field.map().unwrap();
    s.start = Some(map.cell_center(map.target()));
    let out = run_scenario(&s).unwrap();
    assert_eq!(out.metrics.termination, Termination::Reached);
    assert_eq!(out.metrics.settling_time, Some(0.0));
    assert_eq!(out.metrics.path_length, 0.0);
}

#[test]
fn runs_are_bitwise_reproducible() {
    let s = shipped("fig17_19_compare");
    let a = compare_controllers(&s, &s.variants).unwrap();
    let b = compare_controllers(&s, &s.variants).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!(ra.metrics, rb.metrics);
    }
    // Concurrent comparison rows match sequential single runs.
    for (v, row) in s.variants.iter().zip(&a.rows) {
        let single = run_scenario(&s.with_controller(v.controller)).unwrap();
        assert_eq!(single.metrics, row.metrics, "{}", v.label);
    }
}

fn slice(traj: &Trajectory, from: usize, to: usize) -> Trajectory {
    Trajectory { samples: traj.samples[from..=to].to_vec(), ..traj.clone() }
}

#[test]
fn effort_and_length_are_additive() {
    for name in ["fig7_nadf", "fig19_joint"] {
        let traj = run_scenario(&shipped(name)).unwrap().trajectory;
        let n = traj.samples.len() - 1;
        let whole = control_effort(&traj);
        assert!(whole >= 0.0);
        for k in [1, n / 3, n / 2, n - 1] {
            let (a, b) = (slice(&traj, 0, k), slice(&traj, k, n));
            assert!(control_effort(&a) >= 0.0 && control_effort(&b) >= 0.0);
            let sum = control_effort(&a) + control_effort(&b);
            assert!((sum - whole).abs() <= 1e-9 * whole.max(1.0), "{name} split {k}");
            let len = path_length(&a) + path_length(&b);
            assert!((len - path_length(&traj)).abs() <= 1e-9 * len.max(1.0));
        }
    }
}

#[test]
fn wheel_slip_does_not_speed_up_settling() {
    let slipping = shipped("slip_lane");
    let mut clean = slipping.clone();
    clean.slip = None;
    let ts_slip = run_scenario(&slipping).unwrap().metrics.settling_time.unwrap();
    let ts_clean = run_scenario(&clean).unwrap().metrics.settling_time.unwrap();
    assert!(ts_slip >= ts_clean, "{ts_slip} < {ts_clean}");
}

#[test]
fn identical_variants_compare_as_one() {
    let s = shipped("fig7_nadf");
    let v = Variant { label: "nadf".into(), controller: s.controller };
    let report = compare_controllers(&s, &[v.clone(), Variant { label: "again".into(), ..v }]).unwrap();
    let r = report.ratios[0];
    assert_eq!((r.settling_time, r.effort, r.overshoot), (Some(1.0), 1.0, 1.0));
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 3);
}

#[test]
fn comparison_needs_two_variants() {
    let s = shipped("nadf_vs_linear");
    assert!(matches!(compare_controllers(&s, &s.variants[..1]), Err(RunError::Inconsistent(_))));
}

#[test]
fn controller_must_match_robot() {
    let s = shipped("fig7_nadf");
    let wrong = Variant { label: "k".into(), controller: shipped("fig14_lane_kinematic").controller };
    let ok = Variant { label: "n".into(), controller: s.controller };
    assert!(matches!(compare_controllers(&s, &[ok, wrong]), Err(RunError::Inconsistent(_))));
    let diff = shipped("fig17_linear").with_controller(ControllerSpec::Holonomic(HolonomicLaw::Nadf { bd: 1.0 }));
    assert!(matches!(run_scenario(&diff), Err(RunError::Inconsistent(_))));
}

#[test]
fn scenario_errors_name_the_field() {
    let text = "robot = \"point_mass\"\ncontroller = \"nadf\"\ndt = -0.1\nt_max = 10\n[field]\nkind = \"lane\"\n[gains]\nbd = 1.0\n";
    match Scenario::from_toml(text, None) {
        Err(ScenarioError::Invalid { field, .. }) => assert_eq!(field, "dt"),
        other => panic!("{other:?}"),
    }
}
