//! Scenarios, metrics and controller comparisons.

pub mod metrics;
pub mod runner;
pub mod scenario;

pub use metrics::RunMetrics;
pub use runner::{
    build_guidance, compare_controllers, run_scenario, run_with_guidance, ComparisonReport, RunError, RunOutput,
};
pub use scenario::{ControllerSpec, FieldSpec, Gains, RobotKind, RobotModel, Scenario, ScenarioError, Variant};
