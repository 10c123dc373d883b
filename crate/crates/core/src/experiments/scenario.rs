//! Scenario files: a TOML document describing one run (field, robot,
//! controller, start, integration settings) plus optional comparison
//! variants.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::diffdrive::{DiffDriveParams, SlipWindow, TorqueController, TorqueLaw, Wheel};
use crate::gridmap::{builtin_scenario, GridMap, MapError, BUILTIN_MAPS};
use crate::guidance::Reference;
use crate::holonomic::HolonomicLaw;
use crate::potential::BoundaryMode;
use crate::sim::SimConfig;
use crate::Vec2;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("scenario syntax: {0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("map {name}: {source}")]
    Map { name: String, source: MapError },
    #[error("unknown shipped scenario '{0}'")]
    UnknownShipped(String),
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobotKind {
    /// Massless point following `x' = ug`.
    Point,
    PointMass,
    DiffDrive,
}

impl RobotKind {
    fn parse(s: &str) -> Result<Self, ScenarioError> {
        match s {
            "point" => Ok(RobotKind::Point),
            "point_mass" => Ok(RobotKind::PointMass),
            "diff_drive" => Ok(RobotKind::DiffDrive),
            _ => Err(invalid("robot", format!("unknown robot '{s}' (expected point, point_mass or diff_drive)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RobotKind::Point => "point",
            RobotKind::PointMass => "point_mass",
            RobotKind::DiffDrive => "diff_drive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RobotModel {
    Point,
    PointMass { mass: f64 },
    DiffDrive(DiffDriveParams),
}

impl RobotModel {
    pub fn kind(&self) -> RobotKind {
        match self {
            RobotModel::Point => RobotKind::Point,
            RobotModel::PointMass { .. } => RobotKind::PointMass,
            RobotModel::DiffDrive(_) => RobotKind::DiffDrive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControllerSpec {
    /// Kinematic gradient descent.
    Gradient,
    Holonomic(HolonomicLaw),
    /// Wheel speeds set directly from the guidance (no dynamics).
    Kinematic {
        k_theta: f64,
        reversed_heading: bool,
    },
    Torque(TorqueController),
}

impl ControllerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ControllerSpec::Gradient => "gradient",
            ControllerSpec::Holonomic(law) => match law {
                HolonomicLaw::LinearDamping { .. } => "linear_damping",
                _ => law.name(),
            },
            ControllerSpec::Kinematic { .. } => "kinematic",
            ControllerSpec::Torque(c) => c.law.name(),
        }
    }

    /// Short human label including the gains, e.g. `nadf(bd=2.5)`.
    pub fn label(&self) -> String {
        match self {
            ControllerSpec::Gradient => "gradient".into(),
            ControllerSpec::Holonomic(law) => match *law {
                HolonomicLaw::GradientOnly => "gradient_only".into(),
                HolonomicLaw::LinearDamping { b } => format!("linear_damping(b={b})"),
                HolonomicLaw::Nadf { bd } => format!("nadf(bd={bd})"),
                HolonomicLaw::SlidingMode { u0, boundary_layer, desired_speed } => {
                    format!("sliding_mode(u0={u0},boundary_layer={boundary_layer},desired_speed={desired_speed})")
                }
            },
            ControllerSpec::Kinematic { k_theta, .. } => format!("kinematic(k_theta={k_theta})"),
            ControllerSpec::Torque(c) => format!("{}(kp={},kd={})", c.law.name(), c.kp, c.kd),
        }
    }

    pub fn robot_kind(&self) -> RobotKind {
        match self {
            ControllerSpec::Gradient => RobotKind::Point,
            ControllerSpec::Holonomic(_) => RobotKind::PointMass,
            ControllerSpec::Kinematic { .. } | ControllerSpec::Torque(_) => RobotKind::DiffDrive,
        }
    }

    /// Builds a controller from its name and gain table. `ctx` prefixes
    /// field names in error messages (`gains`, `variant[1].gains`).
    pub fn from_parts(robot: RobotKind, name: &str, gains: &Gains, ctx: &str) -> Result<Self, ScenarioError> {
        let allowed: &[&str] = match (robot, name) {
            (RobotKind::Point, "gradient") => &[],
            (RobotKind::PointMass, "gradient_only") => &[],
            (RobotKind::PointMass, "linear_damping") => &["b"],
            (RobotKind::PointMass, "nadf") => &["bd"],
            (RobotKind::PointMass, "sliding_mode") => &["u0", "boundary_layer", "desired_speed"],
            (RobotKind::DiffDrive, "kinematic") => &["k_theta", "reversed_heading"],
            (RobotKind::DiffDrive, "linear" | "direction_sensitive" | "joint_sensitive") => {
                &["kp", "kd", "reversed_heading"]
            }
            _ => {
                let field = if ctx == "gains" {
                    "controller".to_string()
                } else {
                    format!("{}.controller", ctx.trim_end_matches(".gains"))
                };
                return Err(invalid(
                    field,
                    format!("controller '{name}' is not available for robot '{}'", robot.name()),
                ));
            }
        };
        for key in gains.present() {
            if !allowed.contains(&key) {
                return Err(invalid(format!("{ctx}.{key}"), format!("not used by controller '{name}'")));
            }
        }
        let req = |key: &str, v: Option<f64>| -> Result<f64, ScenarioError> {
            let v = v.ok_or_else(|| invalid(format!("{ctx}.{key}"), format!("required by controller '{name}'")))?;
            if !v.is_finite() {
                return Err(invalid(format!("{ctx}.{key}"), "must be finite"));
            }
            Ok(v)
        };
        let positive = |key: &str, v: Option<f64>| -> Result<f64, ScenarioError> {
            let v = req(key, v)?;
            if v <= 0.0 {
                return Err(invalid(format!("{ctx}.{key}"), format!("must be > 0, got {v}")));
            }
            Ok(v)
        };
        let reversed_heading = gains.reversed_heading.unwrap_or(false);
        Ok(match name {
            "gradient" => ControllerSpec::Gradient,
            "gradient_only" => ControllerSpec::Holonomic(HolonomicLaw::GradientOnly),
            "linear_damping" => ControllerSpec::Holonomic(HolonomicLaw::LinearDamping { b: positive("b", gains.b)? }),
            "nadf" => ControllerSpec::Holonomic(HolonomicLaw::Nadf { bd: positive("bd", gains.bd)? }),
            "sliding_mode" => ControllerSpec::Holonomic(HolonomicLaw::SlidingMode {
                u0: positive("u0", gains.u0)?,
                boundary_layer: positive("boundary_layer", gains.boundary_layer)?,
                desired_speed: positive("desired_speed", gains.desired_speed)?,
            }),
            "kinematic" => {
                let k_theta = match gains.k_theta {
                    Some(_) => positive("k_theta", gains.k_theta)?,
                    None => 1.0,
                };
                ControllerSpec::Kinematic { k_theta, reversed_heading }
            }
            _ => {
                let law = match name {
                    "linear" => TorqueLaw::Linear,
                    "direction_sensitive" => TorqueLaw::DirectionSensitive,
                    _ => TorqueLaw::JointSensitive,
                };
                let kp = positive("kp", gains.kp)?;
                let kd = req("kd", gains.kd)?;
                let ok = if law == TorqueLaw::Linear { kd >= 0.0 } else { kd > 0.0 };
                if !ok {
                    let bound = if law == TorqueLaw::Linear { ">= 0" } else { "> 0" };
                    return Err(invalid(format!("{ctx}.kd"), format!("must be {bound}, got {kd}")));
                }
                ControllerSpec::Torque(TorqueController { law, kp, kd, reversed_heading })
            }
        })
    }
}

/// Controller gains as written in a scenario file. Only the keys used by
/// the selected controller may be present.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Gains {
    pub b: Option<f64>,
    pub bd: Option<f64>,
    pub u0: Option<f64>,
    pub boundary_layer: Option<f64>,
    pub desired_speed: Option<f64>,
    pub kp: Option<f64>,
    pub kd: Option<f64>,
    pub k_theta: Option<f64>,
    pub reversed_heading: Option<bool>,
}

impl Gains {
    fn present(&self) -> Vec<&'static str> {
        let numeric = [
            ("b", self.b),
            ("bd", self.bd),
            ("u0", self.u0),
            ("boundary_layer", self.boundary_layer),
            ("desired_speed", self.desired_speed),
            ("kp", self.kp),
            ("kd", self.kd),
            ("k_theta", self.k_theta),
        ];
        let mut keys: Vec<&'static str> = numeric.iter().filter(|(_, v)| v.is_some()).map(|(k, _)| *k).collect();
        if self.reversed_heading.is_some() {
            keys.push("reversed_heading");
        }
        keys
    }

    /// Parses `k=v,k=v` (the command-line variant syntax).
    pub fn parse_inline(s: &str) -> Result<Self, ScenarioError> {
        let mut doc = String::new();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) =
                pair.split_once('=').ok_or_else(|| invalid("gains", format!("expected key=value, got '{pair}'")))?;
            doc.push_str(&format!("{} = {}\n", k.trim(), v.trim()));
        }
        toml::from_str(&doc).map_err(|e| invalid("gains", e.message().to_string()))
    }
}

#[derive(Clone, Debug)]
pub enum FieldSpec {
    Harmonic { map: GridMap, map_name: String, bc: BoundaryMode, normalize: bool, gain: f64 },
    Lane { speed: f64, centering: f64 },
    Tracking { reference: Reference, speed: f64, gain: f64 },
}

impl FieldSpec {
    pub fn map(&self) -> Option<&GridMap> {
        match self {
            FieldSpec::Harmonic { map, .. } => Some(map),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variant {
    pub label: String,
    pub controller: ControllerSpec,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub field: FieldSpec,
    pub robot: RobotModel,
    pub controller: ControllerSpec,
    /// Start position; `None` uses the map's start cell.
    pub start: Option<Vec2>,
    /// Initial heading for diff-drive robots (rad).
    pub theta: f64,
    pub sim: SimConfig,
    pub slip: Option<SlipWindow>,
    pub variants: Vec<Variant>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    robot: String,
    controller: String,
    dt: f64,
    t_max: f64,
    eps: Option<f64>,
    settle_speed: Option<f64>,
    record_every: Option<i64>,
    field: FieldFile,
    start: Option<StartFile>,
    #[serde(default)]
    gains: Gains,
    params: Option<ParamsFile>,
    slip: Option<SlipFile>,
    #[serde(default)]
    variant: Vec<VariantFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    kind: String,
    map: Option<String>,
    bc: Option<String>,
    normalize: Option<bool>,
    gain: Option<f64>,
    speed: Option<f64>,
    centering: Option<f64>,
    reference: Option<String>,
    amplitude: Option<f64>,
    period: Option<f64>,
    rise: Option<f64>,
    fall: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StartFile {
    x: Option<f64>,
    y: Option<f64>,
    theta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    mass: Option<f64>,
    wheel_radius: Option<f64>,
    width: Option<f64>,
    turn_sign: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlipFile {
    t_start: f64,
    t_end: f64,
    wheel: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VariantFile {
    controller: String,
    label: Option<String>,
    #[serde(default)]
    gains: Gains,
}

fn finite(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if finite(field, v)? > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be > 0, got {v}")))
    }
}

fn resolve_map(name: &str, base: Option<&Path>) -> Result<GridMap, ScenarioError> {
    if BUILTIN_MAPS.contains(&name) {
        return builtin_scenario(name).map_err(|source| ScenarioError::Map { name: name.into(), source });
    }
    let path = match base {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    };
    if !path.exists() && base.is_none() {
        return Err(invalid("field.map", format!("unknown map '{name}' (builtin maps: {})", BUILTIN_MAPS.join(", "))));
    }
    let text = std::fs::read_to_string(&path).map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
    text.parse().map_err(|source| ScenarioError::Map { name: path.display().to_string(), source })
}

fn parse_field(f: FieldFile, base: Option<&Path>) -> Result<FieldSpec, ScenarioError> {
    let reject = |present: &[(&str, bool)], kind: &str| -> Result<(), ScenarioError> {
        match present.iter().find(|(_, p)| *p) {
            Some((key, _)) => Err(invalid(format!("field.{key}"), format!("not used by field kind '{kind}'"))),
            None => Ok(()),
        }
    };
    match f.kind.as_str() {
        "harmonic" => {
            reject(
                &[
                    ("speed", f.speed.is_some()),
                    ("centering", f.centering.is_some()),
                    ("reference", f.reference.is_some()),
                    ("amplitude", f.amplitude.is_some()),
                    ("period", f.period.is_some()),
                    ("rise", f.rise.is_some()),
                    ("fall", f.fall.is_some()),
                ],
                "harmonic",
            )?;
            let name = f.map.ok_or_else(|| invalid("field.map", "required for harmonic fields"))?;
            let map = resolve_map(&name, base)?;
            let bc = match f.bc.as_deref().unwrap_or("dirichlet") {
                "dirichlet" => BoundaryMode::Dirichlet,
                "neumann" => BoundaryMode::Neumann,
                other => return Err(invalid("field.bc", format!("expected dirichlet or neumann, got '{other}'"))),
            };
            let gain = positive("field.gain", f.gain.unwrap_or(1.0))?;
            Ok(FieldSpec::Harmonic { map, map_name: name, bc, normalize: f.normalize.unwrap_or(false), gain })
        }
        "lane" => {
            reject(
                &[
                    ("map", f.map.is_some()),
                    ("bc", f.bc.is_some()),
                    ("normalize", f.normalize.is_some()),
                    ("gain", f.gain.is_some()),
                    ("reference", f.reference.is_some()),
                    ("amplitude", f.amplitude.is_some()),
                    ("period", f.period.is_some()),
                    ("rise", f.rise.is_some()),
                    ("fall", f.fall.is_some()),
                ],
                "lane",
            )?;
            Ok(FieldSpec::Lane {
                speed: positive("field.speed", f.speed.unwrap_or(1.0))?,
                centering: positive("field.centering", f.centering.unwrap_or(1.0))?,
            })
        }
        "tracking" => {
            reject(
                &[
                    ("map", f.map.is_some()),
                    ("bc", f.bc.is_some()),
                    ("normalize", f.normalize.is_some()),
                    ("centering", f.centering.is_some()),
                ],
                "tracking",
            )?;
            let reference = match f.reference.as_deref().unwrap_or("square_pulse") {
                "square_pulse" => {
                    if f.period.is_some() {
                        return Err(invalid("field.period", "not used by the square_pulse reference"));
                    }
                    let Reference::SquarePulse { rise, fall, amplitude } = Reference::square_pulse() else {
                        unreachable!()
                    };
                    let rise = finite("field.rise", f.rise.unwrap_or(rise))?;
                    let fall = finite("field.fall", f.fall.unwrap_or(fall))?;
                    if fall <= rise {
                        return Err(invalid("field.fall", format!("must be > rise ({rise}), got {fall}")));
                    }
                    Reference::SquarePulse {
                        rise,
                        fall,
                        amplitude: finite("field.amplitude", f.amplitude.unwrap_or(amplitude))?,
                    }
                }
                "sinusoid" => {
                    if let Some((key, _)) = [("rise", f.rise), ("fall", f.fall)].iter().find(|(_, v)| v.is_some()) {
                        return Err(invalid(format!("field.{key}"), "not used by the sinusoid reference"));
                    }
                    let Reference::Sinusoid { amplitude, period } = Reference::sinusoid() else { unreachable!() };
                    Reference::Sinusoid {
                        amplitude: finite("field.amplitude", f.amplitude.unwrap_or(amplitude))?,
                        period: positive("field.period", f.period.unwrap_or(period))?,
                    }
                }
                other => {
                    return Err(invalid("field.reference", format!("expected square_pulse or sinusoid, got '{other}'")))
                }
            };
            Ok(FieldSpec::Tracking {
                reference,
                speed: positive("field.speed", f.speed.unwrap_or(1.0))?,
                gain: positive("field.gain", f.gain.unwrap_or(1.0))?,
            })
        }
        other => Err(invalid("field.kind", format!("expected harmonic, lane or tracking, got '{other}'"))),
    }
}

fn parse_robot(kind: RobotKind, params: Option<ParamsFile>) -> Result<RobotModel, ScenarioError> {
    let p = match params {
        None => return Ok(default_robot(kind)),
        Some(p) => p,
    };
    match kind {
        RobotKind::Point => Err(invalid("params", "the point robot takes no parameters")),
        RobotKind::PointMass => {
            if let Some((key, _)) = [("wheel_radius", p.wheel_radius), ("width", p.width), ("turn_sign", p.turn_sign)]
                .iter()
                .find(|(_, v)| v.is_some())
            {
                return Err(invalid(format!("params.{key}"), "not used by robot 'point_mass'"));
            }
            Ok(RobotModel::PointMass { mass: positive("params.mass", p.mass.unwrap_or(1.0))? })
        }
        RobotKind::DiffDrive => {
            let d = DiffDriveParams::default();
            let turn_sign = finite("params.turn_sign", p.turn_sign.unwrap_or(d.turn_sign))?;
            if turn_sign.abs() != 1.0 {
                return Err(invalid("params.turn_sign", format!("must be 1 or -1, got {turn_sign}")));
            }
            Ok(RobotModel::DiffDrive(DiffDriveParams {
                wheel_radius: positive("params.wheel_radius", p.wheel_radius.unwrap_or(d.wheel_radius))?,
                width: positive("params.width", p.width.unwrap_or(d.width))?,
                mass: positive("params.mass", p.mass.unwrap_or(d.mass))?,
                turn_sign,
            }))
        }
    }
}

fn default_robot(kind: RobotKind) -> RobotModel {
    match kind {
        RobotKind::Point => RobotModel::Point,
        RobotKind::PointMass => RobotModel::PointMass { mass: 1.0 },
        RobotKind::DiffDrive => RobotModel::DiffDrive(DiffDriveParams::default()),
    }
}

/// Scenario files shipped with the crate, by name.
pub const SHIPPED_SCENARIOS: [(&str, &str); 16] = [
    ("fig2_gradient", include_str!("../../scenarios/fig2_gradient.scn")),
    ("fig4_linear", include_str!("../../scenarios/fig4_linear.scn")),
    ("fig5_linear_b1", include_str!("../../scenarios/fig5_linear_b1.scn")),
    ("fig7_nadf", include_str!("../../scenarios/fig7_nadf.scn")),
    ("fig9_sliding_mode", include_str!("../../scenarios/fig9_sliding_mode.scn")),
    ("nadf_vs_linear", include_str!("../../scenarios/nadf_vs_linear.scn")),
    ("fig14_lane_kinematic", include_str!("../../scenarios/fig14_lane_kinematic.scn")),
    ("fig15_undamped", include_str!("../../scenarios/fig15_undamped.scn")),
    ("fig17_linear", include_str!("../../scenarios/fig17_linear.scn")),
    ("fig18_direction", include_str!("../../scenarios/fig18_direction.scn")),
    ("fig19_joint", include_str!("../../scenarios/fig19_joint.scn")),
    ("fig17_19_compare", include_str!("../../scenarios/fig17_19_compare.scn")),
    ("fig20_tracking", include_str!("../../scenarios/fig20_tracking.scn")),
    ("fig21_joint_fast", include_str!("../../scenarios/fig21_joint_fast.scn")),
    ("fig22_joint", include_str!("../../scenarios/fig22_joint.scn")),
    ("slip_lane", include_str!("../../scenarios/slip_lane.scn")),
];

impl Scenario {
    /// Parses a scenario document. Relative map paths resolve against
    /// `base_dir` when given.
    pub fn from_toml(text: &str, base_dir: Option<&Path>) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
        let robot_kind = RobotKind::parse(&file.robot)?;
        let field = parse_field(file.field, base_dir)?;
        let robot = parse_robot(robot_kind, file.params)?;
        let controller = ControllerSpec::from_parts(robot_kind, &file.controller, &file.gains, "gains")?;

        positive("dt", file.dt)?;
        if finite("t_max", file.t_max)? < file.dt {
            return Err(invalid("t_max", format!("must be >= dt ({}), got {}", file.dt, file.t_max)));
        }
        let eps = file.eps.map(|e| positive("eps", e)).transpose()?;
        let settle_speed = file.settle_speed.map(|v| positive("settle_speed", v)).transpose()?;
        let record_every = match file.record_every {
            None => 1,
            Some(n) if n >= 1 => n as usize,
            Some(n) => return Err(invalid("record_every", format!("must be >= 1, got {n}"))),
        };
        let sim = SimConfig { dt: file.dt, t_max: file.t_max, arrival_eps: eps, settle_speed, record_every };

        let (start, theta) = match file.start {
            None => (None, 0.0),
            Some(s) => {
                let theta = finite("start.theta", s.theta.unwrap_or(0.0))?;
                let start = match (s.x, s.y) {
                    (Some(x), Some(y)) => Some(Vec2::new(finite("start.x", x)?, finite("start.y", y)?)),
                    (None, None) => None,
                    (None, Some(_)) => return Err(invalid("start.x", "required when start.y is given")),
                    (Some(_), None) => return Err(invalid("start.y", "required when start.x is given")),
                };
                (start, theta)
            }
        };
        match (&field, start) {
            (FieldSpec::Harmonic { map, .. }, None) if map.start().is_none() => {
                return Err(invalid("start", "map has no start cell; give start.x and start.y"));
            }
            (FieldSpec::Lane { .. } | FieldSpec::Tracking { .. }, None) => {
                return Err(invalid("start", "start.x and start.y are required without a map"));
            }
            _ => {}
        }
        if robot_kind != RobotKind::DiffDrive && theta != 0.0 {
            return Err(invalid("start.theta", format!("robot '{}' has no heading", robot_kind.name())));
        }

        let slip = match file.slip {
            None => None,
            Some(s) => {
                if !matches!(controller, ControllerSpec::Torque(_)) {
                    return Err(invalid("slip", "wheel slip needs a torque-controlled diff_drive robot"));
                }
                let wheel = match s.wheel.as_str() {
                    "R" | "right" => Wheel::Right,
                    "L" | "left" => Wheel::Left,
                    other => return Err(invalid("slip.wheel", format!("expected R or L, got '{other}'"))),
                };
                let t_start = finite("slip.t_start", s.t_start)?;
                let t_end = finite("slip.t_end", s.t_end)?;
                if t_start < 0.0 {
                    return Err(invalid("slip.t_start", format!("must be >= 0, got {t_start}")));
                }
                if t_end < t_start || t_end > file.t_max {
                    return Err(invalid("slip.t_end", format!("must lie in [t_start, t_max], got {t_end}")));
                }
                Some(SlipWindow { t_start, t_end, wheel })
            }
        };

        let mut variants = Vec::with_capacity(file.variant.len());
        for (i, v) in file.variant.into_iter().enumerate() {
            let controller =
                ControllerSpec::from_parts(robot_kind, &v.controller, &v.gains, &format!("variant[{i}].gains"))?;
            variants.push(Variant { label: v.label.unwrap_or_else(|| controller.label()), controller });
        }
        if slip.is_some() && variants.iter().any(|v| !matches!(v.controller, ControllerSpec::Torque(_))) {
            return Err(invalid("variant", "all variants must be torque controllers when slip is set"));
        }

        let scenario = Scenario {
            name: file.name.unwrap_or_else(|| "scenario".into()),
            field,
            robot,
            controller,
            start,
            theta,
            sim,
            slip,
            variants,
        };
        let p = scenario.start_point();
        if let Some(map) = scenario.field.map() {
            if !map.is_traversable_at(p) {
                return Err(invalid("start", format!("({}, {}) is not in free space", p.x, p.y)));
            }
        }
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.into(), source })?;
        Self::from_toml(&text, path.parent())
    }

    pub fn shipped(name: &str) -> Result<Self, ScenarioError> {
        let name = name.strip_suffix(".scn").unwrap_or(name);
        let (_, text) = SHIPPED_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| ScenarioError::UnknownShipped(name.into()))?;
        Self::from_toml(text, None)
    }

    /// Effective start position.
    pub fn start_point(&self) -> Vec2 {
        self.start
            .or_else(|| self.field.map().and_then(GridMap::start_point))
            .expect("validated scenarios always have a start")
    }

    /// The same scenario driven by another controller.
    pub fn with_controller(&self, controller: ControllerSpec) -> Self {
        Scenario { controller, variants: Vec::new(), ..self.clone() }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} / {})", self.name, self.robot.kind().name(), self.controller.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
robot = "point_mass"
controller = "nadf"
dt = 0.01
t_max = 10.0
[field]
kind = "harmonic"
map = "empty"
[gains]
bd = 2.5
"#;

    fn err_field(text: &str) -> String {
        match Scenario::from_toml(text, None) {
            Err(ScenarioError::Invalid { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn parses_minimal() {
        let s = Scenario::from_toml(BASE, None).unwrap();
        assert_eq!(s.controller, ControllerSpec::Holonomic(HolonomicLaw::Nadf { bd: 2.5 }));
        assert_eq!(s.robot, RobotModel::PointMass { mass: 1.0 });
        assert_eq!(s.start_point(), s.field.map().unwrap().start_point().unwrap());
    }

    #[test]
    fn field_precise_errors() {
        assert_eq!(err_field(&BASE.replace("dt = 0.01", "dt = 0.0")), "dt");
        assert_eq!(err_field(&BASE.replace("dt = 0.01", "dt = -1.0")), "dt");
        assert_eq!(err_field(&BASE.replace("t_max = 10.0", "t_max = 0.001")), "t_max");
        assert_eq!(err_field(&BASE.replace("bd = 2.5", "bd = -1.0")), "gains.bd");
        assert_eq!(err_field(&BASE.replace("bd = 2.5", "b = 1.0")), "gains.b");
        assert_eq!(err_field(&BASE.replace("controller = \"nadf\"", "controller = \"joint_sensitive\"")), "controller");
        assert_eq!(err_field(&BASE.replace("map = \"empty\"", "map = \"nowhere\"")), "field.map");
        assert_eq!(err_field(&BASE.replace("kind = \"harmonic\"", "kind = \"vortex\"")), "field.kind");
        assert_eq!(err_field(&format!("{BASE}[start]\nx = 0.0\ny = 0.0\n")), "start");
        assert_eq!(err_field(&format!("{BASE}[slip]\nt_start = 1.0\nt_end = 2.0\nwheel = \"L\"\n")), "slip");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = Scenario::from_toml(&format!("colour = 1\n{BASE}"), None).unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax(ref m) if m.contains("colour")), "{err}");
    }

    #[test]
    fn inline_gains() {
        let g = Gains::parse_inline("kp=2, kd=0.5").unwrap();
        assert_eq!((g.kp, g.kd), (Some(2.0), Some(0.5)));
        assert!(Gains::parse_inline("kp").is_err());
        assert!(Gains::parse_inline("zz=1").is_err());
    }

    #[test]
    fn every_shipped_scenario_parses() {
        for (name, _) in SHIPPED_SCENARIOS {
            let s = Scenario::shipped(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
        }
        assert!(matches!(Scenario::shipped("nope"), Err(ScenarioError::UnknownShipped(_))));
    }
}
