mod plot;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use hpfnav_core::experiments::{
    compare_controllers, run_scenario, ControllerSpec, Gains, RunMetrics, Scenario, ScenarioError, Variant,
};
use hpfnav_core::gridmap::{builtin_map_source, GridMap, BUILTIN_MAPS};
use hpfnav_core::guidance::{kinematic_trajectory, GuidanceField};
use hpfnav_core::potential::{solve, BoundaryCondition, BoundaryMode, SolverConfig, SolverMethod};
use hpfnav_core::report::sig9;
use hpfnav_core::{SimConfig, Trajectory, Vec2};

#[derive(Parser)]
#[command(name = "hpfnav", version, about = "Harmonic potential field navigation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Neumann,
}

impl From<Bc> for BoundaryMode {
    fn from(bc: Bc) -> Self {
        match bc {
            Bc::Dirichlet => BoundaryMode::Dirichlet,
            Bc::Neumann => BoundaryMode::Neumann,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sor,
    GaussSeidel,
    Jacobi,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "dirichlet")]
    bc: Bc,
    #[arg(long, value_enum, default_value = "sor")]
    method: Method,
    /// SOR relaxation factor, in (1, 2).
    #[arg(long, default_value_t = 1.9, value_parser = parse_omega)]
    omega: f64,
    /// Stop when the largest update falls below this.
    #[arg(long, default_value_t = 1e-12, value_parser = parse_positive)]
    tol: f64,
    #[arg(long, default_value_t = 200_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    /// Sweep threads; 0 picks automatically.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            method: match self.method {
                Method::Sor => SolverMethod::Sor,
                Method::GaussSeidel => SolverMethod::GaussSeidel,
                Method::Jacobi => SolverMethod::Jacobi,
            },
            relaxation: self.omega,
            tolerance: self.tol,
            max_iterations: self.max_iter as usize,
            workers: self.workers,
            ..SolverConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the potential on a map and write it as CSV.
    Solve {
        /// Map file, or the name of a builtin map.
        map: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "hpfnav-out")]
        out: PathBuf,
    },
    /// Kinematic gradient descent from the map's start (or --start).
    Plan {
        map: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Start position `x,y` in meters.
        #[arg(long, value_parser = parse_point)]
        start: Option<Vec2>,
        #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
        dt: f64,
        #[arg(long, default_value_t = 200.0, value_parser = parse_positive)]
        t_max: f64,
        /// Follow -grad V unscaled instead of its direction.
        #[arg(long)]
        raw: bool,
        #[arg(long, default_value = "hpfnav-out")]
        out: PathBuf,
    },
    /// Run a scenario file (or a shipped scenario by name).
    Sim {
        scenario: String,
        #[arg(long, default_value = "hpfnav-out")]
        out: PathBuf,
    },
    /// Run several controllers on the same scenario.
    Compare {
        scenario: String,
        /// `controller:key=value,...`; replaces the scenario's variant list.
        #[arg(long = "variant")]
        variants: Vec<String>,
        #[arg(long, default_value = "hpfnav-out")]
        out: PathBuf,
    },
    /// List the builtin maps; with --out, also write them as map files.
    Maps {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be > 0, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_omega(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 1.0 && v < 2.0 => Ok(v),
        Ok(v) => Err(format!("must lie in (1, 2), got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Vec2::new(x, y))
}

/// Why a command failed; decides the exit code.
enum Failure {
    /// Bad input: arguments, missing or malformed files. Exit 2.
    Usage(anyhow::Error),
    /// Valid input that could not be carried out. Exit 1.
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn load_map(arg: &str) -> Result<GridMap, Failure> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(usage)?
    } else {
        let name = arg.strip_suffix(".map").unwrap_or(arg);
        builtin_map_source(name)
            .ok_or_else(|| usage(anyhow!("{arg}: no such file (builtin maps: {})", BUILTIN_MAPS.join(", "))))?
            .to_string()
    };
    text.parse().with_context(|| format!("invalid map {arg}")).map_err(usage)
}

fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    let scenario = if path.exists() {
        Scenario::load(path)
    } else {
        match Scenario::shipped(arg) {
            Err(ScenarioError::UnknownShipped(_)) => {
                return Err(usage(anyhow!("{arg}: no such file or shipped scenario")));
            }
            other => other,
        }
    };
    scenario.with_context(|| format!("invalid scenario {arg}")).map_err(usage)
}

fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).expect("writing to memory");
    buf
}

fn metrics_text(title: &str, m: &RunMetrics) -> String {
    let opt = |v: Option<f64>| v.map(sig9).unwrap_or_else(|| "none".into());
    let mut s = String::new();
    let _ = writeln!(s, "scenario {title}");
    let _ = writeln!(s, "termination {}", m.termination);
    let _ = writeln!(s, "settling_time {}", opt(m.settling_time));
    let _ = writeln!(s, "overshoot {}", sig9(m.overshoot));
    let _ = writeln!(s, "min_clearance {}", opt(m.min_clearance));
    let _ = writeln!(s, "collided {}", m.collided);
    let _ = writeln!(s, "control_effort {}", sig9(m.control_effort));
    let _ = writeln!(s, "path_length {}", sig9(m.path_length));
    s
}

fn solve_field(map: &GridMap, args: &SolverArgs) -> Result<hpfnav_core::PotentialField, Failure> {
    let bc = BoundaryCondition::new(args.bc.into());
    let field = solve(map, &bc, &args.config()).map_err(usage)?;
    println!("iterations {}", field.iterations_used());
    println!("residual {}", sig9(field.final_residual()));
    println!("converged {}", field.converged());
    Ok(field)
}

fn cmd_solve(map: &str, args: &SolverArgs, out: &Path) -> Result<(), Failure> {
    let map = load_map(map)?;
    let field = solve_field(&map, args)?;
    let mut csv = Vec::new();
    field.write_csv(&mut csv)?;
    let path = write_file(out, "potential.csv", csv)?;
    let diag = format!(
        "iterations {}\nresidual {}\nconverged {}\nspurious_minima {}\n",
        field.iterations_used(),
        sig9(field.final_residual()),
        field.converged(),
        field.spurious_minima().len()
    );
    write_file(out, "solve.txt", diag)?;
    println!("wrote {}", path.display());
    field.ensure_converged()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_plan(
    map: &str,
    args: &SolverArgs,
    start: Option<Vec2>,
    dt: f64,
    t_max: f64,
    raw: bool,
    out: &Path,
) -> Result<(), Failure> {
    let map = load_map(map)?;
    let start = match start.or_else(|| map.start_point()) {
        Some(p) => p,
        None => return Err(usage(anyhow!("map has no start cell; pass --start x,y"))),
    };
    if t_max < dt {
        return Err(usage(anyhow!("--t-max must be >= --dt")));
    }
    let field = solve_field(&map, args)?;
    field.ensure_converged()?;
    let g = GuidanceField::Harmonic { field: Arc::new(field), normalize: !raw, gain: 1.0 };
    let traj = kinematic_trajectory(&g, start, &SimConfig::new(dt, t_max)).map_err(usage)?;
    let eps = SimConfig::new(dt, t_max).resolve_eps(&g, start).unwrap_or(0.0);
    let metrics = hpfnav_core::experiments::runner::compute_metrics(&traj, &g, eps);
    emit_run("plan", &traj, &g, &metrics, out)
}

fn emit_run(
    title: &str,
    traj: &Trajectory,
    g: &GuidanceField,
    metrics: &RunMetrics,
    out: &Path,
) -> Result<(), Failure> {
    let csv = write_file(out, "trajectory.csv", trajectory_csv(traj))?;
    let text = metrics_text(title, metrics);
    write_file(out, "metrics.txt", &text)?;
    let svg = write_file(out, "plot.svg", plot::render(traj, g))?;
    print!("{text}");
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}

fn cmd_sim(scenario: &str, out: &Path) -> Result<(), Failure> {
    let s = load_scenario(scenario)?;
    let run = run_scenario(&s)?;
    emit_run(&s.name, &run.trajectory, &run.guidance, &run.metrics, out)
}

fn parse_variant(spec: &str, s: &Scenario) -> Result<Variant, Failure> {
    let (name, gains) = spec.split_once(':').unwrap_or((spec, ""));
    let gains = Gains::parse_inline(gains).map_err(usage)?;
    let controller = ControllerSpec::from_parts(s.robot.kind(), name.trim(), &gains, "variant").map_err(usage)?;
    Ok(Variant { label: controller.label(), controller })
}

fn cmd_compare(scenario: &str, variants: &[String], out: &Path) -> Result<(), Failure> {
    let s = load_scenario(scenario)?;
    let variants = if variants.is_empty() {
        s.variants.clone()
    } else {
        variants.iter().map(|v| parse_variant(v, &s)).collect::<Result<Vec<_>, _>>()?
    };
    if variants.len() < 2 {
        return Err(usage(anyhow!("compare needs at least 2 variants, got {}", variants.len())));
    }
    let report = compare_controllers(&s, &variants)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let path = write_file(out, "comparison.csv", csv)?;
    print!("{}", report.to_table());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_maps(out: Option<&Path>) -> Result<(), Failure> {
    for name in BUILTIN_MAPS {
        let src = builtin_map_source(name).expect("listed builtin");
        let map: GridMap = src.parse()?;
        println!(
            "{name} {}x{} h={} free={} checksum={:016x}",
            map.width(),
            map.height(),
            sig9(map.cell_size()),
            map.len() - map.count(hpfnav_core::CellLabel::Obstacle),
            map.checksum()
        );
        if let Some(dir) = out {
            write_file(dir, &format!("{name}.map"), src)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { map, solver, out } => cmd_solve(map, solver, out),
        Command::Plan { map, solver, start, dt, t_max, raw, out } => {
            cmd_plan(map, solver, *start, *dt, *t_max, *raw, out)
        }
        Command::Sim { scenario, out } => cmd_sim(scenario, out),
        Command::Compare { scenario, variants, out } => cmd_compare(scenario, variants, out),
        Command::Maps { out } => cmd_maps(out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
