//! Discrete Laplace boundary-value problem on a [`GridMap`].
//!
//! Five-point stencil in double precision. Under Dirichlet settings the
//! obstacle cells carry a fixed potential; under homogeneous Neumann settings
//! obstacle faces mirror the adjacent free value (ghost cells), which turns
//! the stencil into the mean over non-obstacle neighbors, and the start cell
//! is pinned to fix the additive constant.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::gridmap::{Cell, CellLabel, GridMap};
use crate::{Vec2, WorldPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("map has no free cells to solve for")]
    NoFreeCells,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),
    #[error("Neumann boundary settings need a start cell `S` in the map")]
    MissingStart,
    #[error("solver hit the iteration cap ({iterations}) with residual {residual:e} > tolerance {tolerance:e}")]
    NotConverged { iterations: usize, residual: f64, tolerance: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("point ({x}, {y}) is outside the grid")]
    OutOfBounds { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies in an obstacle cell")]
    InObstacle { x: f64, y: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCondition {
    pub mode: BoundaryMode,
    /// Potential of obstacle cells (Dirichlet only).
    pub obstacle_value: f64,
    pub target_value: f64,
    /// Potential of the start cell (Neumann only).
    pub start_value: f64,
}

impl BoundaryCondition {
    pub fn dirichlet() -> Self {
        Self { mode: BoundaryMode::Dirichlet, obstacle_value: 1.0, target_value: 0.0, start_value: 1.0 }
    }

    pub fn neumann() -> Self {
        Self { mode: BoundaryMode::Neumann, ..Self::dirichlet() }
    }

    pub fn new(mode: BoundaryMode) -> Self {
        match mode {
            BoundaryMode::Dirichlet => Self::dirichlet(),
            BoundaryMode::Neumann => Self::neumann(),
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        let values = [self.obstacle_value, self.target_value, self.start_value];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::InvalidBoundary("boundary values must be finite".into()));
        }
        match self.mode {
            BoundaryMode::Dirichlet if self.obstacle_value <= self.target_value => Err(SolveError::InvalidBoundary(
                "obstacle_value must exceed target_value so descent leads to the target".into(),
            )),
            BoundaryMode::Neumann if self.start_value <= self.target_value => Err(SolveError::InvalidBoundary(
                "start_value must exceed target_value so descent leads to the target".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl Default for BoundaryCondition {
    fn default() -> Self {
        Self::dirichlet()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Jacobi,
    /// Lexicographic sweep, sequential.
    GaussSeidel,
    /// Red-black over-relaxation; each color updates independently so
    /// sweeps can be split across workers without changing the result.
    Sor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub method: SolverMethod,
    /// Over-relaxation factor, used by [`SolverMethod::Sor`] only.
    pub relaxation: f64,
    /// Stop once the max absolute stencil residual drops to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Worker threads for parallel sweeps; 0 uses the global rayon pool.
    pub workers: usize,
    /// Record the residual every this many iterations.
    pub history_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolverMethod::Sor,
            relaxation: 1.9,
            tolerance: 1e-12,
            max_iterations: 200_000,
            workers: 0,
            history_stride: 100,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), SolveError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SolveError::InvalidConfig(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if self.method == SolverMethod::Sor && !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(SolveError::InvalidConfig(format!(
                "SOR relaxation must lie in (0, 2), got {}",
                self.relaxation
            )));
        }
        if self.history_stride == 0 {
            return Err(SolveError::InvalidConfig("history_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Converged (or iteration-capped) potential over a grid.
#[derive(Clone, Debug)]
pub struct PotentialField {
    values: Vec<f64>,
    map: GridMap,
    bc: BoundaryCondition,
    iterations_used: usize,
    final_residual: f64,
    converged: bool,
    residual_history: Vec<f64>,
    tolerance: f64,
}

/// Per-cell update rule for the relaxation sweeps.
#[derive(Clone, Copy)]
enum Node {
    Fixed,
    /// Weights on the (left, right, down, up) neighbors.
    Free([f64; 4]),
}

struct Stencil {
    width: usize,
    nodes: Vec<Node>,
}

impl Stencil {
    fn build(map: &GridMap, bc: &BoundaryCondition) -> Self {
        let w = map.width();
        let labels = map.labels();
        let nodes = map
            .cells()
            .map(|(cell, label)| {
                let pinned = matches!(
                    (bc.mode, label),
                    (_, CellLabel::Obstacle | CellLabel::Target) | (BoundaryMode::Neumann, CellLabel::Start)
                );
                if pinned {
                    return Node::Fixed;
                }
                match bc.mode {
                    BoundaryMode::Dirichlet => Node::Free([0.25; 4]),
                    BoundaryMode::Neumann => {
                        let k = map.index(cell);
                        let open = [k - 1, k + 1, k - w, k + w].map(|n| labels[n].is_traversable());
                        let count = open.iter().filter(|&&o| o).count();
                        if count == 0 {
                            Node::Fixed
                        } else {
                            Node::Free(open.map(|o| if o { 1.0 / count as f64 } else { 0.0 }))
                        }
                    }
                }
            })
            .collect();
        Self { width: w, nodes }
    }

    #[inline]
    fn mean(&self, v: &[f64], k: usize, wts: &[f64; 4]) -> f64 {
        let w = self.width;
        wts[0] * v[k - 1] + wts[1] * v[k + 1] + wts[2] * v[k - w] + wts[3] * v[k + w]
    }

    fn row_residual(&self, v: &[f64], row: usize) -> f64 {
        let w = self.width;
        (row * w..(row + 1) * w).fold(0.0_f64, |acc, k| match &self.nodes[k] {
            Node::Free(wts) => acc.max((self.mean(v, k, wts) - v[k]).abs()),
            Node::Fixed => acc,
        })
    }

    /// Writes the relaxed values of one row into `out`, reading only `cur`.
    /// Cells outside `color` (when given) are copied unchanged.
    fn relax_row(&self, cur: &[f64], out: &mut [f64], row: usize, omega: f64, color: Option<usize>) {
        let w = self.width;
        for (ix, slot) in out.iter_mut().enumerate() {
            let k = row * w + ix;
            *slot = match (&self.nodes[k], color) {
                (Node::Free(wts), c) if c.is_none_or(|c| (ix + row) % 2 == c) => {
                    cur[k] + omega * (self.mean(cur, k, wts) - cur[k])
                }
                _ => cur[k],
            };
        }
    }
}

struct Sweeper<'a> {
    stencil: &'a Stencil,
    pool: Option<rayon::ThreadPool>,
}

/// Grids smaller than this run sweeps on the calling thread.
const PARALLEL_MIN_CELLS: usize = 16_384;

impl Sweeper<'_> {
    fn pass(&self, cur: &[f64], next: &mut [f64], omega: f64, color: Option<usize>) {
        let w = self.stencil.width;
        let run = |next: &mut [f64]| match &self.pool {
            Some(_) => next
                .par_chunks_mut(w)
                .enumerate()
                .for_each(|(row, out)| self.stencil.relax_row(cur, out, row, omega, color)),
            None => next
                .chunks_mut(w)
                .enumerate()
                .for_each(|(row, out)| self.stencil.relax_row(cur, out, row, omega, color)),
        };
        match &self.pool {
            Some(pool) => pool.install(|| run(next)),
            None => run(next),
        }
    }

    fn residual(&self, v: &[f64]) -> f64 {
        let rows = v.len() / self.stencil.width;
        match &self.pool {
            Some(pool) => pool.install(|| {
                (0..rows).into_par_iter().map(|r| self.stencil.row_residual(v, r)).reduce(|| 0.0, f64::max)
            }),
            None => (0..rows).map(|r| self.stencil.row_residual(v, r)).fold(0.0, f64::max),
        }
    }
}

/// Solves the Laplace BVP on `map`.
///
/// Hitting `max_iterations` is not an error: the field is returned with
/// [`PotentialField::converged`] false. Use [`PotentialField::ensure_converged`]
/// to turn that into a [`SolveError::NotConverged`].
pub fn solve(map: &GridMap, bc: &BoundaryCondition, cfg: &SolverConfig) -> Result<PotentialField, SolveError> {
    cfg.validate()?;
    bc.validate()?;
    if map.count(CellLabel::Free) + map.count(CellLabel::Start) == 0 {
        return Err(SolveError::NoFreeCells);
    }
    if bc.mode == BoundaryMode::Neumann && map.start().is_none() {
        return Err(SolveError::MissingStart);
    }

    let stencil = Stencil::build(map, bc);
    let initial_free = match bc.mode {
        BoundaryMode::Dirichlet => bc.obstacle_value,
        BoundaryMode::Neumann => 0.5 * (bc.start_value + bc.target_value),
    };
    let mut cur: Vec<f64> = map
        .labels()
        .iter()
        .map(|label| match (bc.mode, label) {
            (_, CellLabel::Target) => bc.target_value,
            (BoundaryMode::Dirichlet, CellLabel::Obstacle) => bc.obstacle_value,
            (BoundaryMode::Neumann, CellLabel::Obstacle) => 0.0,
            (BoundaryMode::Neumann, CellLabel::Start) => bc.start_value,
            _ => initial_free,
        })
        .collect();
    let mut next = cur.clone();

    let pool = if cfg.workers == 1 || (cfg.workers == 0 && map.len() < PARALLEL_MIN_CELLS) {
        None
    } else {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|e| SolveError::InvalidConfig(format!("cannot start worker pool: {e}")))?,
        )
    };
    let sweeper = Sweeper { stencil: &stencil, pool };

    let mut residual = sweeper.residual(&cur);
    let mut history = vec![residual];
    let mut iterations = 0;
    while residual > cfg.tolerance && iterations < cfg.max_iterations {
        match cfg.method {
            SolverMethod::Jacobi => {
                sweeper.pass(&cur, &mut next, 1.0, None);
                std::mem::swap(&mut cur, &mut next);
            }
            SolverMethod::Sor => {
                for color in [0, 1] {
                    sweeper.pass(&cur, &mut next, cfg.relaxation, Some(color));
                    std::mem::swap(&mut cur, &mut next);
                }
            }
            SolverMethod::GaussSeidel => gauss_seidel_sweep(&stencil, &mut cur),
        }
        iterations += 1;
        residual = sweeper.residual(&cur);
        if iterations % cfg.history_stride == 0 {
            history.push(residual);
        }
    }

    if bc.mode == BoundaryMode::Neumann {
        fill_ghosts(map, &mut cur);
    }

    Ok(PotentialField {
        values: cur,
        map: map.clone(),
        bc: *bc,
        iterations_used: iterations,
        final_residual: residual,
        converged: residual <= cfg.tolerance,
        residual_history: history,
        tolerance: cfg.tolerance,
    })
}

fn gauss_seidel_sweep(stencil: &Stencil, v: &mut [f64]) {
    for k in 0..v.len() {
        if let Node::Free(wts) = &stencil.nodes[k] {
            v[k] = stencil.mean(v, k, wts);
        }
    }
}

/// Neumann obstacle cells get the mean of their already-valued 4-neighbors,
/// layer by layer outward from free space, so interpolation near walls sees
/// mirrored values (zero normal derivative at the face).
fn fill_ghosts(map: &GridMap, v: &mut [f64]) {
    let (w, h) = (map.width(), map.height());
    let mut known: Vec<bool> = map.labels().iter().map(|l| l.is_traversable()).collect();
    loop {
        let mut layer = Vec::new();
        for iy in 0..h {
            for ix in 0..w {
                let k = iy * w + ix;
                if known[k] {
                    continue;
                }
                let (sum, n) =
                    neighbors4(ix, iy, w, h).filter(|&n| known[n]).fold((0.0, 0usize), |(s, c), n| (s + v[n], c + 1));
                if n > 0 {
                    layer.push((k, sum / n as f64));
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        for (k, value) in layer {
            v[k] = value;
            known[k] = true;
        }
    }
}

fn neighbors4(ix: usize, iy: usize, w: usize, h: usize) -> impl Iterator<Item = usize> {
    let k = iy * w + ix;
    [(ix > 0).then(|| k - 1), (ix + 1 < w).then(|| k + 1), (iy > 0).then(|| k - w), (iy + 1 < h).then(|| k + w)]
        .into_iter()
        .flatten()
}

/// Catmull-Rom weights and their derivatives for a fractional offset `t`.
#[inline]
fn catmull_rom(t: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    let w = [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ];
    let dw = [
        0.5 * (-3.0 * t2 + 4.0 * t - 1.0),
        0.5 * (9.0 * t2 - 10.0 * t),
        0.5 * (-9.0 * t2 + 8.0 * t + 1.0),
        0.5 * (3.0 * t2 - 2.0 * t),
    ];
    (w, dw)
}

impl PotentialField {
    /// Wraps precomputed values (bottom row first) as a field, e.g. to
    /// analyze a synthetic potential with the same interpolation.
    pub fn from_values(map: GridMap, bc: BoundaryCondition, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), map.len(), "one value per cell");
        Self {
            values,
            map,
            bc,
            iterations_used: 0,
            final_residual: 0.0,
            converged: true,
            residual_history: Vec::new(),
            tolerance: 0.0,
        }
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, cell: Cell) -> f64 {
        self.values[self.map.index(cell)]
    }

    pub fn set_value(&mut self, cell: Cell, value: f64) {
        let k = self.map.index(cell);
        self.values[k] = value;
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Max absolute stencil residual after the last sweep.
    pub fn final_residual(&self) -> f64 {
        self.final_residual
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Residual at iteration 0 and then every `history_stride` iterations.
    pub fn residual_history(&self) -> &[f64] {
        &self.residual_history
    }

    pub fn ensure_converged(&self) -> Result<&Self, SolveError> {
        if self.converged {
            Ok(self)
        } else {
            Err(SolveError::NotConverged {
                iterations: self.iterations_used,
                residual: self.final_residual,
                tolerance: self.tolerance,
            })
        }
    }

    /// Max stencil residual recomputed from the stored values.
    pub fn max_residual(&self) -> f64 {
        let stencil = Stencil::build(&self.map, &self.bc);
        (0..self.map.height()).map(|r| stencil.row_residual(&self.values, r)).fold(0.0, f64::max)
    }

    #[inline]
    fn at(&self, ix: isize, iy: isize) -> f64 {
        let ix = ix.clamp(0, self.map.width() as isize - 1) as usize;
        let iy = iy.clamp(0, self.map.height() as isize - 1) as usize;
        self.values[iy * self.map.width() + ix]
    }

    /// Bicubic (Catmull-Rom) interpolant: value and gradient at `p`, with
    /// `p` clamped into the grid.
    ///
    /// At a cell center the gradient equals the central difference of the
    /// grid values; the interpolant is C1 and reproduces affine data exactly.
    pub(crate) fn sample(&self, p: WorldPoint) -> (f64, Vec2) {
        let g = self.map.to_grid(p);
        let gx = g.x.clamp(0.0, (self.map.width() - 1) as f64);
        let gy = g.y.clamp(0.0, (self.map.height() - 1) as f64);
        let (fx, fy) = (gx.floor(), gy.floor());
        let (i0, j0) = (fx as isize, fy as isize);
        let (wx, dwx) = catmull_rom(gx - fx);
        let (wy, dwy) = catmull_rom(gy - fy);

        let (mut value, mut ddx, mut ddy) = (0.0, 0.0, 0.0);
        for (b, (&wyb, &dwyb)) in wy.iter().zip(&dwy).enumerate() {
            let (mut row, mut drow) = (0.0, 0.0);
            for (a, (&wxa, &dwxa)) in wx.iter().zip(&dwx).enumerate() {
                let v = self.at(i0 + a as isize - 1, j0 + b as isize - 1);
                row += wxa * v;
                drow += dwxa * v;
            }
            value += wyb * row;
            ddx += wyb * drow;
            ddy += dwyb * row;
        }
        let h = self.map.cell_size();
        (value, Vec2::new(ddx / h, ddy / h))
    }

    fn check_domain(&self, p: WorldPoint) -> Result<(), FieldError> {
        match self.map.world_to_cell(p) {
            None => Err(FieldError::OutOfBounds { x: p.x, y: p.y }),
            Some(c) if !self.map.label(c).is_traversable() => Err(FieldError::InObstacle { x: p.x, y: p.y }),
            Some(_) => Ok(()),
        }
    }

    /// Interpolated potential at a point in free space.
    pub fn potential_at(&self, p: WorldPoint) -> Result<f64, FieldError> {
        self.check_domain(p)?;
        Ok(self.sample(p).0)
    }

    /// Interpolated gradient (potential per meter) at a point in free space.
    pub fn gradient_at(&self, p: WorldPoint) -> Result<Vec2, FieldError> {
        self.check_domain(p)?;
        Ok(self.sample(p).1)
    }

    /// Free cells other than the target whose value is strictly below every
    /// non-obstacle 4-neighbor. An empty list means gradient descent on the
    /// grid cannot stall before the target.
    pub fn spurious_minima(&self) -> Vec<Cell> {
        let map = &self.map;
        let (w, h) = (map.width(), map.height());
        map.cells()
            .filter(|&(_, l)| matches!(l, CellLabel::Free | CellLabel::Start))
            .filter(|&(c, _)| {
                let v = self.value(c);
                let mut open = neighbors4(c.ix, c.iy, w, h).filter(|&n| map.labels()[n].is_traversable()).peekable();
                open.peek().is_some() && open.all(|n| v < self.values[n])
            })
            .map(|(c, _)| c)
            .collect()
    }

    /// Writes the grid values as CSV, one line per grid row, top row first.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let w = self.map.width();
        for iy in (0..self.map.height()).rev() {
            let row: Vec<String> = self.values[iy * w..(iy + 1) * w].iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
