//! Occupancy grid workspace: free space, obstacles, start and target cells.
//!
//! Cells are addressed as `(ix, iy)` with `iy = 0` at the bottom (minimum y).
//! The ASCII map format lists rows top-down, so row 0 of a file is the
//! highest `iy`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::{Vec2, WorldPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("missing header line `h=<cell_size_m>`")]
    MissingHeader,
    #[error("invalid cell size `{0}`: must be a finite number > 0")]
    InvalidCellSize(String),
    #[error("map has no rows")]
    Empty,
    #[error("non-rectangular map: row {row} has {found} columns, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("unknown character {ch:?} at row {row}, column {col}")]
    UnknownCharacter { ch: char, row: usize, col: usize },
    #[error("map has no target cell `T`")]
    NoTarget,
    #[error("multiple targets: found {0} `T` cells")]
    MultipleTargets(usize),
    #[error("multiple starts: found {0} `S` cells")]
    MultipleStarts(usize),
    #[error("map must be at least 3x3 cells, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("unknown builtin map `{0}` (expected one of: cluttered_room, corridor, empty)")]
    UnknownBuiltin(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellLabel {
    Free,
    Obstacle,
    Target,
    Start,
}

impl CellLabel {
    /// Target and start cells are free space for motion purposes.
    pub fn is_traversable(self) -> bool {
        self != CellLabel::Obstacle
    }

    pub fn to_char(self) -> char {
        match self {
            CellLabel::Free => '.',
            CellLabel::Obstacle => '#',
            CellLabel::Target => 'T',
            CellLabel::Start => 'S',
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            '.' => Some(CellLabel::Free),
            '#' => Some(CellLabel::Obstacle),
            'T' => Some(CellLabel::Target),
            'S' => Some(CellLabel::Start),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub ix: usize,
    pub iy: usize,
}

impl Cell {
    pub const fn new(ix: usize, iy: usize) -> Self {
        Self { ix, iy }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ix, self.iy)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    cell_size: f64,
    origin: WorldPoint,
    cells: Vec<CellLabel>,
    target: Cell,
    start: Option<Cell>,
}

impl GridMap {
    /// Builds a map from labels stored bottom row first (`iy = 0` first).
    ///
    /// The outermost ring is forced to [`CellLabel::Obstacle`] so the
    /// workspace boundary always exists; the label invariants are checked
    /// after that.
    pub fn from_labels(
        width: usize,
        height: usize,
        cell_size: f64,
        origin: WorldPoint,
        mut cells: Vec<CellLabel>,
    ) -> Result<Self, MapError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(MapError::InvalidCellSize(cell_size.to_string()));
        }
        if width < 3 || height < 3 {
            return Err(MapError::TooSmall { width, height });
        }
        assert_eq!(cells.len(), width * height, "label count must equal width * height");
        for iy in 0..height {
            for ix in 0..width {
                if ix == 0 || iy == 0 || ix + 1 == width || iy + 1 == height {
                    cells[iy * width + ix] = CellLabel::Obstacle;
                }
            }
        }
        let find = |label| {
            cells.iter().enumerate().filter(move |(_, &c)| c == label).map(|(k, _)| Cell::new(k % width, k / width))
        };
        let targets: Vec<Cell> = find(CellLabel::Target).collect();
        let target = match targets.len() {
            0 => return Err(MapError::NoTarget),
            1 => targets[0],
            n => return Err(MapError::MultipleTargets(n)),
        };
        let starts: Vec<Cell> = find(CellLabel::Start).collect();
        if starts.len() > 1 {
            return Err(MapError::MultipleStarts(starts.len()));
        }
        Ok(Self { width, height, cell_size, origin, cells, target, start: starts.first().copied() })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// World coordinate of the center of cell (0, 0).
    pub fn origin(&self) -> WorldPoint {
        self.origin
    }

    pub fn target(&self) -> Cell {
        self.target
    }

    pub fn start(&self) -> Option<Cell> {
        self.start
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        cell.iy * self.width + cell.ix
    }

    #[inline]
    pub fn label(&self, cell: Cell) -> CellLabel {
        self.cells[self.index(cell)]
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.cells
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, CellLabel)> + '_ {
        self.cells.iter().enumerate().map(move |(k, &l)| (Cell::new(k % self.width, k / self.width), l))
    }

    pub fn count(&self, label: CellLabel) -> usize {
        self.cells.iter().filter(|&&c| c == label).count()
    }

    pub fn cell_center(&self, cell: Cell) -> WorldPoint {
        self.origin + Vec2::new(cell.ix as f64, cell.iy as f64) * self.cell_size
    }

    pub fn target_point(&self) -> WorldPoint {
        self.cell_center(self.target)
    }

    pub fn start_point(&self) -> Option<WorldPoint> {
        self.start.map(|c| self.cell_center(c))
    }

    /// World-space extent `(min, max)` of the grid, cell faces included.
    pub fn bounds(&self) -> (WorldPoint, WorldPoint) {
        let half = Vec2::repeat(0.5 * self.cell_size);
        let far = Vec2::new((self.width - 1) as f64, (self.height - 1) as f64) * self.cell_size;
        (self.origin - half, self.origin + far + half)
    }

    /// Continuous cell-space coordinates: cell `(ix, iy)` spans
    /// `[ix - 0.5, ix + 0.5)` on each axis.
    #[inline]
    pub(crate) fn to_grid(&self, p: WorldPoint) -> Vec2 {
        (p - self.origin) / self.cell_size
    }

    /// Nearest cell center; points on a face between two cells go to the
    /// lower index. `None` when the point lies outside the grid.
    pub fn world_to_cell(&self, p: WorldPoint) -> Option<Cell> {
        let g = self.to_grid(p);
        let ix = nearest_lower(g.x, self.width)?;
        let iy = nearest_lower(g.y, self.height)?;
        Some(Cell::new(ix, iy))
    }

    pub fn is_traversable_at(&self, p: WorldPoint) -> bool {
        self.world_to_cell(p).is_some_and(|c| self.label(c).is_traversable())
    }

    /// True iff the segment `a -> b` passes through the interior of an
    /// obstacle cell or leaves the grid.
    ///
    /// Walks every cell the segment crosses (grid traversal, no sampling
    /// gaps). Touching a cell only at a face or corner does not count as
    /// entering it.
    pub fn segment_collides(&self, a: WorldPoint, b: WorldPoint) -> bool {
        let ga = self.to_grid(a) + Vec2::repeat(0.5);
        let gb = self.to_grid(b) + Vec2::repeat(0.5);
        let d = gb - ga;

        if d.x == 0.0 && d.y == 0.0 {
            return !self.is_traversable_at(a);
        }

        let first = |u: f64, du: f64| {
            if du < 0.0 {
                u.ceil() - 1.0
            } else {
                u.floor()
            }
        };
        let mut cx = first(ga.x, d.x);
        let mut cy = first(ga.y, d.y);

        let axis = |u: f64, du: f64, c: f64| -> (f64, f64, f64) {
            if du > 0.0 {
                (1.0, (c + 1.0 - u) / du, 1.0 / du)
            } else if du < 0.0 {
                (-1.0, (c - u) / du, -1.0 / du)
            } else {
                (0.0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (sx, mut tx, dtx) = axis(ga.x, d.x, cx);
        let (sy, mut ty, dty) = axis(ga.y, d.y, cy);

        loop {
            if self.blocked(cx, cy) {
                return true;
            }
            let t = tx.min(ty);
            if t >= 1.0 {
                return false;
            }
            if tx == ty {
                // exact corner crossing: move diagonally, the side cells are only touched
                cx += sx;
                cy += sy;
                tx += dtx;
                ty += dty;
            } else if tx < ty {
                cx += sx;
                tx += dtx;
            } else {
                cy += sy;
                ty += dty;
            }
        }
    }

    fn blocked(&self, cx: f64, cy: f64) -> bool {
        if cx < 0.0 || cy < 0.0 || cx >= self.width as f64 || cy >= self.height as f64 {
            return true;
        }
        !self.label(Cell::new(cx as usize, cy as usize)).is_traversable()
    }

    /// Euclidean distance from `p` to the nearest obstacle cell (its closed
    /// square). Zero inside an obstacle or outside the grid.
    ///
    /// Searches square rings of cells around `p`, stopping once no ring can
    /// beat the best distance found.
    pub fn clearance_at(&self, p: WorldPoint) -> f64 {
        let Some(c) = self.world_to_cell(p) else {
            return 0.0;
        };
        if !self.label(c).is_traversable() {
            return 0.0;
        }
        let (w, h) = (self.width as isize, self.height as isize);
        let (cx, cy) = (c.ix as isize, c.iy as isize);
        let mut best = f64::INFINITY;
        let max_ring = w.max(h);
        for r in 1..=max_ring {
            // any cell in ring r is at least (r - 1) cells away from p's cell faces
            if ((r - 1) as f64) * self.cell_size > best {
                break;
            }
            for (ix, iy) in ring(cx, cy, r) {
                if ix < 0 || iy < 0 || ix >= w || iy >= h {
                    continue;
                }
                let cell = Cell::new(ix as usize, iy as usize);
                if self.label(cell).is_traversable() {
                    continue;
                }
                best = best.min(self.distance_to_cell(p, cell));
            }
        }
        best
    }

    /// Distance from `p` to the closed square of `cell`.
    pub fn distance_to_cell(&self, p: WorldPoint, cell: Cell) -> f64 {
        let center = self.cell_center(cell);
        let half = 0.5 * self.cell_size;
        let dx = ((p.x - center.x).abs() - half).max(0.0);
        let dy = ((p.y - center.y).abs() - half).max(0.0);
        dx.hypot(dy)
    }

    /// ASCII form accepted by [`GridMap::from_str`].
    pub fn to_ascii(&self) -> String {
        let mut out = format!("h={}\n", self.cell_size);
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                out.push(self.label(Cell::new(ix, iy)).to_char());
            }
            out.push('\n');
        }
        out
    }

    /// FNV-1a hash of the ASCII form; pins the shipped map assets.
    pub fn checksum(&self) -> u64 {
        self.to_ascii()
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325_u64, |acc, b| (acc ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
    }
}

/// Index of the nearest cell center along one axis, ties to the lower index.
fn nearest_lower(g: f64, n: usize) -> Option<usize> {
    if !g.is_finite() {
        return None;
    }
    let c = (g - 0.5).ceil();
    if c < 0.0 || c >= n as f64 {
        // g in [-0.5, 0) maps to -0.0 which passes; anything below is out
        return None;
    }
    Some(c as usize)
}

fn ring(cx: isize, cy: isize, r: isize) -> impl Iterator<Item = (isize, isize)> {
    let horizontal = (-r..=r).flat_map(move |dx| [(cx + dx, cy - r), (cx + dx, cy + r)]);
    let vertical = (-r + 1..r).flat_map(move |dy| [(cx - r, cy + dy), (cx + r, cy + dy)]);
    horizontal.chain(vertical)
}

impl FromStr for GridMap {
    type Err = MapError;

    /// Parses the ASCII map format: a `h=<cell_size_m>` header line followed
    /// by rows of `#`, `.`, `T`, `S`, top row first. The origin is placed at
    /// the world point (0, 0).
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(MapError::MissingHeader)?;
        let value = header.trim().strip_prefix("h=").ok_or(MapError::MissingHeader)?;
        let cell_size: f64 = value.trim().parse().map_err(|_| MapError::InvalidCellSize(value.trim().to_string()))?;
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(MapError::InvalidCellSize(value.trim().to_string()));
        }

        let mut rows: Vec<Vec<CellLabel>> = Vec::new();
        for (row, line) in lines.enumerate() {
            let labels = line
                .chars()
                .enumerate()
                .map(|(col, ch)| CellLabel::from_char(ch).ok_or(MapError::UnknownCharacter { ch, row, col }))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = rows.first() {
                if labels.len() != first.len() {
                    return Err(MapError::Ragged { row, found: labels.len(), expected: first.len() });
                }
            }
            rows.push(labels);
        }
        if rows.is_empty() {
            return Err(MapError::Empty);
        }
        let (width, height) = (rows[0].len(), rows.len());
        let cells = rows.into_iter().rev().flatten().collect();
        GridMap::from_labels(width, height, cell_size, WorldPoint::zeros(), cells)
    }
}

pub fn load_map(text: &str) -> Result<GridMap, MapError> {
    text.parse()
}

pub const BUILTIN_MAPS: [&str; 3] = ["cluttered_room", "corridor", "empty"];

/// Version tag of the shipped map assets; bump when any asset changes.
pub const BUILTIN_MAPS_VERSION: u32 = 1;

pub fn builtin_map_source(name: &str) -> Option<&'static str> {
    match name {
        "cluttered_room" => Some(include_str!("../maps/cluttered_room.map")),
        "corridor" => Some(include_str!("../maps/corridor.map")),
        "empty" => Some(include_str!("../maps/empty.map")),
        _ => None,
    }
}

pub fn builtin_scenario(name: &str) -> Result<GridMap, MapError> {
    builtin_map_source(name).ok_or_else(|| MapError::UnknownBuiltin(name.to_string()))?.parse()
}
