//! Helpers and reference implementations shared by the integration tests.
#![allow(dead_code)]

use hpfnav_core::gridmap::{Cell, CellLabel, GridMap};
use hpfnav_core::potential::{BoundaryCondition, BoundaryMode};
use hpfnav_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random map with a closed border, obstacle density `p`, one target and
/// one start on free cells.
pub fn random_map(seed: u64, width: usize, height: usize, p: f64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<CellLabel> =
        (0..width * height).map(|_| if rng.random_bool(p) { CellLabel::Obstacle } else { CellLabel::Free }).collect();
    let interior: Vec<usize> = (0..width * height)
        .filter(|&k| k % width != 0 && k % width != width - 1 && k / width != 0 && k / width != height - 1)
        .collect();
    let t = interior[rng.random_range(0..interior.len())];
    let mut s = t;
    while s == t {
        s = interior[rng.random_range(0..interior.len())];
    }
    cells[t] = CellLabel::Target;
    cells[s] = CellLabel::Start;
    GridMap::from_labels(width, height, 1.0, Vec2::zeros(), cells).unwrap()
}

/// Free cells reachable from the target through 4-connected free cells.
pub fn connected_to_target(map: &GridMap) -> Vec<bool> {
    let w = map.width();
    let mut seen = vec![false; map.len()];
    let mut stack = vec![map.index(map.target())];
    seen[stack[0]] = true;
    while let Some(k) = stack.pop() {
        for n in [k - 1, k + 1, k - w, k + w] {
            if !seen[n] && map.labels()[n].is_traversable() {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    seen
}

/// Gaussian elimination with partial pivoting on a dense system.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-14, "singular system");
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[row][c] -= f * a[col][c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Exact solution of the discrete boundary-value problem, assembled
/// independently of the iterative solver. Returns one value per cell;
/// obstacle cells get the Dirichlet value (or NaN under Neumann).
pub fn direct_solution(map: &GridMap, bc: &BoundaryCondition) -> Vec<f64> {
    let w = map.width();
    let labels = map.labels();
    let pinned = |k: usize| match labels[k] {
        CellLabel::Obstacle | CellLabel::Target => true,
        CellLabel::Start => bc.mode == BoundaryMode::Neumann,
        CellLabel::Free => false,
    };
    let fixed_value = |k: usize| match labels[k] {
        CellLabel::Target => bc.target_value,
        CellLabel::Start => bc.start_value,
        _ => bc.obstacle_value,
    };
    let unknowns: Vec<usize> = (0..map.len()).filter(|&k| !pinned(k)).collect();
    let mut col = vec![usize::MAX; map.len()];
    for (i, &k) in unknowns.iter().enumerate() {
        col[k] = i;
    }
    let n = unknowns.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (i, &k) in unknowns.iter().enumerate() {
        let nbrs: Vec<usize> = [k - 1, k + 1, k - w, k + w]
            .into_iter()
            .filter(|&m| bc.mode == BoundaryMode::Dirichlet || labels[m].is_traversable())
            .collect();
        // count * V_k - sum V_n = 0
        a[i][i] = nbrs.len() as f64;
        for m in nbrs {
            if pinned(m) {
                b[i] += fixed_value(m);
            } else {
                a[i][col[m]] -= 1.0;
            }
        }
    }
    let x = dense_solve(a, b);
    (0..map.len())
        .map(|k| {
            if !pinned(k) {
                x[col[k]]
            } else if labels[k] == CellLabel::Obstacle && bc.mode == BoundaryMode::Neumann {
                f64::NAN
            } else {
                fixed_value(k)
            }
        })
        .collect()
}

/// Nearest obstacle distance by checking every obstacle cell.
pub fn brute_clearance(map: &GridMap, p: Vec2) -> f64 {
    map.cells()
        .filter(|(_, l)| *l == CellLabel::Obstacle)
        .map(|(c, _)| map.distance_to_cell(p, c))
        .fold(f64::INFINITY, f64::min)
}

/// Whether segment `a -> b` meets the open interior of the axis-aligned
/// square `[lo, hi]` (Liang-Barsky clipping with strict inequalities).
pub fn segment_hits_open_box(a: Vec2, b: Vec2, lo: Vec2, hi: Vec2) -> bool {
    let d = b - a;
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for axis in 0..2 {
        if d[axis] == 0.0 {
            if a[axis] <= lo[axis] || a[axis] >= hi[axis] {
                return false;
            }
        } else {
            let ta = (lo[axis] - a[axis]) / d[axis];
            let tb = (hi[axis] - a[axis]) / d[axis];
            t0 = t0.max(ta.min(tb));
            t1 = t1.min(ta.max(tb));
        }
    }
    t0 < t1
}

/// Segment collision by clipping against every obstacle cell.
pub fn brute_segment_collides(map: &GridMap, a: Vec2, b: Vec2) -> bool {
    let (lo, hi) = map.bounds();
    let inside = |p: Vec2| p.x >= lo.x && p.y >= lo.y && p.x <= hi.x && p.y <= hi.y;
    if !inside(a) || !inside(b) {
        return true;
    }
    let half = Vec2::repeat(0.5 * map.cell_size());
    map.cells().filter(|(_, l)| *l == CellLabel::Obstacle).any(|(c, _)| {
        let center = map.cell_center(c);
        segment_hits_open_box(a, b, center - half, center + half)
    })
}

pub fn free_cells(map: &GridMap) -> Vec<Cell> {
    map.cells().filter(|(_, l)| l.is_traversable()).map(|(c, _)| c).collect()
}
