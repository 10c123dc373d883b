//! SVG rendering of a run: obstacles, path, start and target.

use std::fmt::Write as _;

use hpfnav_core::gridmap::{CellLabel, GridMap};
use hpfnav_core::guidance::GuidanceField;
use hpfnav_core::trajectory::Trajectory;
use hpfnav_core::Vec2;

const WIDTH_PX: f64 = 800.0;
const MARGIN_PX: f64 = 20.0;

struct Frame {
    lo: Vec2,
    hi: Vec2,
    scale: f64,
}

impl Frame {
    fn new(lo: Vec2, hi: Vec2) -> Self {
        let span = (hi - lo).map(|v| v.max(1e-9));
        Frame { lo, hi: lo + span, scale: (WIDTH_PX - 2.0 * MARGIN_PX) / span.x }
    }

    fn height_px(&self) -> f64 {
        (self.hi.y - self.lo.y) * self.scale + 2.0 * MARGIN_PX
    }

    /// World to pixel; y grows downward in SVG.
    fn px(&self, p: Vec2) -> (f64, f64) {
        (MARGIN_PX + (p.x - self.lo.x) * self.scale, MARGIN_PX + (self.hi.y - p.y) * self.scale)
    }
}

fn trajectory_bounds(traj: &Trajectory) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in traj.positions() {
        lo = lo.inf(&p);
        hi = hi.sup(&p);
    }
    let pad = Vec2::repeat(0.1 * (hi - lo).max().max(1.0));
    (lo - pad, hi + pad)
}

fn obstacles(svg: &mut String, frame: &Frame, map: &GridMap) {
    let h = map.cell_size();
    for (cell, label) in map.cells() {
        if label != CellLabel::Obstacle {
            continue;
        }
        let c = map.cell_center(cell);
        let (x, y) = frame.px(c + Vec2::new(-0.5 * h, 0.5 * h));
        let side = h * frame.scale;
        let _ = writeln!(svg, r##"<rect x="{x:.2}" y="{y:.2}" width="{side:.2}" height="{side:.2}" fill="#555"/>"##);
    }
}

fn reference_curve(svg: &mut String, frame: &Frame, g: &GuidanceField) {
    let n = 400;
    let points: Vec<String> = (0..=n)
        .map(|k| {
            let x = frame.lo.x + (frame.hi.x - frame.lo.x) * k as f64 / n as f64;
            // the reference is where the signed error vanishes
            let y = -g.signed_error(Vec2::new(x, 0.0)).unwrap_or(0.0);
            let (px, py) = frame.px(Vec2::new(x, y));
            format!("{px:.2},{py:.2}")
        })
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#999" stroke-dasharray="6 4" stroke-width="1.5"/>"##,
        points.join(" ")
    );
}

pub fn render(traj: &Trajectory, g: &GuidanceField) -> String {
    let frame = match g.map() {
        Some(map) => {
            let (lo, hi) = map.bounds();
            Frame::new(lo, hi)
        }
        None => {
            let (lo, hi) = trajectory_bounds(traj);
            Frame::new(lo, hi)
        }
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}">"#,
        WIDTH_PX,
        frame.height_px()
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    match g.map() {
        Some(map) => obstacles(&mut svg, &frame, map),
        None => reference_curve(&mut svg, &frame, g),
    }

    let points: Vec<String> = traj
        .positions()
        .map(|p| {
            let (x, y) = frame.px(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ =
        writeln!(svg, r##"<polyline points="{}" fill="none" stroke="#1f6fd1" stroke-width="2"/>"##, points.join(" "));

    let (sx, sy) = frame.px(traj.first().state.position());
    let _ = writeln!(svg, r##"<circle cx="{sx:.2}" cy="{sy:.2}" r="6" fill="#2a2"/>"##);
    if let Some(t) = g.target() {
        let (tx, ty) = frame.px(t);
        let _ = writeln!(svg, r##"<circle cx="{tx:.2}" cy="{ty:.2}" r="6" fill="#d22"/>"##);
    }
    svg.push_str("</svg>\n");
    svg
}
