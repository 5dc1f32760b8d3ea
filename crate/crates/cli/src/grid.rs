//! Classification of two-dimensional slices of Sym^2(C), as CSV and SVG.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use sectorial_core::geometry::{ComplexValue, SymPoint};
use sectorial_core::sector::{closed_form_reading, LocalModel, SectorLabel};

use crate::config::RunConfig;

/// Which plane to draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slice {
    /// `Im z1 = Im z2 = a`, coordinates `(Re z1, Re z2)`.
    ImFixed(f64),
    /// `z1 = b` real, coordinates the `z2` plane.
    Z1Fixed(f64),
}

impl FromStr for Slice {
    type Err = String;

    /// `im=<a>` or `z1=<b>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = s.split_once('=').ok_or_else(|| format!("slice `{s}` must look like im=<a> or z1=<b>"))?;
        let v: f64 = value.trim().parse().map_err(|_| format!("slice value `{value}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("slice value `{value}` is not finite"));
        }
        match kind.trim().to_ascii_lowercase().as_str() {
            "im" => Ok(Slice::ImFixed(v)),
            "z1" => Ok(Slice::Z1Fixed(v)),
            other => Err(format!("unknown slice kind `{other}` (expected im or z1)")),
        }
    }
}

impl Slice {
    fn point(&self, u: f64, v: f64) -> Option<SymPoint> {
        let (z1, z2) = match *self {
            Slice::ImFixed(a) => (ComplexValue::new(u, a), ComplexValue::new(v, a)),
            Slice::Z1Fixed(b) => (ComplexValue::new(b, 0.0), ComplexValue::new(u, v)),
        };
        SymPoint::new(z1, z2).ok()
    }

    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self {
            Slice::ImFixed(_) => ("Re z1", "Re z2"),
            Slice::Z1Fixed(_) => ("Re z2", "Im z2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub coord1: f64,
    pub coord2: f64,
    /// `None` when the classification failed.
    pub label: Option<SectorLabel>,
    /// `Re z0 + c`.
    pub a: f64,
    /// `Re z0 - c`.
    pub b: f64,
}

impl Cell {
    pub fn label_code(&self) -> &'static str {
        self.label.map(|l| l.code()).unwrap_or("ERROR")
    }
}

/// Grid of `n x n` cells with `coord1` varying fastest: row `j` holds the
/// cells at the `j`-th value of `coord2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceGrid {
    pub slice: Slice,
    pub n: usize,
    pub coords: Vec<f64>,
    pub cells: Vec<Cell>,
}

impl SliceGrid {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[j * self.n + i]
    }

    pub fn spacing(&self) -> f64 {
        if self.n > 1 {
            self.coords[1] - self.coords[0]
        } else {
            1.0
        }
    }
}

/// Evenly spaced axis over `[-half, half]`; a single point sits at the center.
pub fn axis(n: usize, half: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect()
}

fn classify_cell(slice: &Slice, u: f64, v: f64, model: &LocalModel) -> Cell {
    let reading = slice.point(u, v).and_then(|p| closed_form_reading(&p, model).ok());
    match reading {
        Some(r) => Cell { coord1: u, coord2: v, label: Some(r.label), a: r.a, b: r.b },
        None => Cell { coord1: u, coord2: v, label: None, a: f64::NAN, b: f64::NAN },
    }
}

pub fn classify_grid(cfg: &RunConfig, slice: Slice) -> SliceGrid {
    let n = cfg.grid;
    let coords = axis(n, cfg.extent * cfg.epsilon);
    let model = cfg.model();
    let cells = (0..n * n)
        .into_par_iter()
        .map(|idx| classify_cell(&slice, coords[idx % n], coords[idx / n], &model))
        .collect();
    SliceGrid { slice, n, coords, cells }
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.5e}")
    }
}

pub const CSV_HEADER: &str = "coord1,coord2,label,re_z0_plus_c,re_z0_minus_c";

pub fn to_csv(grid: &SliceGrid) -> String {
    let mut out = String::with_capacity(64 * grid.cells.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in &grid.cells {
        let _ = writeln!(out, "{},{},{},{},{}", sig6(c.coord1), sig6(c.coord2), c.label_code(), sig6(c.a), sig6(c.b));
    }
    out
}

pub fn label_color(code: &str) -> &'static str {
    match code {
        "U--" => "#4575b4",
        "U-+" => "#fee090",
        "U++" => "#d73027",
        "H-" => "#313695",
        "H+" => "#a50026",
        "UNRESOLVED" => "#999999",
        _ => "#000000",
    }
}

const PLOT_SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Crossings of the zero level of `field` through the grid, as segments in
/// grid index coordinates.
pub fn zero_contour<F>(n: usize, field: F) -> Vec<[(f64, f64); 2]>
where
    F: Fn(usize, usize) -> f64,
{
    let mut segs = Vec::new();
    if n < 2 {
        return segs;
    }
    let cross = |p: (f64, f64), q: (f64, f64), vp: f64, vq: f64| {
        let t = vp / (vp - vq);
        (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
    };
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let (x0, y0, x1, y1) = (i as f64, j as f64, i as f64 + 1.0, j as f64 + 1.0);
            let corners = [
                ((x0, y0), field(i, j)),
                ((x1, y0), field(i + 1, j)),
                ((x1, y1), field(i + 1, j + 1)),
                ((x0, y1), field(i, j + 1)),
            ];
            if corners.iter().any(|(_, v)| !v.is_finite()) {
                continue;
            }
            let mut pts = Vec::with_capacity(4);
            for k in 0..4 {
                let ((p, vp), (q, vq)) = (corners[k], corners[(k + 1) % 4]);
                if (vp < 0.0) != (vq < 0.0) {
                    pts.push(cross(p, q, vp, vq));
                }
            }
            match pts.len() {
                2 => segs.push([pts[0], pts[1]]),
                4 => {
                    // saddle cell: the center joins corners 0 and 2 or cuts them off
                    let center = corners.iter().map(|(_, v)| v).sum::<f64>() / 4.0;
                    if (center < 0.0) == (corners[0].1 < 0.0) {
                        segs.push([pts[0], pts[1]]);
                        segs.push([pts[2], pts[3]]);
                    } else {
                        segs.push([pts[0], pts[3]]);
                        segs.push([pts[1], pts[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

/// Filled cells (merged along rows) with the zero sets of `Re z0 + c` and
/// `Re z0 - c` stroked on top.
pub fn to_svg(grid: &SliceGrid) -> String {
    let n = grid.n;
    let cell = PLOT_SIZE / n as f64;
    let total = PLOT_SIZE + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let (xa, ya) = grid.slice.axis_names();
    let title = match grid.slice {
        Slice::ImFixed(a) => format!("Im z1 = Im z2 = {a}"),
        Slice::Z1Fixed(b) => format!("z1 = {b}"),
    };
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for j in 0..n {
        let y = MARGIN + (n - 1 - j) as f64 * cell;
        let mut i = 0;
        while i < n {
            let code = grid.cell(i, j).label_code();
            let start = i;
            while i < n && grid.cell(i, j).label_code() == code {
                i += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}" data-label="{}" data-row="{}" data-cols="{}-{}"/>"#,
                MARGIN + start as f64 * cell,
                y,
                (i - start) as f64 * cell,
                cell,
                label_color(code),
                code,
                j,
                start,
                i - 1
            );
        }
    }
    let _ = writeln!(out, "</g>");
    // grid index -> pixel, cell centers at index + 1/2
    let px = |p: (f64, f64)| (MARGIN + (p.0 + 0.5) * cell, MARGIN + (n as f64 - 0.5 - p.1) * cell);
    for (id, color, which) in [("h-minus", "#000000", 0usize), ("h-plus", "#ffffff", 1)] {
        let segs = zero_contour(n, |i, j| {
            let c = grid.cell(i, j);
            if which == 0 {
                c.a
            } else {
                c.b
            }
        });
        let mut d = String::new();
        for [p, q] in segs {
            let (p, q) = (px(p), px(q));
            let _ = write!(d, "M{:.3} {:.3}L{:.3} {:.3}", p.0, p.1, q.0, q.1);
        }
        let _ = writeln!(out, r#"<path id="{id}" fill="none" stroke="{color}" stroke-width="1.5" d="{d}"/>"#);
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{xa}</text>"#,
        MARGIN + PLOT_SIZE / 2.0,
        total - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 14 {})">{ya}</text>"#,
        MARGIN + PLOT_SIZE / 2.0,
        MARGIN + PLOT_SIZE / 2.0
    );
    out.push_str("</svg>\n");
    out
}
