//! Reflection across the planes `Π_t = {x_1 = t}` and the order relation
//! `B ≤ A` between surfaces in `R³`.
//!
//! `B ≤ A` means: along every line parallel to `e_1`, the largest `x_1`
//! of `B` is at most the smallest `x_1` of `A`. For triangulated surfaces
//! the lines are taken on a square lattice in the `(x_2, x_3)` plane and
//! intersected exactly with every triangle, so the comparison is the
//! defining one, restricted to finitely many lines. Bare point sets have no
//! lines to intersect; they are binned into square cells of the lattice
//! instead and compared cell by cell. Every report names the method used.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GraphSample;

pub type P3 = [f64; 3];

/// Points in `R³`, optionally joined into triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloudSurface {
    points: Vec<P3>,
    triangles: Vec<[usize; 3]>,
}

impl PointCloudSurface {
    pub fn from_points(points: Vec<P3>) -> Result<Self> {
        Self::from_mesh(points, Vec::new())
    }

    pub fn from_mesh(points: Vec<P3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("point cloud has non-finite coordinates".into()));
        }
        if triangles.iter().flatten().any(|&i| i >= points.len()) {
            return Err(Error::Invalid("triangle refers to a missing point".into()));
        }
        Ok(Self { points, triangles })
    }

    /// The graph `(x, y, u(x, y))` of a two-dimensional sample, with two
    /// triangles per grid cell whose corners all carry a finite height.
    pub fn from_graph(sample: &GraphSample) -> Result<Self> {
        let grid = sample.grid();
        if grid.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: grid.dim() });
        }
        let u = sample.heights();
        let mut index = vec![usize::MAX; grid.len()];
        let mut points = Vec::new();
        for i in 0..grid.len() {
            if u[i].is_finite() {
                let x = grid.point(i);
                index[i] = points.len();
                points.push([x[0], x[1], u[i]]);
            }
        }
        let [nx, ny] = [grid.counts()[0], grid.counts()[1]];
        let mut triangles = Vec::new();
        for a in 0..nx - 1 {
            for b in 0..ny - 1 {
                let c = [
                    index[grid.flat_index(&[a, b])],
                    index[grid.flat_index(&[a + 1, b])],
                    index[grid.flat_index(&[a + 1, b + 1])],
                    index[grid.flat_index(&[a, b + 1])],
                ];
                if c.iter().all(|&k| k != usize::MAX) {
                    triangles.push([c[0], c[1], c[2]]);
                    triangles.push([c[0], c[2], c[3]]);
                }
            }
        }
        Self::from_mesh(points, triangles)
    }

    /// `x_1 = f(x_2, x_3)` over a grid in the `(x_2, x_3)` plane: a graph
    /// over `Π`.
    pub fn from_graph_over_plane(sample: &GraphSample) -> Result<Self> {
        let mut s = Self::from_graph(sample)?;
        for p in &mut s.points {
            *p = [p[2], p[0], p[1]];
        }
        Ok(s)
    }

    /// Vertical cylinder `S¹(radius) × [0, height]` around the `x_3` axis.
    pub fn cylinder(radius: f64, height: f64, around: usize, along: usize) -> Result<Self> {
        if !(radius > 0.0 && height > 0.0) || around < 3 || along < 2 {
            return Err(Error::Invalid("cylinder needs positive size, ≥3 angular and ≥2 axial samples".into()));
        }
        let mut points = Vec::with_capacity(around * along);
        for k in 0..along {
            let z = height * k as f64 / (along - 1) as f64;
            for j in 0..around {
                let (s, c) = (2.0 * std::f64::consts::PI * j as f64 / around as f64).sin_cos();
                points.push([radius * c, radius * s, z]);
            }
        }
        let mut triangles = Vec::new();
        for k in 0..along - 1 {
            for j in 0..around {
                let (a, b) = (k * around + j, k * around + (j + 1) % around);
                let (c, d) = (a + around, b + around);
                triangles.push([a, b, d]);
                triangles.push([a, d, c]);
            }
        }
        Self::from_mesh(points, triangles)
    }

    pub fn points(&self) -> &[P3] {
        &self.points
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_meshed(&self) -> bool {
        !self.triangles.is_empty()
    }

    /// Rotation about the vertical `x_3` axis.
    pub fn rotated_about_vertical(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let points = self.points.iter().map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]).collect();
        Self { points, triangles: self.triangles.clone() }
    }

    /// Largest distance between two bounding-box corners.
    pub fn diameter(&self) -> f64 {
        bbox_diameter(self.points.iter())
    }

    fn median_spacing(&self) -> f64 {
        let mut lens: Vec<f64> = if self.is_meshed() {
            self.triangles
                .iter()
                .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
                .map(|(a, b)| dist(&self.points[a], &self.points[b]))
                .filter(|d| *d > 0.0)
                .collect()
        } else {
            // pitch of a uniform sampling of the projected bounding box
            let (lo, hi) = bbox(self.points.iter());
            let area = ((hi[1] - lo[1]) * (hi[2] - lo[2])).max(f64::MIN_POSITIVE);
            vec![(area / self.points.len().max(1) as f64).sqrt()]
        };
        if lens.is_empty() {
            return 0.0;
        }
        lens.sort_by(f64::total_cmp);
        lens[lens.len() / 2]
    }

    /// Part with `x_1 ≤ t` (`left`) or `x_1 ≥ t`. Triangles crossing `Π_t`
    /// are clipped to it.
    pub fn half(&self, t: f64, left: bool) -> Self {
        let keep = |x: f64| if left { x <= t } else { x >= t };
        if !self.is_meshed() {
            return Self { points: self.points.iter().copied().filter(|p| keep(p[0])).collect(), triangles: Vec::new() };
        }
        let mut points = Vec::new();
        let mut triangles = Vec::new();
        for tri in &self.triangles {
            let poly = clip(&[self.points[tri[0]], self.points[tri[1]], self.points[tri[2]]], t, left);
            if poly.len() < 3 {
                continue;
            }
            let base = points.len();
            points.extend_from_slice(&poly);
            for k in 1..poly.len() - 1 {
                triangles.push([base, base + k, base + k + 1]);
            }
        }
        Self { points, triangles }
    }

    /// Mirror image under `x_1 ↦ 2t - x_1`.
    pub fn reflect(&self, t: f64) -> Self {
        Self { points: self.points.iter().map(|p| [2.0 * t - p[0], p[1], p[2]]).collect(), triangles: self.triangles.clone() }
    }
}

fn dist(a: &P3, b: &P3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn bbox<'a>(pts: impl Iterator<Item = &'a P3>) -> (P3, P3) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn bbox_diameter<'a>(pts: impl Iterator<Item = &'a P3>) -> f64 {
    let (lo, hi) = bbox(pts);
    if lo[0] > hi[0] {
        0.0
    } else {
        dist(&lo, &hi)
    }
}

/// Sutherland–Hodgman clip of a polygon against `x_1 ≤ t` or `x_1 ≥ t`.
fn clip(poly: &[P3], t: f64, left: bool) -> Vec<P3> {
    let inside = |p: &P3| if left { p[0] <= t } else { p[0] >= t };
    let mut out = Vec::with_capacity(4);
    for i in 0..poly.len() {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        let (ia, ib) = (inside(a), inside(b));
        if ia {
            out.push(*a);
        }
        if ia != ib {
            let s = (t - a[0]) / (b[0] - a[0]);
            out.push([t, a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])]);
        }
    }
    out
}

/// `(Σ_-(t), Σ_+^*(t))`: the part left of `Π_t`, and the part right of it
/// reflected across `Π_t`.
pub fn split_and_reflect(s: &PointCloudSurface, t: f64) -> (PointCloudSurface, PointCloudSurface) {
    (s.half(t, true), s.half(t, false).reflect(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMethod {
    /// Exact intersection of lattice lines with triangles.
    LatticeLines,
    /// Binning of bare points into lattice cells.
    Cells,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OrderOptions {
    /// Lattice spacing; default twice the median sampling pitch.
    pub cell_size: Option<f64>,
    /// Default `1e-6` times the diameter of both sets.
    pub tolerance: Option<f64>,
}

/// `sup_B x_1 - inf_A x_1` along one lattice line or in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberGap {
    pub x2: f64,
    pub x3: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub holds: bool,
    /// Largest gap, `None` when no line meets both sets.
    pub worst_gap: Option<f64>,
    pub worst_at: Option<[f64; 2]>,
    pub compared: usize,
    pub method: OrderMethod,
    pub cell_size: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub fibers: Vec<FiberGap>,
}

impl ReflectionReport {
    /// CSV `x2,x3,gap` over every compared line or cell.
    pub fn heatmap_csv(&self) -> String {
        let mut out = String::from("x2,x3,gap\n");
        for f in &self.fibers {
            out.push_str(&format!("{:e},{:e},{:e}\n", f.x2, f.x3, f.gap));
        }
        out
    }
}

type Extremes = HashMap<(i64, i64), f64>;

fn lattice_extremes(s: &PointCloudSurface, cell: f64, take_max: bool) -> Extremes {
    let mut acc: Extremes = HashMap::new();
    let mut update = |key: (i64, i64), x: f64| {
        acc.entry(key)
            .and_modify(|v| *v = if take_max { v.max(x) } else { v.min(x) })
            .or_insert(x);
    };
    if !s.is_meshed() {
        for p in &s.points {
            update(((p[1] / cell).floor() as i64, (p[2] / cell).floor() as i64), p[0]);
        }
        return acc;
    }
    for tri in &s.triangles {
        let [a, b, c] = [s.points[tri[0]], s.points[tri[1]], s.points[tri[2]]];
        let det = (b[1] - a[1]) * (c[2] - a[2]) - (c[1] - a[1]) * (b[2] - a[2]);
        let scale = (b[1] - a[1]).abs().max((c[1] - a[1]).abs()).max((b[2] - a[2]).abs()).max((c[2] - a[2]).abs());
        if det.abs() <= 1e-14 * scale * scale || scale == 0.0 {
            continue;
        }
        let (lo2, hi2) = (a[1].min(b[1]).min(c[1]), a[1].max(b[1]).max(c[1]));
        let (lo3, hi3) = (a[2].min(b[2]).min(c[2]), a[2].max(b[2]).max(c[2]));
        let eps = 1e-12;
        for i in (lo2 / cell).ceil() as i64..=(hi2 / cell).floor() as i64 {
            for j in (lo3 / cell).ceil() as i64..=(hi3 / cell).floor() as i64 {
                let (y, z) = (i as f64 * cell, j as f64 * cell);
                let wb = ((y - a[1]) * (c[2] - a[2]) - (c[1] - a[1]) * (z - a[2])) / det;
                let wc = ((b[1] - a[1]) * (z - a[2]) - (y - a[1]) * (b[2] - a[2])) / det;
                let wa = 1.0 - wb - wc;
                if wa >= -eps && wb >= -eps && wc >= -eps {
                    update((i, j), wa * a[0] + wb * b[0] + wc * c[0]);
                }
            }
        }
    }
    acc
}

/// Whether `B ≤ A`.
pub fn order_leq(b: &PointCloudSurface, a: &PointCloudSurface, opts: &OrderOptions) -> Result<ReflectionReport> {
    let method = if a.is_meshed() && b.is_meshed() { OrderMethod::LatticeLines } else { OrderMethod::Cells };
    let (a, b) = match method {
        OrderMethod::LatticeLines => (a.clone(), b.clone()),
        // a mesh compared with bare points contributes its vertices
        OrderMethod::Cells => (
            PointCloudSurface { points: a.points.clone(), triangles: Vec::new() },
            PointCloudSurface { points: b.points.clone(), triangles: Vec::new() },
        ),
    };
    let cell = match opts.cell_size {
        Some(c) => c,
        None => 2.0 * a.median_spacing().max(b.median_spacing()),
    };
    if !(cell > 0.0 && cell.is_finite()) {
        if a.points.is_empty() || b.points.is_empty() {
            return Ok(empty_report(method, 0.0, opts.tolerance.unwrap_or(0.0)));
        }
        return Err(Error::Invalid(format!("cell size {cell} must be positive")));
    }
    let tol = opts.tolerance.unwrap_or_else(|| 1e-6 * bbox_diameter(a.points.iter().chain(&b.points)));
    let sup_b = lattice_extremes(&b, cell, true);
    let inf_a = lattice_extremes(&a, cell, false);
    let mut report = empty_report(method, cell, tol);
    let mut keys: Vec<&(i64, i64)> = sup_b.keys().filter(|k| inf_a.contains_key(k)).collect();
    keys.sort();
    for key in keys {
        let gap = sup_b[key] - inf_a[key];
        let (x2, x3) = match method {
            OrderMethod::LatticeLines => (key.0 as f64 * cell, key.1 as f64 * cell),
            OrderMethod::Cells => ((key.0 as f64 + 0.5) * cell, (key.1 as f64 + 0.5) * cell),
        };
        if report.worst_gap.is_none_or(|w| gap > w) {
            report.worst_gap = Some(gap);
            report.worst_at = Some([x2, x3]);
        }
        report.fibers.push(FiberGap { x2, x3, gap });
    }
    report.compared = report.fibers.len();
    report.holds = report.worst_gap.is_none_or(|w| w <= tol);
    Ok(report)
}

fn empty_report(method: OrderMethod, cell: f64, tol: f64) -> ReflectionReport {
    ReflectionReport {
        t: None,
        holds: true,
        worst_gap: None,
        worst_at: None,
        compared: 0,
        method,
        cell_size: cell,
        tolerance: tol,
        fibers: Vec::new(),
    }
}

/// `Σ_-(t) ≤ Σ_+^*(t)` for every `t` in the grid.
pub fn symmetry_scan(s: &PointCloudSurface, t_grid: &[f64], opts: &OrderOptions) -> Result<Vec<ReflectionReport>> {
    let opts = OrderOptions {
        cell_size: Some(opts.cell_size.unwrap_or_else(|| 2.0 * s.median_spacing())),
        tolerance: Some(opts.tolerance.unwrap_or_else(|| 1e-6 * s.diameter())),
    };
    t_grid
        .iter()
        .map(|&t| {
            let (minus, plus) = split_and_reflect(s, t);
            let mut r = order_leq(&minus, &plus, &opts)?;
            r.t = Some(t);
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContactLocation {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouchReport {
    /// Vertical shift `t*` such that `upper + t*` first touches `lower`.
    pub shift: f64,
    /// Horizontal coordinates of the contact points.
    pub contact: Vec<Vec<f64>>,
    pub degenerate: bool,
    /// Location of the first contact point.
    pub location: ContactLocation,
    pub compared: usize,
    pub contact_tolerance: f64,
}

/// Moves `upper` down from far above until it first touches `lower`.
///
/// Both samples must live on the same grid. `t* = -min(upper - lower)`
/// over the points where both heights are finite. Points within
/// `contact_tolerance` of the minimum form the contact set; more than one
/// is reported as degenerate contact.
pub fn first_touch_shift(lower: &GraphSample, upper: &GraphSample, contact_tolerance: Option<f64>) -> Result<TouchReport> {
    if lower.grid() != upper.grid() {
        return Err(Error::Invalid("touching samples must share a grid".into()));
    }
    let grid = lower.grid();
    let (lo, up) = (lower.heights(), upper.heights());
    let both = |i: usize| lo[i].is_finite() && up[i].is_finite();
    let diffs: Vec<(usize, f64)> = (0..grid.len()).filter(|&i| both(i)).map(|i| (i, up[i] - lo[i])).collect();
    let Some(min) = diffs.iter().map(|d| d.1).min_by(f64::total_cmp) else {
        return Err(Error::NoOverlap);
    };
    let scale = diffs.iter().map(|d| d.1.abs()).fold(1.0, f64::max);
    let tol = contact_tolerance.unwrap_or(1e-9 * scale);
    let contact_idx: Vec<usize> = diffs.iter().filter(|d| d.1 - min <= tol).map(|d| d.0).collect();
    let first = contact_idx[0];
    let on_edge = (0..grid.dim()).any(|axis| {
        [-1, 1].iter().any(|&o| grid.neighbour(first, axis, o).is_none_or(|j| !both(j)))
    });
    Ok(TouchReport {
        shift: -min + 0.0,
        contact: contact_idx.iter().map(|&i| grid.point(i)).collect(),
        degenerate: contact_idx.len() > 1,
        location: if on_edge { ContactLocation::Boundary } else { ContactLocation::Interior },
        compared: diffs.len(),
        contact_tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;

    fn plane(x1: f64) -> PointCloudSurface {
        let g = GraphSample::from_function(Grid::cube(2, 1.0, 11).unwrap(), move |_| x1).unwrap();
        PointCloudSurface::from_graph_over_plane(&g).unwrap()
    }

    #[test]
    fn single_point_reflection() {
        let s = PointCloudSurface::from_points(vec![[3.0, 0.0, 0.0]]).unwrap();
        let (minus, plus) = split_and_reflect(&s, 1.0);
        assert!(minus.points().is_empty());
        assert_eq!(plus.points(), &[[-1.0, 0.0, 0.0]]);
    }

    #[test]
    fn parallel_planes_are_ordered() {
        let r = order_leq(&plane(0.0), &plane(1.0), &OrderOptions::default()).unwrap();
        assert!(r.holds && r.compared >= 25, "{r:?}");
        assert!((r.worst_gap.unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(r.method, OrderMethod::LatticeLines);
        let back = order_leq(&plane(1.0), &plane(0.0), &OrderOptions::default()).unwrap();
        assert!(!back.holds);
    }

    #[test]
    fn reflexive_with_zero_gap() {
        let g = GraphSample::from_function(Grid::cube(2, 1.0, 15).unwrap(), |x| (x[0] * 2.0).sin() + x[1] * x[1]).unwrap();
        let s = PointCloudSurface::from_graph_over_plane(&g).unwrap();
        let r = order_leq(&s, &s, &OrderOptions::default()).unwrap();
        assert!(r.holds && r.worst_gap.unwrap().abs() < 1e-12);
    }

    #[test]
    fn clipping_preserves_area_split() {
        let cyl = PointCloudSurface::cylinder(1.0, 1.0, 64, 3).unwrap();
        let (minus, plus) = split_and_reflect(&cyl, 0.2);
        assert!(minus.points().iter().all(|p| p[0] <= 0.2));
        assert!(plus.points().iter().all(|p| p[0] <= 0.2 + 1e-15));
        let r = symmetry_scan(&cyl, &[0.0, 0.1, 0.5, 0.9], &OrderOptions::default()).unwrap();
        assert!(r.iter().all(|r| r.holds), "{r:?}");
    }

    #[test]
    fn cells_for_bare_points() {
        let pts = [[0.0, 0.1, 0.1], [2.0, 0.1, 0.1]];
        let b = PointCloudSurface::from_points(vec![pts[0]]).unwrap();
        let a = PointCloudSurface::from_points(vec![pts[1]]).unwrap();
        let r = order_leq(&b, &a, &OrderOptions { cell_size: Some(1.0), tolerance: None }).unwrap();
        assert_eq!(r.method, OrderMethod::Cells);
        assert!(r.holds && r.compared == 1);
    }

    #[test]
    fn shifted_graph_touches_everywhere() {
        let g = GraphSample::from_function(Grid::cube(2, 1.0, 9).unwrap(), |x| x[0] * x[0] + x[1]).unwrap();
        let t = first_touch_shift(&g, &g.shifted(3.0), None).unwrap();
        assert!((t.shift + 3.0).abs() < 1e-12);
        assert!(t.degenerate && t.contact.len() == 81);
    }

    #[test]
    fn perturbed_graph_touches_at_origin() {
        let grid = Grid::cube(2, 1.0, 21).unwrap();
        let upper = GraphSample::from_function(grid.clone(), |x| (x[0] * x[0] + x[1] * x[1]).cosh()).unwrap();
        let lower = GraphSample::from_function(grid, |x| (x[0] * x[0] + x[1] * x[1]).cosh() - 0.01 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let t = first_touch_shift(&lower, &upper, None).unwrap();
        assert_eq!(t.shift, 0.0);
        assert!(!t.degenerate);
        assert_eq!(t.contact[0], vec![0.0, 0.0]);
        assert_eq!(t.location, ContactLocation::Interior);
    }

    #[test]
    fn disjoint_domains_do_not_overlap() {
        let grid = Grid::cube(2, 1.0, 5).unwrap();
        let a = GraphSample::from_function(grid.clone(), |x| if x[0] < 0.0 { 0.0 } else { f64::NAN }).unwrap();
        let b = GraphSample::from_function(grid, |x| if x[0] > 0.0 { 0.0 } else { f64::NAN }).unwrap();
        assert_eq!(first_touch_shift(&a, &b, None), Err(Error::NoOverlap));
    }
}
