use serde::{Deserialize, Serialize};

use super::{Grid, LocalGeometry, Sampled};
use crate::error::{Error, Result};
use crate::linalg::spd_inverse;

type V3 = [f64; 3];

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn lin(terms: &[(f64, &V3)]) -> V3 {
    let mut out = [0.0; 3];
    for (c, v) in terms {
        for k in 0..3 {
            out[k] += c * v[k];
        }
    }
    out
}

/// Position and its first and second parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub x: V3,
    pub d1: [V3; 2],
    /// `[X_ss, X_st, X_tt]`.
    pub d2: [V3; 3],
}

/// A parametrization of a surface in `R³` by two parameters.
pub trait Chart {
    fn position(&self, s: [f64; 2]) -> V3;
    /// Exact derivatives, when the chart has them.
    fn jet(&self, _s: [f64; 2]) -> Option<ChartJet> {
        None
    }
    /// `±1`: the sign that turns `X_s × X_t` into the normal for which the
    /// surface has positive curvatures where it is convex.
    fn orientation(&self) -> f64;
}

impl<C: Chart + ?Sized> Chart for &C {
    fn position(&self, s: [f64; 2]) -> V3 {
        (**self).position(s)
    }
    fn jet(&self, s: [f64; 2]) -> Option<ChartJet> {
        (**self).jet(s)
    }
    fn orientation(&self) -> f64 {
        (**self).orientation()
    }
}

/// Latitude–longitude chart `(θ, φ)` of the ellipsoid with semi-axes
/// `(a, b, c)`, inward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub axes: V3,
    pub center: V3,
}

impl Ellipsoid {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !([a, b, c].iter().all(|x| x.is_finite() && *x > 0.0)) {
            return Err(Error::Invalid(format!("ellipsoid axes must be positive, got ({a}, {b}, {c})")));
        }
        Ok(Self { axes: [a, b, c], center: [0.0; 3] })
    }

    /// Parameter box avoiding the coordinate singularities at the poles.
    pub fn parameter_grid(&self, pole_gap: f64, count: usize) -> Result<Grid> {
        Grid::new(
            vec![pole_gap, 0.0],
            vec![std::f64::consts::PI - pole_gap, 2.0 * std::f64::consts::PI],
            vec![count, 2 * count - 1],
        )
    }

    /// Closed-form Gaussian and mean (sum of principal) curvatures at a
    /// point of the surface.
    pub fn curvature_invariants(&self, p: V3) -> (f64, f64) {
        let [a, b, c] = self.axes;
        let q = [p[0] - self.center[0], p[1] - self.center[1], p[2] - self.center[2]];
        let s = q[0] * q[0] / a.powi(4) + q[1] * q[1] / b.powi(4) + q[2] * q[2] / c.powi(4);
        let abc2 = (a * b * c).powi(2);
        let gauss = 1.0 / (abc2 * s * s);
        let mean = (a * a + b * b + c * c - dot(&q, &q)) / (abc2 * s.powf(1.5));
        (gauss, mean)
    }
}

impl Chart for Ellipsoid {
    fn position(&self, s: [f64; 2]) -> V3 {
        self.jet(s).unwrap().x
    }

    fn jet(&self, s: [f64; 2]) -> Option<ChartJet> {
        let [a, b, c] = self.axes;
        let (st, ct) = s[0].sin_cos();
        let (sp, cp) = s[1].sin_cos();
        let o = self.center;
        Some(ChartJet {
            x: [o[0] + a * st * cp, o[1] + b * st * sp, o[2] + c * ct],
            d1: [[a * ct * cp, b * ct * sp, -c * st], [-a * st * sp, b * st * cp, 0.0]],
            d2: [
                [-a * st * cp, -b * st * sp, -c * ct],
                [-a * ct * sp, b * ct * cp, 0.0],
                [-a * st * cp, -b * st * sp, 0.0],
            ],
        })
    }

    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// Round sphere as a latitude–longitude chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere(pub Ellipsoid);

impl Sphere {
    pub fn new(radius: f64, center: V3) -> Result<Self> {
        let mut e = Ellipsoid::new(radius, radius, radius)?;
        e.center = center;
        Ok(Self(e))
    }

    pub fn parameter_grid(&self, pole_gap: f64, count: usize) -> Result<Grid> {
        self.0.parameter_grid(pole_gap, count)
    }
}

impl Chart for Sphere {
    fn position(&self, s: [f64; 2]) -> V3 {
        self.0.position(s)
    }
    fn jet(&self, s: [f64; 2]) -> Option<ChartJet> {
        self.0.jet(s)
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// Upper half of an ellipsoid as a graph over `(x, y)`, inward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidCap(pub Ellipsoid);

impl Chart for EllipsoidCap {
    fn position(&self, s: [f64; 2]) -> V3 {
        self.jet(s).map_or([f64::NAN; 3], |j| j.x)
    }

    fn jet(&self, s: [f64; 2]) -> Option<ChartJet> {
        let [a, b, c] = self.0.axes;
        let o = self.0.center;
        let (x, y) = (s[0], s[1]);
        let q = 1.0 - x * x / (a * a) - y * y / (b * b);
        if !(q > 0.0) {
            return None;
        }
        let rq = q.sqrt();
        let z = c * rq;
        let zx = -c * x / (a * a * rq);
        let zy = -c * y / (b * b * rq);
        let q3 = q * rq;
        let zxx = -c / (a * a * rq) - c * x * x / (a.powi(4) * q3);
        let zyy = -c / (b * b * rq) - c * y * y / (b.powi(4) * q3);
        let zxy = -c * x * y / (a * a * b * b * q3);
        Some(ChartJet {
            x: [o[0] + x, o[1] + y, o[2] + z],
            d1: [[1.0, 0.0, zx], [0.0, 1.0, zy]],
            d2: [[0.0, 0.0, zxx], [0.0, 0.0, zxy], [0.0, 0.0, zyy]],
        })
    }

    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// `p ↦ R p + t` applied to another chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion<C> {
    pub chart: C,
    pub rotation: [V3; 3],
    pub translation: V3,
}

impl<C: Chart> RigidMotion<C> {
    /// Rotation by `angle` about `axis` (Rodrigues), then translation.
    pub fn new(chart: C, axis: V3, angle: f64, translation: V3) -> Result<Self> {
        let norm = dot(&axis, &axis).sqrt();
        if !(norm > 0.0 && norm.is_finite() && angle.is_finite()) {
            return Err(Error::Invalid("rotation axis must be a non-zero finite vector".into()));
        }
        let k = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        let (s, c) = angle.sin_cos();
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let kx = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]][i][j];
                r[i][j] = c * delta + s * kx + (1.0 - c) * k[i] * k[j];
            }
        }
        Ok(Self { chart, rotation: r, translation })
    }

    fn rotate(&self, v: &V3) -> V3 {
        let r = &self.rotation;
        [dot(&r[0], v), dot(&r[1], v), dot(&r[2], v)]
    }
}

impl<C: Chart> Chart for RigidMotion<C> {
    fn position(&self, s: [f64; 2]) -> V3 {
        let p = self.rotate(&self.chart.position(s));
        [p[0] + self.translation[0], p[1] + self.translation[1], p[2] + self.translation[2]]
    }

    fn jet(&self, s: [f64; 2]) -> Option<ChartJet> {
        let j = self.chart.jet(s)?;
        let p = self.rotate(&j.x);
        Some(ChartJet {
            x: [p[0] + self.translation[0], p[1] + self.translation[1], p[2] + self.translation[2]],
            d1: [self.rotate(&j.d1[0]), self.rotate(&j.d1[1])],
            d2: [self.rotate(&j.d2[0]), self.rotate(&j.d2[1]), self.rotate(&j.d2[2])],
        })
    }

    fn orientation(&self) -> f64 {
        self.chart.orientation()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceMode {
    /// Exact chart derivatives; Christoffel symbols from `⟨X_ij, X_l⟩`.
    Analytic,
    /// Central differences of positions; Christoffel symbols from finite
    /// differences of the metric.
    FiniteDifference,
}

/// A parametric surface sampled on a parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    grid: Grid,
    mode: SurfaceMode,
    positions: Vec<V3>,
    points: Vec<Option<SurfacePoint>>,
}

/// Sampled data at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub normal: V3,
    pub local: LocalGeometry,
}

fn metric(d1: &[V3; 2]) -> [f64; 4] {
    let g01 = dot(&d1[0], &d1[1]);
    [dot(&d1[0], &d1[0]), g01, g01, dot(&d1[1], &d1[1])]
}

/// Assembles the local geometry from position derivatives and Christoffel
/// symbols `gamma[k][i][j]`.
fn assemble(d1: &[V3; 2], d2: &[V3; 3], christoffel: [[[f64; 2]; 2]; 2], orientation: f64) -> Option<SurfacePoint> {
    let g = metric(d1);
    let c = cross(&d1[0], &d1[1]);
    let len = dot(&c, &c).sqrt();
    if !(len > 0.0) {
        return None;
    }
    let nu = [orientation * c[0] / len, orientation * c[1] / len, orientation * c[2] / len];
    let second = |i: usize, j: usize| &d2[i + j];
    let mut h = vec![0.0; 4];
    let mut hess = vec![0.0; 4];
    let du = vec![d1[0][2], d1[1][2]];
    for i in 0..2 {
        for j in 0..2 {
            h[i * 2 + j] = dot(second(i, j), &nu);
            hess[i * 2 + j] = second(i, j)[2] - (0..2).map(|k| christoffel[k][i][j] * du[k]).sum::<f64>();
        }
    }
    Some(SurfacePoint { normal: nu, local: LocalGeometry { n: 2, g: g.to_vec(), h, du, hess_u: hess, nu_e: nu[2] } })
}

impl SurfaceSample {
    pub fn new<C: Chart>(chart: &C, grid: Grid, mode: SurfaceMode) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: grid.dim() });
        }
        let param = |i: usize| {
            let p = grid.point(i);
            [p[0], p[1]]
        };
        let positions: Vec<V3> = (0..grid.len()).map(|i| chart.position(param(i))).collect();
        let orientation = chart.orientation();
        let points = match mode {
            SurfaceMode::Analytic => {
                let mut pts = Vec::with_capacity(grid.len());
                for i in 0..grid.len() {
                    let Some(j) = chart.jet(param(i)) else {
                        pts.push(None);
                        continue;
                    };
                    let g = metric(&j.d1);
                    let Some(gi) = spd_inverse(&g, 2) else {
                        pts.push(None);
                        continue;
                    };
                    let mut ch = [[[0.0; 2]; 2]; 2];
                    for k in 0..2 {
                        for a in 0..2 {
                            for b in 0..2 {
                                ch[k][a][b] = (0..2).map(|l| gi[k * 2 + l] * dot(&j.d2[a + b], &j.d1[l])).sum();
                            }
                        }
                    }
                    pts.push(assemble(&j.d1, &j.d2, ch, orientation));
                }
                pts
            }
            SurfaceMode::FiniteDifference => finite_difference_points(&grid, &positions, orientation),
        };
        Ok(Self { grid, mode, positions, points })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mode(&self) -> SurfaceMode {
        self.mode
    }

    pub fn position(&self, i: usize) -> V3 {
        self.positions[i]
    }

    pub fn point(&self, i: usize) -> Option<&SurfacePoint> {
        self.points.get(i)?.as_ref()
    }

    /// Principal curvatures at sample point `i`, ascending.
    pub fn principal_curvatures(&self, i: usize) -> Option<Vec<f64>> {
        Some(self.point(i)?.local.principal()?.lambda)
    }
}

fn finite_difference_points(grid: &Grid, positions: &[V3], orientation: f64) -> Vec<Option<SurfacePoint>> {
    let n = grid.len();
    let h = [grid.spacing(0), grid.spacing(1)];
    let nb = |i: usize, a: usize, o: isize| grid.neighbour(i, a, o).unwrap();
    let finite = |v: &V3| v.iter().all(|x| x.is_finite());
    let first = |i: usize| -> Option<[V3; 2]> {
        let mut d = [[0.0; 3]; 2];
        for a in 0..2 {
            let (p, m) = (&positions[nb(i, a, 1)], &positions[nb(i, a, -1)]);
            d[a] = lin(&[(0.5 / h[a], p), (-0.5 / h[a], m)]);
        }
        (finite(&d[0]) && finite(&d[1])).then_some(d)
    };
    // metric wherever first derivatives exist
    let mut metrics: Vec<Option<[f64; 4]>> = vec![None; n];
    for (i, m) in metrics.iter_mut().enumerate() {
        if grid.is_interior(i, 1) {
            *m = first(i).map(|d| metric(&d));
        }
    }
    (0..n)
        .map(|i| {
            if !grid.is_interior(i, 2) {
                return None;
            }
            let d1 = first(i)?;
            let x = &positions[i];
            let mut d2 = [[0.0; 3]; 3];
            for a in 0..2 {
                let (p, m) = (&positions[nb(i, a, 1)], &positions[nb(i, a, -1)]);
                d2[2 * a] = lin(&[(1.0 / (h[a] * h[a]), p), (-2.0 / (h[a] * h[a]), x), (1.0 / (h[a] * h[a]), m)]);
            }
            let w = 0.25 / (h[0] * h[1]);
            d2[1] = lin(&[
                (w, &positions[nb(nb(i, 0, 1), 1, 1)]),
                (-w, &positions[nb(nb(i, 0, 1), 1, -1)]),
                (-w, &positions[nb(nb(i, 0, -1), 1, 1)]),
                (w, &positions[nb(nb(i, 0, -1), 1, -1)]),
            ]);
            if !d2.iter().all(finite) {
                return None;
            }
            // ∂_c g_ab by central differences of the sampled metric
            let mut dg = [[0.0; 4]; 2];
            for c in 0..2 {
                let p = metrics[nb(i, c, 1)]?;
                let m = metrics[nb(i, c, -1)]?;
                for k in 0..4 {
                    dg[c][k] = (p[k] - m[k]) / (2.0 * h[c]);
                }
            }
            let g = metrics[i]?;
            let gi = spd_inverse(&g, 2)?;
            let mut ch = [[[0.0; 2]; 2]; 2];
            for k in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        ch[k][a][b] = (0..2)
                            .map(|l| 0.5 * gi[k * 2 + l] * (dg[a][b * 2 + l] + dg[b][a * 2 + l] - dg[l][a * 2 + b]))
                            .sum();
                    }
                }
            }
            assemble(&d1, &d2, ch, orientation)
        })
        .collect()
}

impl Sampled for SurfaceSample {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn coords(&self, i: usize) -> Vec<f64> {
        self.positions[i].to_vec()
    }

    fn local(&self, i: usize) -> Option<LocalGeometry> {
        self.point(i).map(|p| p.local.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::SymmetricCurvature;
    use crate::geometry::{height_identity_residual, laplacian_identity_residual};

    #[test]
    fn sphere_curvatures_are_inverse_radius() {
        let s = Sphere::new(2.0, [0.3, -1.0, 0.5]).unwrap();
        let sample = SurfaceSample::new(&s, s.parameter_grid(0.2, 21).unwrap(), SurfaceMode::Analytic).unwrap();
        for i in 0..sample.len() {
            let k = sample.principal_curvatures(i).unwrap();
            assert!(k.iter().all(|x| (x - 0.5).abs() < 1e-12), "{k:?}");
        }
    }

    #[test]
    fn ellipsoid_matches_closed_form_invariants() {
        let e = Ellipsoid::new(1.0, 1.5, 2.0).unwrap();
        for mode in [SurfaceMode::Analytic, SurfaceMode::FiniteDifference] {
            let sample = SurfaceSample::new(&e, e.parameter_grid(0.3, 81).unwrap(), mode).unwrap();
            let tol = if mode == SurfaceMode::Analytic { 1e-10 } else { 2e-3 };
            let mut seen = 0;
            for i in 0..sample.len() {
                let Some(k) = sample.principal_curvatures(i) else { continue };
                let (gauss, mean) = e.curvature_invariants(sample.position(i));
                assert!((k[0] * k[1] - gauss).abs() < tol && (k[0] + k[1] - mean).abs() < tol, "{mode:?} {k:?}");
                assert!(k[0] > 0.0);
                seen += 1;
            }
            assert!(seen > 1000);
        }
    }

    #[test]
    fn cap_north_pole() {
        let cap = EllipsoidCap(Ellipsoid::new(1.0, 1.0, 2.0).unwrap());
        let grid = Grid::cube(2, 0.2, 21).unwrap();
        let sample = SurfaceSample::new(&cap, grid.clone(), SurfaceMode::Analytic).unwrap();
        let pole = grid.flat_index(&[10, 10]);
        let k = sample.principal_curvatures(pole).unwrap();
        assert!((k[0] - 2.0).abs() < 1e-14 && (k[1] - 2.0).abs() < 1e-14, "{k:?}");
        let (gauss, mean) = cap.0.curvature_invariants(sample.position(pole));
        assert!((gauss - 4.0).abs() < 1e-12 && (mean - 4.0).abs() < 1e-12);
    }

    #[test]
    fn identities_hold_on_analytic_samples() {
        let s = Sphere::new(1.3, [0.0; 3]).unwrap();
        let sample = SurfaceSample::new(&s, s.parameter_grid(0.1, 41).unwrap(), SurfaceMode::Analytic).unwrap();
        let gamma = SymmetricCurvature::mean(2).unwrap();
        assert!(height_identity_residual(&gamma, &sample).max_abs() < 1e-12);
        assert!(laplacian_identity_residual(&sample).max_abs() < 1e-12);
    }

    #[test]
    fn rigid_motion_preserves_curvature() {
        let e = Ellipsoid::new(1.0, 1.5, 2.0).unwrap();
        let moved = RigidMotion::new(e, [1.0, 2.0, -0.5], 0.7, [3.0, -1.0, 2.0]).unwrap();
        let grid = e.parameter_grid(0.3, 31).unwrap();
        let a = SurfaceSample::new(&e, grid.clone(), SurfaceMode::FiniteDifference).unwrap();
        let b = SurfaceSample::new(&moved, grid, SurfaceMode::FiniteDifference).unwrap();
        for i in 0..a.len() {
            if let (Some(ka), Some(kb)) = (a.principal_curvatures(i), b.principal_curvatures(i)) {
                assert!((ka[0] - kb[0]).abs() < 1e-8 && (ka[1] - kb[1]).abs() < 1e-8);
            }
        }
    }
}
