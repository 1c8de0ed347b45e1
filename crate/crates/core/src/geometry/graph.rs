use serde::{Deserialize, Serialize};

use super::{Grid, LocalGeometry, Sampled};
use crate::bowl::ProfileSolution;
use crate::curvature::EigenvalueVector;
use crate::error::{Error, Result};

/// Height, gradient and Hessian of a graph function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub du: Vec<f64>,
    /// Row-major `n × n`.
    pub d2u: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivatives {
    Analytic,
    FiniteDifference,
}

/// Graph `x ↦ u(x)` sampled on a grid in the horizontal plane.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    grid: Grid,
    heights: Vec<f64>,
    jets: Vec<Option<Jet>>,
    derivatives: Derivatives,
}

/// Cells kept clear of the grid boundary by finite-difference samples.
pub const FD_MARGIN: usize = 2;

impl GraphSample {
    /// Exact derivatives from a closure; points where it returns `None`
    /// are excluded.
    pub fn from_jet(grid: Grid, f: impl Fn(&[f64]) -> Option<Jet>) -> Result<Self> {
        let n = grid.dim();
        let mut heights = Vec::with_capacity(grid.len());
        let mut jets = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let jet = f(&grid.point(i));
            if let Some(j) = &jet {
                if j.du.len() != n || j.d2u.len() != n * n {
                    return Err(Error::DimensionMismatch { expected: n, got: j.du.len() });
                }
            }
            heights.push(jet.as_ref().map_or(f64::NAN, |j| j.u));
            jets.push(jet.filter(|j| j.u.is_finite() && j.du.iter().chain(&j.d2u).all(|x| x.is_finite())));
        }
        Ok(Self { grid, heights, jets, derivatives: Derivatives::Analytic })
    }

    /// Second-order central differences of the given heights. Points within
    /// two cells of the boundary, or whose stencil touches a non-finite
    /// height, are excluded.
    pub fn from_heights(grid: Grid, heights: Vec<f64>) -> Result<Self> {
        if heights.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: heights.len() });
        }
        let n = grid.dim();
        let jets = (0..grid.len())
            .map(|i| {
                if !grid.is_interior(i, FD_MARGIN) {
                    return None;
                }
                let at = |idx: usize| heights[idx];
                let step = |idx: usize, axis: usize, off: isize| grid.neighbour(idx, axis, off).unwrap();
                let mut du = vec![0.0; n];
                let mut d2u = vec![0.0; n * n];
                for a in 0..n {
                    let h = grid.spacing(a);
                    let (p, m) = (at(step(i, a, 1)), at(step(i, a, -1)));
                    du[a] = (p - m) / (2.0 * h);
                    d2u[a * n + a] = (p - 2.0 * at(i) + m) / (h * h);
                    for b in a + 1..n {
                        let hb = grid.spacing(b);
                        let pp = at(step(step(i, a, 1), b, 1));
                        let pm = at(step(step(i, a, 1), b, -1));
                        let mp = at(step(step(i, a, -1), b, 1));
                        let mm = at(step(step(i, a, -1), b, -1));
                        let v = (pp - pm - mp + mm) / (4.0 * h * hb);
                        d2u[a * n + b] = v;
                        d2u[b * n + a] = v;
                    }
                }
                let jet = Jet { u: at(i), du, d2u };
                (jet.u.is_finite() && jet.du.iter().chain(&jet.d2u).all(|x| x.is_finite())).then_some(jet)
            })
            .collect();
        Ok(Self { grid, heights, jets, derivatives: Derivatives::FiniteDifference })
    }

    pub fn from_function(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let heights = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::from_heights(grid, heights)
    }

    /// Rotational graph `u(|x|)` of a computed profile, with derivatives
    /// from its C² interpolant. Points beyond the last node are excluded.
    pub fn from_profile(grid: Grid, sol: &ProfileSolution) -> Result<Self> {
        let it = sol.interpolant();
        let c0 = it.c0();
        Self::from_jet(grid, |x| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let (u, v, vd) = it.eval(r)?;
            Some(radial_jet(x, r, u, v, vd, c0))
        })
    }

    /// Same surface with heights only, differentiated by finite differences.
    pub fn from_profile_heights(grid: Grid, sol: &ProfileSolution) -> Result<Self> {
        let it = sol.interpolant();
        Self::from_function(grid, |x| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            it.eval(r).map_or(f64::NAN, |p| p.0)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn derivatives(&self) -> Derivatives {
        self.derivatives
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn jet(&self, i: usize) -> Option<&Jet> {
        self.jets.get(i)?.as_ref()
    }

    /// Excludes points with `|x| > radius`.
    pub fn restrict_to_ball(mut self, radius: f64) -> Self {
        for i in 0..self.grid.len() {
            let r2: f64 = self.grid.point(i).iter().map(|c| c * c).sum();
            if r2 > radius * radius {
                self.jets[i] = None;
                self.heights[i] = f64::NAN;
            }
        }
        self
    }

    /// Vertical translate `u + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.heights.iter_mut().for_each(|u| *u += c);
        out.jets.iter_mut().flatten().for_each(|j| j.u += c);
        out
    }

    /// `(1 - s) self + s other` on a common grid.
    pub fn combine(&self, other: &Self, s: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Invalid("combined samples must share a grid".into()));
        }
        let mix = |a: f64, b: f64| (1.0 - s) * a + s * b;
        let heights = self.heights.iter().zip(&other.heights).map(|(a, b)| mix(*a, *b)).collect();
        let jets = self
            .jets
            .iter()
            .zip(&other.jets)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(Jet {
                    u: mix(a.u, b.u),
                    du: a.du.iter().zip(&b.du).map(|(x, y)| mix(*x, *y)).collect(),
                    d2u: a.d2u.iter().zip(&b.d2u).map(|(x, y)| mix(*x, *y)).collect(),
                }),
                _ => None,
            })
            .collect();
        let derivatives = if self.derivatives == other.derivatives { self.derivatives } else { Derivatives::FiniteDifference };
        Ok(Self { grid: self.grid.clone(), heights, jets, derivatives })
    }
}

fn radial_jet(x: &[f64], r: f64, u: f64, v: f64, vd: f64, c0: f64) -> Jet {
    let n = x.len();
    let mut du = vec![0.0; n];
    let mut d2u = vec![0.0; n * n];
    // v / r tends to the apex curvature at the origin
    let v_over_r = if r > 0.0 { v / r } else { c0 };
    for i in 0..n {
        let xi = if r > 0.0 { x[i] / r } else { 0.0 };
        du[i] = v * xi;
        for j in 0..n {
            let xj = if r > 0.0 { x[j] / r } else { 0.0 };
            let delta = if i == j { 1.0 } else { 0.0 };
            d2u[i * n + j] = vd * xi * xj + v_over_r * (delta - xi * xj);
        }
    }
    if r == 0.0 {
        for i in 0..n {
            d2u[i * n + i] = c0;
        }
    }
    Jet { u, du, d2u }
}

impl Jet {
    pub fn local(&self) -> LocalGeometry {
        let n = self.du.len();
        let w2 = 1.0 + self.du.iter().map(|d| d * d).sum::<f64>();
        let w = w2.sqrt();
        let mut g = crate::linalg::identity(n);
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] += self.du[i] * self.du[j];
            }
        }
        LocalGeometry {
            n,
            g,
            h: self.d2u.iter().map(|x| x / w).collect(),
            du: self.du.clone(),
            hess_u: self.d2u.iter().map(|x| x / w2).collect(),
            nu_e: 1.0 / w,
        }
    }
}

impl Sampled for GraphSample {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn coords(&self, i: usize) -> Vec<f64> {
        self.grid.point(i)
    }

    fn local(&self, i: usize) -> Option<LocalGeometry> {
        self.jet(i).map(Jet::local)
    }
}

/// Shape operator `(I/W - Du Duᵀ/W³) D²u` at grid point `i`.
pub fn shape_operator(sample: &GraphSample, i: usize) -> Result<Vec<f64>> {
    let jet = sample
        .jet(i)
        .ok_or_else(|| Error::Invalid(format!("grid point {i} has no derivatives (boundary or masked)")))?;
    let n = jet.du.len();
    let w2 = 1.0 + jet.du.iter().map(|d| d * d).sum::<f64>();
    let w = w2.sqrt();
    let mut p = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            p[a * n + b] = if a == b { 1.0 / w } else { 0.0 } - jet.du[a] * jet.du[b] / (w2 * w);
        }
    }
    Ok(crate::linalg::mat_mul(&p, &jet.d2u, n))
}

/// Principal curvatures at grid point `i`, ascending.
pub fn principal_curvatures(sample: &GraphSample, i: usize) -> Result<EigenvalueVector> {
    let jet = sample
        .jet(i)
        .ok_or_else(|| Error::Invalid(format!("grid point {i} has no derivatives (boundary or masked)")))?;
    let pf = jet.local().principal().ok_or_else(|| Error::Invalid("metric not positive definite".into()))?;
    EigenvalueVector::new(pf.lambda)
}
