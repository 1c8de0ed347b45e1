//! Curvature of sampled hypersurfaces and the pointwise identities a
//! translator satisfies.
//!
//! Every sample reduces, point by point, to a [`LocalGeometry`]: metric
//! `g`, second fundamental form `h`, the coordinate gradient and intrinsic
//! Hessian of the height `u = ⟨p, e_{n+1}⟩`, and `⟨ν, e_{n+1}⟩`. The
//! principal curvatures are the eigenvalues of `h` relative to `g`. `ν` is
//! oriented so that convex surfaces have positive curvatures; on an
//! upward-opening graph it points up.
//!
//! With that orientation the intrinsic Hessian of the height is
//! `∇∇u = h ⟨ν, e_{n+1}⟩`, and the height operator is taken as
//! `Δ_γ u = -Σ γ_i(λ) ∇∇u(e_i, e_i)` in a principal frame, so that
//! `Δ_γ u = -α γ ⟨ν, e_{n+1}⟩` on every surface and
//! `Δ_γ u - α|∇u|² + α = 0` on translators.

mod ellipticity;
mod graph;
mod grid;
mod surface;

pub use ellipticity::{linearization_ellipticity, EllipticityReport, EllipticityStep};
pub use graph::{principal_curvatures, shape_operator, Derivatives, GraphSample, Jet};
pub use grid::Grid;
pub use surface::{Chart, ChartJet, Ellipsoid, EllipsoidCap, RigidMotion, Sphere, SurfaceMode, SurfaceSample};

use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureFunction, SymmetricCurvature};
use crate::linalg::{generalized_eigen, spd_inverse};

/// Second-order data of a hypersurface at one point, in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGeometry {
    pub n: usize,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    /// Coordinate partials of the height.
    pub du: Vec<f64>,
    /// Intrinsic Hessian `∇_i ∇_j u` of the height.
    pub hess_u: Vec<f64>,
    /// `⟨ν, e_{n+1}⟩`.
    pub nu_e: f64,
}

/// Principal curvatures (ascending) with a `g`-orthonormal frame of
/// principal directions as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalFrame {
    pub lambda: Vec<f64>,
    pub frame: Vec<f64>,
}

impl LocalGeometry {
    pub fn principal(&self) -> Option<PrincipalFrame> {
        let (lambda, frame) = generalized_eigen(&self.h, &self.g, self.n)?;
        Some(PrincipalFrame { lambda, frame })
    }

    /// `|∇u|² = g^{ij} ∂_i u ∂_j u`.
    pub fn grad_u_sq(&self) -> Option<f64> {
        let gi = spd_inverse(&self.g, self.n)?;
        let n = self.n;
        Some((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| gi[i * n + j] * self.du[i] * self.du[j]).sum())
    }

    /// `tr(g⁻¹ h)`.
    pub fn mean_curvature(&self) -> Option<f64> {
        Some(trace_with_inverse(&spd_inverse(&self.g, self.n)?, &self.h, self.n))
    }

    /// Laplace–Beltrami of the height, `g^{ij} ∇_i ∇_j u`.
    pub fn laplacian_u(&self) -> Option<f64> {
        Some(trace_with_inverse(&spd_inverse(&self.g, self.n)?, &self.hess_u, self.n))
    }

    /// `∇∇u(e_i, e_i)` for the principal frame.
    fn hessian_diagonal(&self, frame: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += frame[i * n + k] * self.hess_u[i * n + j] * frame[j * n + k];
                    }
                }
                s
            })
            .collect()
    }
}

fn trace_with_inverse(gi: &[f64], m: &[f64], n: usize) -> f64 {
    let mut t = 0.0;
    for i in 0..n {
        for j in 0..n {
            t += gi[i * n + j] * m[j * n + i];
        }
    }
    t
}

/// `γ(λ)` in the open cone, or through the boundary extension on the
/// closed cone. `None` outside.
pub fn gamma_value(gamma: &SymmetricCurvature, lambda: &[f64]) -> Option<f64> {
    if gamma.cone_contains(lambda, true) {
        Some(gamma.value(lambda))
    } else {
        gamma.extend_to_boundary(lambda).ok()
    }
}

/// `Δ_γ u` at a point, or `None` where `λ` leaves the closed cone or a
/// needed derivative of `γ` is not finite.
pub fn delta_gamma_u(gamma: &SymmetricCurvature, local: &LocalGeometry) -> Option<f64> {
    let pf = local.principal()?;
    if !gamma.cone_contains(&pf.lambda, false) {
        return None;
    }
    let diag = local.hessian_diagonal(&pf.frame);
    let grad = gamma.grad(&pf.lambda);
    let mut s = 0.0;
    for (gi, d) in grad.iter().zip(&diag) {
        if *d == 0.0 {
            continue;
        }
        if !gi.is_finite() {
            return None;
        }
        s += gi * d;
    }
    Some(-s)
}

/// Point set with local geometry at (some of) its points.
pub trait Sampled {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Coordinates reported in field exports.
    fn coords(&self, i: usize) -> Vec<f64>;
    /// `None` at points excluded from evaluation (boundary stencils, mask).
    fn local(&self, i: usize) -> Option<LocalGeometry>;
}

/// A scalar field over a sample. `None` entries are points without a value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub coords: Vec<Vec<f64>>,
    pub values: Vec<Option<f64>>,
    /// Points with geometry whose curvatures left the cone.
    pub masked: usize,
    /// Points without local geometry.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub max_abs: f64,
    pub argmax: Vec<f64>,
    pub mean_abs: f64,
    pub evaluated: usize,
    pub masked: usize,
    pub excluded: usize,
    /// Evaluated share of the points that carry geometry.
    pub coverage: f64,
}

impl ScalarField {
    pub fn evaluate<S: Sampled + ?Sized>(sample: &S, f: impl Fn(&LocalGeometry) -> Option<f64>) -> Self {
        let mut field = ScalarField { coords: Vec::new(), values: Vec::new(), masked: 0, excluded: 0 };
        for i in 0..sample.len() {
            let value = match sample.local(i) {
                None => {
                    field.excluded += 1;
                    None
                }
                Some(local) => {
                    let v = f(&local).filter(|v| v.is_finite());
                    if v.is_none() {
                        field.masked += 1;
                    }
                    v
                }
            };
            field.coords.push(sample.coords(i));
            field.values.push(value);
        }
        field
    }

    pub fn evaluated(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Largest `|value|`; `NaN` when nothing was evaluated.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|v| v.abs()).fold(f64::NAN, f64::max)
    }

    pub fn summary(&self) -> FieldSummary {
        let mut best = (f64::NAN, Vec::new());
        let mut total = 0.0;
        for (c, v) in self.coords.iter().zip(&self.values) {
            if let Some(v) = v {
                total += v.abs();
                if !(v.abs() <= best.0) {
                    best = (v.abs(), c.clone());
                }
            }
        }
        let evaluated = self.evaluated();
        FieldSummary {
            max_abs: best.0,
            argmax: best.1,
            mean_abs: if evaluated > 0 { total / evaluated as f64 } else { f64::NAN },
            evaluated,
            masked: self.masked,
            excluded: self.excluded,
            coverage: if evaluated + self.masked > 0 { evaluated as f64 / (evaluated + self.masked) as f64 } else { 0.0 },
        }
    }

    /// CSV with columns `x1, …, xd, value`; points without a value are
    /// omitted.
    pub fn to_csv(&self) -> String {
        let d = self.coords.first().map_or(0, |c| c.len());
        let mut out: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        out.push("value".into());
        let mut text = out.join(",") + "\n";
        for (c, v) in self.coords.iter().zip(&self.values) {
            if let Some(v) = v {
                for x in c {
                    text.push_str(&format!("{x:e},"));
                }
                text.push_str(&format!("{v:e}\n"));
            }
        }
        text
    }
}

/// `γ(λ) - ⟨ν, e_{n+1}⟩`.
pub fn translator_residual<S: Sampled + ?Sized>(gamma: &SymmetricCurvature, sample: &S) -> ScalarField {
    ScalarField::evaluate(sample, |l| Some(gamma_value(gamma, &l.principal()?.lambda)? - l.nu_e))
}

/// `Δ_γ u + α γ(λ) ⟨ν, e_{n+1}⟩`, which vanishes on every hypersurface.
pub fn height_identity_residual<S: Sampled + ?Sized>(gamma: &SymmetricCurvature, sample: &S) -> ScalarField {
    let alpha = gamma.alpha();
    ScalarField::evaluate(sample, |l| {
        let value = gamma_value(gamma, &l.principal()?.lambda)?;
        Some(delta_gamma_u(gamma, l)? + alpha * value * l.nu_e)
    })
}

/// `Δ_γ u - α |∇u|² + α`, which vanishes on translators.
pub fn translator_height_equation<S: Sampled + ?Sized>(gamma: &SymmetricCurvature, sample: &S) -> ScalarField {
    let alpha = gamma.alpha();
    ScalarField::evaluate(sample, |l| Some(delta_gamma_u(gamma, l)? - alpha * l.grad_u_sq()? + alpha))
}

/// `Δu - H ⟨ν, e_{n+1}⟩` with the Laplace–Beltrami trace and `H = tr(g⁻¹h)`.
pub fn laplacian_identity_residual<S: Sampled + ?Sized>(sample: &S) -> ScalarField {
    ScalarField::evaluate(sample, |l| Some(l.laplacian_u()? - l.mean_curvature()? * l.nu_e))
}

/// Observed order `log2(e_coarse / e_fine)` for a halved mesh size.
pub fn convergence_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Errors of a field on successively refined grids, measured at the
/// points of the coarsest grid where it has a value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub counts: Vec<Vec<usize>>,
    pub max_abs: Vec<f64>,
    pub orders: Vec<f64>,
    pub points: usize,
}

/// `levels[k]` must be a field over `levels[k - 1].0.refined()`.
pub fn refinement_study(levels: &[(Grid, ScalarField)]) -> crate::error::Result<RefinementStudy> {
    use crate::error::Error;
    let Some((coarse, base)) = levels.first() else {
        return Err(Error::Invalid("refinement study needs at least one level".into()));
    };
    for w in levels.windows(2) {
        if w[1].0 != w[0].0.refined() {
            return Err(Error::Invalid("each level must refine the previous grid".into()));
        }
    }
    let common: Vec<usize> = (0..coarse.len()).filter(|&i| base.values[i].is_some()).collect();
    let mut max_abs = Vec::with_capacity(levels.len());
    for (k, (grid, field)) in levels.iter().enumerate() {
        let mut m = 0.0f64;
        for &i in &common {
            let idx: Vec<usize> = coarse.multi_index(i).iter().map(|c| c << k).collect();
            match field.values[grid.flat_index(&idx)] {
                Some(v) => m = m.max(v.abs()),
                None => return Err(Error::Invalid(format!("level {k} lacks a value at a coarse point"))),
            }
        }
        max_abs.push(m);
    }
    let orders = max_abs.windows(2).map(|w| convergence_order(w[0], w[1])).collect();
    Ok(RefinementStudy { counts: levels.iter().map(|l| l.0.counts().to_vec()).collect(), max_abs, orders, points: common.len() })
}
