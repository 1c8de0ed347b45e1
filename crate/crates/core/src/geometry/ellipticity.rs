use serde::{Deserialize, Serialize};

use super::{gamma_value, GraphSample, Sampled};
use crate::curvature::{CurvatureFunction, SymmetricCurvature};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Data for one combination parameter `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticityStep {
    pub s: f64,
    /// Smallest principal curvature of `u_s` over the domain.
    pub min_curvature: f64,
    /// Smallest eigenvalue of the second-order coefficient matrix.
    pub min_eigenvalue: f64,
    pub argmin: Vec<f64>,
    /// `sup |γ(λ(s)) - ⟨ν(s), e_{n+1}⟩|`.
    pub max_abs_e: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub steps: Vec<EllipticityStep>,
    /// Smallest eigenvalue over all `s` and points.
    pub min_eigenvalue: f64,
}

/// Checks the linearization of `E(s) = γ(λ(u_s)) - ⟨ν(s), e_{n+1}⟩` along
/// `u_s = (1 - s) u1 + s u2`.
///
/// `u1` must be strictly convex and `u2` convex at every evaluated point.
/// For each `s` the report gives the smallest principal curvature of `u_s`
/// and the smallest eigenvalue of the coefficient matrix
/// `∂E/∂(D²u) = Σ_m γ_m(λ) e_m e_mᵀ / W`, with `e_m` the `g`-orthonormal
/// principal directions.
pub fn linearization_ellipticity(
    gamma: &SymmetricCurvature,
    u1: &GraphSample,
    u2: &GraphSample,
    s_grid: &[f64],
) -> Result<EllipticityReport> {
    let n = gamma.n();
    if u1.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u1.dim() });
    }
    for (name, sample, strict) in [("u1", u1, true), ("u2", u2, false)] {
        for i in 0..sample.len() {
            let Some(local) = sample.local(i) else { continue };
            let lam = local.principal().map(|p| p.lambda).unwrap_or_default();
            let scale = lam.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let ok = match lam.first() {
                Some(&l) if strict => l > 0.0,
                Some(&l) => l >= -1e-9 * scale,
                None => false,
            };
            if !ok {
                return Err(Error::PreconditionViolation {
                    point: sample.coords(i),
                    reason: format!(
                        "{name} is not {} convex here (λ = {lam:?})",
                        if strict { "strictly" } else { "weakly" }
                    ),
                });
            }
        }
    }
    let mut steps = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Invalid(format!("combination parameter {s} outside [0, 1]")));
        }
        let us = u1.combine(u2, s)?;
        let mut step = EllipticityStep {
            s,
            min_curvature: f64::INFINITY,
            min_eigenvalue: f64::INFINITY,
            argmin: Vec::new(),
            max_abs_e: 0.0,
            points: 0,
        };
        for i in 0..us.len() {
            let Some(local) = us.local(i) else { continue };
            let Some(pf) = local.principal() else { continue };
            step.min_curvature = step.min_curvature.min(pf.lambda[0]);
            if let Some(value) = gamma_value(gamma, &pf.lambda) {
                step.max_abs_e = step.max_abs_e.max((value - local.nu_e).abs());
            }
            if !gamma.cone_contains(&pf.lambda, true) {
                return Err(Error::PreconditionViolation {
                    point: us.coords(i),
                    reason: format!("curvatures {:?} of u_s at s = {s} leave the cone", pf.lambda),
                });
            }
            let dg = gamma.grad(&pf.lambda);
            let mut a = vec![0.0; n * n];
            for r in 0..n {
                for c in 0..n {
                    a[r * n + c] = (0..n).map(|m| dg[m] * pf.frame[r * n + m] * pf.frame[c * n + m]).sum::<f64>()
                        * local.nu_e;
                }
            }
            let (eig, _) = symmetric_eigen(&a, n);
            if eig[0] < step.min_eigenvalue {
                step.min_eigenvalue = eig[0];
                step.argmin = us.coords(i);
            }
            step.points += 1;
        }
        if step.points == 0 {
            return Err(Error::Invalid("no evaluable points in the combined sample".into()));
        }
        steps.push(step);
    }
    let min_eigenvalue = steps.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min);
    Ok(EllipticityReport { steps, min_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;

    #[test]
    fn paraboloid_and_plane() {
        let gamma = SymmetricCurvature::mean(2).unwrap();
        let grid = Grid::cube(2, 1.0, 11).unwrap();
        let par = GraphSample::from_function(grid.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let plane = GraphSample::from_function(grid, |x| 0.3 * x[0] - 0.1 * x[1]).unwrap();
        let rep = linearization_ellipticity(&gamma, &par, &plane, &[0.25, 0.5, 0.75]).unwrap();
        for st in &rep.steps {
            assert!(st.min_curvature > 0.0 && st.min_eigenvalue > 0.0, "{st:?}");
        }
        assert!(matches!(
            linearization_ellipticity(&gamma, &plane, &par, &[0.5]),
            Err(Error::PreconditionViolation { .. })
        ));
    }

    #[test]
    fn saddle_is_rejected_as_second_argument() {
        let gamma = SymmetricCurvature::mean(2).unwrap();
        let grid = Grid::cube(2, 1.0, 11).unwrap();
        let par = GraphSample::from_function(grid.clone(), |x| x[0] * x[0] + x[1] * x[1]).unwrap();
        let saddle = GraphSample::from_function(grid, |x| x[0] * x[0] - x[1] * x[1]).unwrap();
        match linearization_ellipticity(&gamma, &par, &saddle, &[0.5]) {
            Err(Error::PreconditionViolation { point, .. }) => assert_eq!(point.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}
