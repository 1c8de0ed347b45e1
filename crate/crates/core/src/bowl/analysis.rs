use serde::{Deserialize, Serialize};

use super::{ProfileSolution, ProfileStatus};
use crate::constraint::linear_fit;
use crate::curvature::{CurvatureFunction, SymmetricCurvature};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUpRadius {
    pub r_stop: f64,
    /// Radius where the extrapolated `1/v` vanishes.
    pub r_max: f64,
    /// `r_max - r_stop`.
    pub bound: f64,
    pub nodes_used: usize,
}

/// Blow-up radius of a ball-type profile: `r_stop` together with a linear
/// extrapolation of `1/v` over the last decade of slopes.
pub fn blow_up_radius(sol: &ProfileSolution) -> Result<BlowUpRadius> {
    let ProfileStatus::BallDetected { r_stop, v_stop } = sol.status else {
        return Err(Error::NotBall("profile reached its radius budget".into()));
    };
    let v_floor = v_stop.min(*sol.v.last().unwrap()) / 10.0;
    let mut idx: Vec<usize> = (1..sol.len()).filter(|&i| sol.v[i] >= v_floor && sol.v[i].is_finite()).collect();
    if idx.len() < 3 {
        idx = (1..sol.len()).filter(|&i| sol.v[i].is_finite()).collect();
        idx = idx[idx.len().saturating_sub(3)..].to_vec();
    }
    let mut r_max = r_stop;
    if idx.len() >= 2 {
        let xs: Vec<f64> = idx.iter().map(|&i| sol.r[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| 1.0 / sol.v[i]).collect();
        let (a, b, _) = linear_fit(&xs, &ys);
        let root = -b / a;
        if a < 0.0 && root.is_finite() {
            r_max = root.max(r_stop);
        }
    }
    Ok(BlowUpRadius { r_stop, r_max, bound: r_max - r_stop, nodes_used: idx.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Fitted `a` in `u ≈ a r^{α+1} + b`.
    pub coefficient: f64,
    pub offset: f64,
    pub r_squared: f64,
    /// `1 / ((α + 1) γ(0, 1, …, 1))`.
    pub predicted: f64,
    pub nodes_used: usize,
}

/// Leading growth coefficient of an entire profile, fitted over the outer
/// third of the radius range.
pub fn entire_growth_coefficient(sol: &ProfileSolution, gamma: &SymmetricCurvature) -> Result<GrowthFit> {
    let ProfileStatus::EntireBudgetReached { .. } = sol.status else {
        return Err(Error::NotEntire("profile blew up before the radius budget".into()));
    };
    let g0 = gamma.gamma0().map_err(|e| Error::NotEntire(e.to_string()))?;
    if !(g0 > 0.0) {
        return Err(Error::NotEntire(format!("γ(0, 1, …, 1) = {g0}")));
    }
    let alpha = gamma.alpha();
    let r_from = sol.r_last() * 2.0 / 3.0;
    let idx: Vec<usize> = (0..sol.len()).filter(|&i| sol.r[i] >= r_from).collect();
    if idx.len() < 2 {
        return Err(Error::Invalid("too few nodes in the outer third of the profile".into()));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| sol.r[i].powf(alpha + 1.0)).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| sol.u[i]).collect();
    let (a, b, r2) = linear_fit(&xs, &ys);
    Ok(GrowthFit {
        coefficient: a,
        offset: b,
        r_squared: r2,
        predicted: 1.0 / ((alpha + 1.0) * g0),
        nodes_used: idx.len(),
    })
}

/// Curvatures at the end of a ball-type profile compared with the cylinder
/// over the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderReport {
    pub lambda_radial_last: f64,
    pub lambda_tangential_last: f64,
    pub r_max: f64,
    /// `|λ_tan(last) - 1/r_max|`.
    pub tangential_gap: f64,
    /// `tangential_gap · r_max`.
    pub relative_gap: f64,
}

pub fn curvature_asymptotics(sol: &ProfileSolution) -> Result<CylinderReport> {
    let r_max = blow_up_radius(sol)?.r_max;
    let l1 = *sol.lambda_radial.last().unwrap();
    let lt = *sol.lambda_tangential.last().unwrap();
    let gap = (lt - 1.0 / r_max).abs();
    Ok(CylinderReport {
        lambda_radial_last: l1,
        lambda_tangential_last: lt,
        r_max,
        tangential_gap: gap,
        relative_gap: gap * r_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bowl::{integrate_profile, tangential_curvature, SolverConfig};

    fn synthetic(r: Vec<f64>, v: Vec<f64>, status: ProfileStatus) -> ProfileSolution {
        let g = SymmetricCurvature::mean(2).unwrap();
        let u = vec![0.0; r.len()];
        let lt = r.iter().zip(&v).map(|(&r, &v)| if r > 0.0 { tangential_curvature(r, v) } else { 1.0 }).collect();
        let l1 = vec![0.0; r.len()];
        ProfileSolution::from_nodes(&g, r, v, u, l1, lt, status).unwrap()
    }

    #[test]
    fn constructed_blow_up_at_one() {
        let r: Vec<f64> = (0..=2000).map(|i| 0.999_999 * i as f64 / 2000.0).collect();
        let v: Vec<f64> = r.iter().map(|r| r / (1.0 - r)).collect();
        let last = r.len() - 1;
        let sol = synthetic(r.clone(), v.clone(), ProfileStatus::BallDetected { r_stop: r[last], v_stop: v[last] });
        let b = blow_up_radius(&sol).unwrap();
        assert!(b.r_stop <= 1.0 && (b.r_max - 1.0).abs() <= b.bound.max(1e-6), "{b:?}");
    }

    #[test]
    fn cylinder_limit_is_exact() {
        let r = vec![0.0, 0.5, 1.0, 2.0];
        let v = vec![0.0, 1e3, 1e6, f64::INFINITY];
        let sol = synthetic(r, v, ProfileStatus::BallDetected { r_stop: 2.0, v_stop: f64::INFINITY });
        let rep = curvature_asymptotics(&sol).unwrap();
        assert_eq!(rep.lambda_radial_last, 0.0);
        assert_eq!(rep.lambda_tangential_last, 0.5);
    }

    #[test]
    fn status_preconditions() {
        let r = vec![0.0, 1.0, 2.0];
        let v = vec![0.0, 1.0, 2.0];
        let entire = synthetic(r.clone(), v.clone(), ProfileStatus::EntireBudgetReached { r_budget: 2.0 });
        assert!(matches!(blow_up_radius(&entire), Err(Error::NotBall(_))));
        let ball = synthetic(r, v, ProfileStatus::BallDetected { r_stop: 2.0, v_stop: 2.0 });
        let g = SymmetricCurvature::mean(2).unwrap();
        assert!(matches!(entire_growth_coefficient(&ball, &g), Err(Error::NotEntire(_))));
    }

    #[test]
    fn mean_curvature_bowl_grows_like_the_paraboloid() {
        for (n, expect) in [(2, 0.5), (3, 0.25)] {
            let g = SymmetricCurvature::mean(n).unwrap();
            let cfg = SolverConfig { r_budget: Some(50.0), ..Default::default() };
            let sol = integrate_profile(&g, &cfg).unwrap();
            let fit = entire_growth_coefficient(&sol, &g).unwrap();
            assert!((fit.predicted - expect).abs() < 1e-12);
            assert!((fit.coefficient / expect - 1.0).abs() < 0.05, "n={n}: {fit:?}");
        }
    }

    #[test]
    fn sigma_two_root_growth() {
        let g = SymmetricCurvature::sigma_root(3, 2).unwrap();
        let sol = integrate_profile(&g, &SolverConfig { r_budget: Some(50.0), ..Default::default() }).unwrap();
        let fit = entire_growth_coefficient(&sol, &g).unwrap();
        assert!((fit.predicted - 0.5).abs() < 1e-12);
        assert!((fit.coefficient / 0.5 - 1.0).abs() < 0.05, "{fit:?}");
    }
}
