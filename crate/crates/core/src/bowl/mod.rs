//! The rotationally symmetric bowl-type translator.
//!
//! For a graph `u(|x|)` with slope `v = u'`, the principal curvatures are
//! `λ_1 = v' / (1 + v²)^{3/2}` (radial) and `λ_i = v / (r √(1 + v²))`
//! (tangential, `n - 1` copies), and the translator equation reads
//! `γ(λ) = (1 + v²)^{-1/2}`. At every evaluation the solver inverts this
//! relation for `v'` with a monotone root solve in the radial slot, which
//! turns the translator equation into a first-order ODE for `v`. The
//! integration starts just off the apex on the umbilic slope `v = c0 r`
//! and ends either at a slope blow-up (ball-type) or at a radius budget.

mod analysis;
mod io;

pub use analysis::{blow_up_radius, curvature_asymptotics, entire_growth_coefficient, BlowUpRadius, CylinderReport, GrowthFit};
pub use io::{ProfileMetadata, ProfileTable, PROFILE_CSV_HEADER};

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::constraint::ConstraintCurve;
use crate::curvature::{CurvatureFunction, GammaSpec, SymmetricCurvature};
use crate::error::{Error, Result};
use crate::ode::{integrate, Control, StepOptions, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Start radius as a fraction of the apex radius `1 / c0`.
    pub epsilon_start: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Slope at which the profile is declared to blow up.
    pub v_blowup: f64,
    /// Radius budget; `None` means `50 / c0`.
    pub r_budget: Option<f64>,
    /// Relative residual accepted from the slope root solve.
    pub root_tol: f64,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon_start: 1e-4,
            rtol: 1e-9,
            atol: 1e-12,
            v_blowup: 1e6,
            r_budget: None,
            root_tol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon_start", self.epsilon_start),
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("v_blowup", self.v_blowup),
            ("root_tol", self.root_tol),
            ("r_budget", self.r_budget.unwrap_or(1.0)),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Invalid(format!("solver setting {name} = {value} must be positive")));
            }
        }
        if self.epsilon_start >= 0.1 {
            return Err(Error::Invalid(format!(
                "epsilon_start = {} must be small compared to 1",
                self.epsilon_start
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProfileStatus {
    BallDetected { r_stop: f64, v_stop: f64 },
    EntireBudgetReached { r_budget: f64 },
}

/// The discretized profile `r ↦ (v, u)` with curvatures at every node.
/// The first node is the apex `r = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub gamma: GammaSpec,
    pub alpha: f64,
    pub c0: f64,
    pub epsilon: f64,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub vdot: Vec<f64>,
    pub lambda_radial: Vec<f64>,
    pub lambda_tangential: Vec<f64>,
    pub status: ProfileStatus,
    pub config: SolverConfig,
}

/// `λ_1 = v' / (1 + v²)^{3/2}`.
pub fn radial_curvature(v: f64, vdot: f64) -> f64 {
    vdot / (1.0 + v * v).powf(1.5)
}

/// `λ_i = v / (r √(1 + v²))`, written to stay finite as `v → ∞`.
pub fn tangential_curvature(r: f64, v: f64) -> f64 {
    if v > 1.0 {
        1.0 / (r * (1.0 + 1.0 / (v * v)).sqrt())
    } else {
        v / (r * (1.0 + v * v).sqrt())
    }
}

/// Apex curvature `c0 = γ(1, …, 1)^{-1/α}`; the apex osculating sphere has
/// radius `1 / c0 = γ(1, …, 1)^{1/α}`.
pub fn initial_slope(gamma: &SymmetricCurvature) -> f64 {
    gamma.umbilic_curvature()
}

/// Evaluates `v'` from the translator relation, reusing the previous
/// radial curvature as the bracket seed.
pub struct SlopeField {
    curve: ConstraintCurve,
    guess: Cell<f64>,
}

impl SlopeField {
    pub fn new(gamma: &SymmetricCurvature) -> Self {
        let curve = ConstraintCurve::new(gamma.clone());
        let c0 = curve.umbilic_point();
        Self { curve, guess: Cell::new(c0) }
    }

    /// Radial curvature `λ_1` solving `γ(λ_1, y, …, y) = 1/W` with
    /// `y = v / (r W)`, `W = √(1 + v²)`.
    pub fn radial(&self, r: f64, v: f64) -> Result<f64> {
        if !(r > 0.0 && v > 0.0 && r.is_finite() && v.is_finite()) {
            return Err(Error::Invalid(format!("slope field needs r > 0, v > 0; got r = {r}, v = {v}")));
        }
        let w = (1.0 + v * v).sqrt();
        let y = tangential_curvature(r, v);
        let target = 1.0 / w;
        let x = match self.curve.solve_level(y, target, Some(self.guess.get())) {
            Ok(x) => x,
            Err(Error::NoBracket { .. }) => return Err(Error::NoRoot { r, v }),
            Err(e) => return Err(e),
        };
        self.guess.set(x);
        Ok(x)
    }

    pub fn slope_derivative(&self, r: f64, v: f64) -> Result<f64> {
        let x = self.radial(r, v)?;
        Ok(x * (1.0 + v * v).powf(1.5))
    }
}

/// `v'` at `(r, v)`; see [`SlopeField`].
pub fn slope_derivative(gamma: &SymmetricCurvature, r: f64, v: f64) -> Result<f64> {
    SlopeField::new(gamma).slope_derivative(r, v)
}

/// Integrates the profile ODE from the apex.
pub fn integrate_profile(gamma: &SymmetricCurvature, config: &SolverConfig) -> Result<ProfileSolution> {
    config.validate()?;
    if !gamma.is_extendable() {
        return Err(Error::NotExtendable(gamma.label()));
    }
    let c0 = initial_slope(gamma);
    let eps = config.epsilon_start / c0;
    let r_budget = config.r_budget.unwrap_or(50.0 / c0);
    if r_budget <= eps {
        return Err(Error::Invalid(format!("radius budget {r_budget} below the start radius {eps}")));
    }
    let field = SlopeField::new(gamma);

    let v0 = c0 * eps;
    let u0 = 0.5 * c0 * eps * eps;
    let vdot0 = field.slope_derivative(eps, v0)?;

    let mut sol = ProfileSolution {
        gamma: GammaSpec::from(gamma),
        alpha: gamma.alpha(),
        c0,
        epsilon: eps,
        r: vec![0.0, eps],
        v: vec![0.0, v0],
        u: vec![0.0, u0],
        vdot: vec![c0, vdot0],
        lambda_radial: vec![c0, radial_curvature(v0, vdot0)],
        lambda_tangential: vec![c0, tangential_curvature(eps, v0)],
        status: ProfileStatus::EntireBudgetReached { r_budget },
        config: config.clone(),
    };

    let opts = StepOptions {
        rtol: config.rtol,
        atol: config.atol,
        h_init: eps,
        max_steps: config.max_steps,
        ..StepOptions::default()
    };
    let mut blown = false;
    let end = integrate(
        |r, y: &[f64; 2]| {
            if !(y[0] > 0.0) {
                return None;
            }
            field.slope_derivative(r, y[0]).ok().map(|vd| [vd, y[0]])
        },
        eps,
        [v0, u0],
        r_budget,
        &opts,
        |r, y, dy| {
            let (v_prev, r_prev) = (*sol.v.last().unwrap(), *sol.r.last().unwrap());
            if v_prev >= 1.0 && y[0] > 2.0 * v_prev && r - r_prev > 1e-13 * r {
                return Control::Retry;
            }
            sol.r.push(r);
            sol.v.push(y[0]);
            sol.u.push(y[1]);
            sol.vdot.push(dy[0]);
            sol.lambda_radial.push(radial_curvature(y[0], dy[0]));
            sol.lambda_tangential.push(tangential_curvature(r, y[0]));
            if y[0] > config.v_blowup {
                blown = true;
                Control::Stop
            } else {
                Control::Continue
            }
        },
    );

    let last = sol.r.len() - 1;
    match end {
        Termination::Stopped if blown => {
            sol.status = ProfileStatus::BallDetected { r_stop: sol.r[last], v_stop: sol.v[last] };
        }
        Termination::ReachedEnd => {}
        // the tangential curvature alone saturates the speed: the slope has
        // run into the vertical cylinder
        Termination::RhsUndefined { .. } => {
            sol.status = ProfileStatus::BallDetected { r_stop: sol.r[last], v_stop: sol.v[last] };
        }
        Termination::Underflow { t, y, h } => return Err(Error::StepFailure { r: t, v: y[0], u: y[1], h }),
        Termination::TooManySteps { t, y } => {
            return Err(Error::StepFailure { r: t, v: y[0], u: y[1], h: f64::NAN })
        }
        Termination::Stopped => unreachable!("observer only stops on blow-up"),
    }
    Ok(sol)
}

impl ProfileSolution {
    /// Builds a profile from externally supplied nodes (synthetic data or a
    /// parsed CSV). `vdot` is recovered from the radial curvature.
    pub fn from_nodes(
        gamma: &SymmetricCurvature,
        r: Vec<f64>,
        v: Vec<f64>,
        u: Vec<f64>,
        lambda_radial: Vec<f64>,
        lambda_tangential: Vec<f64>,
        status: ProfileStatus,
    ) -> Result<Self> {
        let m = r.len();
        if m < 2 || [v.len(), u.len(), lambda_radial.len(), lambda_tangential.len()].iter().any(|&l| l != m) {
            return Err(Error::Invalid("profile columns must have equal length ≥ 2".into()));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("profile radii must be strictly increasing".into()));
        }
        let vdot = v
            .iter()
            .zip(&lambda_radial)
            .map(|(v, l)| if v.is_finite() { l * (1.0 + v * v).powf(1.5) } else { f64::INFINITY })
            .collect();
        Ok(Self {
            gamma: GammaSpec::from(gamma),
            alpha: gamma.alpha(),
            c0: gamma.umbilic_curvature(),
            epsilon: r[1],
            r,
            v,
            u,
            vdot,
            lambda_radial,
            lambda_tangential,
            status,
            config: SolverConfig::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_last(&self) -> f64 {
        *self.r.last().unwrap()
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.status, ProfileStatus::BallDetected { .. })
    }

    /// Largest `|γ(λ) - (1 + v²)^{-1/2}|` over all nodes, recomputed from
    /// the stored curvatures.
    pub fn max_translator_residual(&self, gamma: &SymmetricCurvature) -> f64 {
        let n = gamma.n();
        (0..self.len())
            .map(|i| {
                let mut lam = vec![self.lambda_tangential[i]; n];
                lam[0] = self.lambda_radial[i];
                let w = (1.0 + self.v[i] * self.v[i]).sqrt();
                (gamma.value(&lam) - 1.0 / w).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn interpolant(&self) -> ProfileInterpolant<'_> {
        ProfileInterpolant { sol: self }
    }
}

/// C² quintic Hermite interpolation of `u` through `(u, v, v')` at the nodes.
pub struct ProfileInterpolant<'a> {
    sol: &'a ProfileSolution,
}

const QUINTIC: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
];

impl ProfileInterpolant<'_> {
    pub fn r_max(&self) -> f64 {
        self.sol.r_last()
    }

    pub fn c0(&self) -> f64 {
        self.sol.c0
    }

    /// `(u, u', u'')` at radius `r`, or `None` outside `[0, r_last]`.
    pub fn eval(&self, r: f64) -> Option<(f64, f64, f64)> {
        let s = self.sol;
        if !(r >= 0.0 && r <= s.r_last()) {
            return None;
        }
        let i = match s.r.partition_point(|&x| x <= r) {
            0 => 0,
            p if p >= s.len() => s.len() - 2,
            p => p - 1,
        };
        let (r0, r1) = (s.r[i], s.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let data = [s.u[i], h * s.v[i], h * h * s.vdot[i], s.u[i + 1], h * s.v[i + 1], h * h * s.vdot[i + 1]];
        let mut coef = [0.0; 6];
        for (d, basis) in data.iter().zip(QUINTIC.iter()) {
            for j in 0..6 {
                coef[j] += d * basis[j];
            }
        }
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for j in (0..6).rev() {
            p = p * t + coef[j];
            if j >= 1 {
                dp = dp * t + j as f64 * coef[j];
            }
            if j >= 2 {
                ddp = ddp * t + (j * (j - 1)) as f64 * coef[j];
            }
        }
        Some((p, dp / h, ddp / (h * h)))
    }
}
