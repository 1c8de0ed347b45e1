//! The level set `γ(x, y, …, y) = 1` and the entire/ball classification of
//! the rotationally symmetric translator it determines.
//!
//! Solving the level set for `x = f(y)` is a monotone scalar root problem:
//! `γ` increases in its first argument. The asymptotics of `f` as
//! `y → ∞` (a positive limit, or power-law decay with exponent `k`
//! compared against `2α - 1`) decide whether the translator is entire or
//! lives over a ball. These are asymptotic conditions, so the classifier
//! samples `f` on a finite probe grid and applies explicit tolerances,
//! all of which are recorded in the result.

use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureFunction, GammaSpec, SymmetricCurvature};
use crate::error::{Error, Result};
use crate::roots::{bracket_increasing, solve_increasing, BracketFailure};

const X_FLOOR: f64 = 1e-300;
const X_CAP: f64 = 1e12;
const X_START: f64 = 1e-12;

/// `γ(x, y, …, y)` as a function of `x > 0` for fixed `y > 0`.
#[derive(Debug, Clone)]
pub struct ConstraintCurve {
    gamma: SymmetricCurvature,
    c0: f64,
}

impl ConstraintCurve {
    pub fn new(gamma: SymmetricCurvature) -> Self {
        let c0 = gamma.umbilic_curvature();
        Self { gamma, c0 }
    }

    pub fn gamma(&self) -> &SymmetricCurvature {
        &self.gamma
    }

    /// The point where the curve meets the diagonal `x = y`.
    pub fn umbilic_point(&self) -> f64 {
        self.c0
    }

    fn split(&self, x: f64, y: f64) -> Vec<f64> {
        let mut v = vec![y; self.gamma.n()];
        v[0] = x;
        v
    }

    /// `γ(0, y, …, y)`, inside the cone or through the boundary extension.
    /// `None` when neither is available.
    fn value_at_zero(&self, y: f64) -> Option<f64> {
        let lam = self.split(0.0, y);
        if self.gamma.cone_contains(&lam, true) {
            Some(self.gamma.value(&lam))
        } else {
            self.gamma.extend_to_boundary(&lam).ok()
        }
    }

    /// Solves `γ(x, y, …, y) = level` for `x > 0`, starting the bracket
    /// search at `guess` (or `1e-12`).
    pub fn solve_level(&self, y: f64, level: f64, guess: Option<f64>) -> Result<f64> {
        if !(y > 0.0 && y.is_finite() && level > 0.0 && level.is_finite()) {
            return Err(Error::Invalid(format!("need y > 0 and level > 0, got y = {y}, level = {level}")));
        }
        if let Some(g0) = self.value_at_zero(y) {
            if g0 >= level {
                return Err(Error::NoBracket {
                    y,
                    level,
                    reason: format!("γ(0, y, …, y) = {g0} already reaches the level"),
                });
            }
        }
        let mut f = |x: f64| self.gamma.value(&self.split(x, y));
        let start = guess.filter(|g| *g > 0.0 && g.is_finite()).unwrap_or(X_START);
        let (lo, hi) = bracket_increasing(&mut f, level, start, X_FLOOR, X_CAP).map_err(|e| Error::NoBracket {
            y,
            level,
            reason: match e {
                BracketFailure::AboveAtFloor => format!("γ(x, y, …) ≥ level for all x ≥ {X_FLOOR:e}"),
                BracketFailure::BelowAtCap => format!("γ(x, y, …) < level for all x ≤ {X_CAP:e}"),
            },
        })?;
        solve_increasing(&mut f, level, lo, hi)
    }

    /// `x = f(y)` on the unit level set.
    pub fn solve_x(&self, y: f64) -> Result<f64> {
        self.solve_level(y, 1.0, None)
    }

    /// `(y, f(y))` over the probe grid; a `None` entry marks a `y` outside
    /// the curve's domain.
    pub fn probe(&self, grid: &ProbeGrid) -> Vec<Probe> {
        grid.points()
            .into_iter()
            .map(|y| Probe { y, x: self.solve_x(y).ok() })
            .collect()
    }

    fn probe_all(&self, grid: &ProbeGrid) -> Result<Vec<(f64, f64)>> {
        grid.points().into_iter().map(|y| Ok((y, self.solve_x(y)?))).collect()
    }

    /// Estimate of `L = lim f(y)` as `y → ∞`.
    pub fn limit_l(&self, config: &ClassifierConfig) -> Result<LimitEstimate> {
        let pts = self.probe_all(&config.grid)?;
        Ok(limit_from_probes(&pts, config))
    }

    /// Least-squares fit of `log f = log C - k log y` over the probe grid.
    pub fn decay_exponent(&self, config: &ClassifierConfig) -> Result<DecayFit> {
        let pts = self.probe_all(&config.grid)?;
        Ok(fit_power_law(&pts))
    }
}

/// Log-spaced sample points in `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub y_min: f64,
    pub y_max: f64,
    pub count: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self { y_min: 1e2, y_max: 1e6, count: 25 }
    }
}

impl ProbeGrid {
    pub fn points(&self) -> Vec<f64> {
        let count = self.count.max(2);
        let (a, b) = (self.y_min.ln(), self.y_max.ln());
        (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub y: f64,
    pub x: Option<f64>,
}

/// Thresholds of the classifier. They turn asymptotic statements into a
/// finite procedure and are echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub grid: ProbeGrid,
    /// `|k - (2α - 1)| < margin` is treated as the critical band.
    pub margin: f64,
    /// Values above this count as positive (`γ(0,1,…,1)` and `L`).
    pub tol_pos: f64,
    /// Minimum coefficient of determination for a power-law fit.
    pub fit_floor: f64,
    /// Successive probes closer than this (relative) count as converged.
    pub converge_rel: f64,
    /// Probes below this are treated as zero.
    pub zero_abs: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            grid: ProbeGrid::default(),
            margin: 0.05,
            tol_pos: 1e-3,
            fit_floor: 0.999,
            converge_rel: 1e-3,
            zero_abs: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub converged: bool,
    pub rule: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub k: f64,
    pub log_c: f64,
    pub r_squared: f64,
}

fn fit_power_law(pts: &[(f64, f64)]) -> DecayFit {
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    DecayFit { k: -slope, log_c: intercept, r_squared: r2 }
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R²)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (a, b, r2)
}

fn limit_from_probes(pts: &[(f64, f64)], config: &ClassifierConfig) -> LimitEstimate {
    let m = pts.len();
    let (a, b) = (pts[m - 2].1, pts[m - 1].1);
    if a < config.zero_abs && b < config.zero_abs {
        return LimitEstimate { value: 0.0, converged: true, rule: "last probes below zero threshold".into() };
    }
    if (a - b).abs() <= config.converge_rel * b.abs() {
        let value = if b < config.zero_abs { 0.0 } else { b };
        return LimitEstimate { value, converged: true, rule: "successive probes agree".into() };
    }
    // power-law decay over the last decade of the grid
    let y_last = pts[m - 1].0;
    let tail: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.0 >= y_last / 10.0).collect();
    if tail.len() >= 3 {
        let fit = fit_power_law(&tail);
        if fit.k > config.margin && fit.r_squared >= config.fit_floor {
            return LimitEstimate {
                value: 0.0,
                converged: true,
                rule: format!("power-law decay with exponent {:.6} over the last decade", fit.k),
            };
        }
    }
    LimitEstimate { value: b, converged: false, rule: "no convergence on the probe grid".into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Entire,
    Ball,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub gamma: GammaSpec,
    pub label: String,
    pub alpha: f64,
    pub verdict: Verdict,
    pub gamma0: f64,
    pub l_estimate: Option<LimitEstimate>,
    pub k_estimate: Option<DecayFit>,
    /// Critical exponent `2α - 1`.
    pub threshold: f64,
    pub evidence: Vec<String>,
    pub probes: Vec<Probe>,
    pub config: ClassifierConfig,
}

impl ClassificationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serializes")
    }
}

/// Decides whether the bowl-type translator of `gamma` is entire or lives
/// over a ball.
///
/// 1. `γ(0,1,…,1) > tol_pos` ⇒ entire.
/// 2. `L > tol_pos` ⇒ ball.
/// 3. `L = 0`: with fitted decay exponent `k` and threshold `2α - 1`,
///    `k ≥ thr + margin` ⇒ entire, `0 < k ≤ thr - margin` ⇒ ball. Inside
///    the band, an exact power law with `k = thr` (to `1e-6`, `R² ≥ 1 - 1e-9`)
///    is entire; anything else is undetermined.
/// 4. A curve whose domain in `y` is bounded, a non-converged limit or a
///    poor fit is undetermined.
pub fn classify(gamma: &SymmetricCurvature, config: &ClassifierConfig) -> Result<ClassificationResult> {
    let gamma0 = gamma.gamma0()?;
    let alpha = gamma.alpha();
    let threshold = 2.0 * alpha - 1.0;
    let curve = ConstraintCurve::new(gamma.clone());
    let probes = curve.probe(&config.grid);
    let mut out = ClassificationResult {
        gamma: GammaSpec::from(gamma),
        label: gamma.label(),
        alpha,
        verdict: Verdict::Undetermined,
        gamma0,
        l_estimate: None,
        k_estimate: None,
        threshold,
        evidence: Vec::new(),
        probes,
        config: config.clone(),
    };

    if gamma0 > config.tol_pos {
        out.verdict = Verdict::Entire;
        out.evidence.push(format!("γ(0,1,…,1) = {gamma0} > 0: entire"));
        return Ok(out);
    }
    out.evidence.push(format!("γ(0,1,…,1) = {gamma0} (not positive)"));

    let pts: Vec<(f64, f64)> = match out.probes.iter().map(|p| p.x.map(|x| (p.y, x))).collect() {
        Some(p) => p,
        None => {
            out.evidence.push("level set has bounded domain in y on the probe grid".into());
            return Ok(out);
        }
    };
    let limit = limit_from_probes(&pts, config);
    out.evidence.push(format!("L ≈ {} (converged: {}, {})", limit.value, limit.converged, limit.rule));
    out.l_estimate = Some(limit.clone());
    if !limit.converged {
        return Ok(out);
    }
    if limit.value > config.tol_pos {
        out.verdict = Verdict::Ball;
        out.evidence.push("x → L > 0: ball".into());
        return Ok(out);
    }

    let fit = fit_power_law(&pts);
    out.k_estimate = Some(fit);
    out.evidence.push(format!("x ≈ C y^(-k) with k = {:.9}, R² = {:.12}", fit.k, fit.r_squared));
    if fit.r_squared < config.fit_floor {
        out.evidence.push(format!("fit quality below floor {}", config.fit_floor));
        return Ok(out);
    }
    let k = fit.k;
    if k >= threshold + config.margin {
        out.verdict = Verdict::Entire;
        out.evidence.push(format!("k ≥ 2α-1 = {threshold} + margin: x = O(y^-(2α-1)), entire"));
    } else if (k - threshold).abs() < config.margin {
        if (k - threshold).abs() <= 1e-6 && fit.r_squared >= 1.0 - 1e-9 {
            out.verdict = Verdict::Entire;
            out.evidence.push(format!("exact power law at the critical exponent {threshold}: entire"));
        } else {
            out.evidence.push(format!("k within {} of the critical exponent {threshold}", config.margin));
        }
    } else if k > 0.0 {
        out.verdict = Verdict::Ball;
        out.evidence.push(format!("0 < k ≤ 2α-1 = {threshold} - margin: ball"));
    } else {
        out.evidence.push("non-positive decay exponent".into());
    }
    Ok(out)
}
