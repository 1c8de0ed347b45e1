//! Subcommand implementations. Each returns a JSON report plus named
//! artifacts; writing them is left to the caller.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use translab_core::bowl::{integrate_profile, ProfileMetadata, ProfileSolution, ProfileStatus, SolverConfig};
use translab_core::constraint::{classify, ClassifierConfig, Verdict};
use translab_core::curvature::{verify_axioms, ConeSampler};
use translab_core::geometry::{
    height_identity_residual, laplacian_identity_residual, linearization_ellipticity, refinement_study,
    translator_height_equation, translator_residual, Ellipsoid, GraphSample, Grid, ScalarField, Sphere,
    SurfaceMode, SurfaceSample,
};
use translab_core::moving_planes::{first_touch_shift, symmetry_scan, OrderOptions, PointCloudSurface};
use translab_core::{CurvatureFunction, GammaSpec, SymmetricCurvature};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct Outcome {
    pub report: Value,
    /// `(file name, contents)` pairs written under the output directory.
    pub files: Vec<(String, String)>,
}

const AXIOM_TOL: f64 = 1e-10;
const DEFAULT_SEED: u64 = 0x5eed;

fn header(command: &str, run: &RunConfig, gamma: &SymmetricCurvature) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(translab_core::VERSION));
    m.insert("config".into(), json!(run));
    m.insert("gamma".into(), json!(GammaSpec::from(gamma)));
    m.insert("label".into(), json!(gamma.label()));
    m.insert("alpha".into(), json!(gamma.alpha()));
    m
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn classify_cmd(run: RunConfig) -> Result<Outcome, CliError> {
    let (run, gamma) = run.resolve("mean")?;
    let mut cfg = ClassifierConfig::default();
    if let Some(tol) = run.tol {
        cfg.tol_pos = tol;
    }
    let result = classify(&gamma, &cfg)?;
    let mut m = header("classify", &run, &gamma);
    m.insert("classification".into(), to_value(&result));
    Ok(Outcome { report: Value::Object(m), files: vec![] })
}

fn solver_config(run: &RunConfig) -> SolverConfig {
    let mut cfg = SolverConfig { r_budget: run.budget, ..SolverConfig::default() };
    if let Some(eps) = run.eps {
        cfg.epsilon_start = eps;
    }
    cfg
}

pub fn profile_cmd(run: RunConfig) -> Result<Outcome, CliError> {
    let (run, gamma) = run.resolve("mean")?;
    let mut cfg = solver_config(&run);
    if let Some(tol) = run.tol {
        cfg.rtol = tol;
    }
    let sol = integrate_profile(&gamma, &cfg)?;
    let meta = ProfileMetadata::new(&sol, &gamma);
    let mut m = header("profile", &run, &gamma);
    m.insert("profile".into(), to_value(&meta));
    Ok(Outcome { report: Value::Object(m), files: vec![("profile.csv".into(), sol.to_csv())] })
}

/// Bowl profile long enough for a sampled domain, and that domain's radius.
fn bowl_for_sampling(run: &RunConfig, gamma: &SymmetricCurvature) -> Result<(ProfileSolution, f64), CliError> {
    let c0 = gamma.umbilic_curvature();
    let mut cfg = solver_config(run);
    if cfg.r_budget.is_none() {
        cfg.r_budget = Some(run.radius.map_or(3.0 / c0, |r| 1.01 * r));
    }
    let sol = integrate_profile(gamma, &cfg)?;
    let default = match sol.status {
        ProfileStatus::BallDetected { r_stop, .. } => 0.75 * r_stop,
        ProfileStatus::EntireBudgetReached { .. } => (1.5 / c0).min(sol.r_last()),
    };
    let radius = run.radius.unwrap_or(default);
    if !(radius > 0.0 && radius <= sol.r_last()) {
        return Err(config_err(format!("radius {radius} outside the computed profile (0, {}]", sol.r_last())));
    }
    Ok((sol, radius))
}

fn default_grid(n: usize) -> usize {
    match n {
        2 => 101,
        3 => 21,
        _ => 9,
    }
}

fn grid_count(run: &RunConfig, default: usize) -> Result<usize, CliError> {
    let c = run.grid.unwrap_or(default);
    if c < 5 {
        return Err(config_err(format!("grid needs at least 5 points per axis, got {c}")));
    }
    Ok(c)
}

fn field_entry(name: &str, field: &ScalarField, tol: f64) -> Value {
    let s = field.summary();
    json!({
        "name": name,
        "summary": to_value(&s),
        "tol": tol,
        "within_tol": s.evaluated > 0 && s.max_abs <= tol,
    })
}

fn refinement_entry(
    name: &str,
    levels: &[(Grid, ScalarField)],
    tol: f64,
    files: &mut Vec<(String, String)>,
) -> Result<Value, CliError> {
    let study = refinement_study(levels)?;
    let finest = study.max_abs.last().copied().unwrap_or(f64::NAN);
    let min_order = study.orders.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some((_, f)) = levels.last() {
        files.push((format!("check_{name}.csv"), f.to_csv()));
    }
    Ok(json!({
        "name": name,
        "refinement": to_value(&study),
        "min_order": min_order,
        "finest_max_abs": finest,
        "tol": tol,
        "within_tol": finest <= tol,
    }))
}

const GRAPH_CHECKS: [&str; 4] = ["translator-residual", "height-equation", "height-identity", "laplacian-identity"];

pub fn check_cmd(run: RunConfig) -> Result<Outcome, CliError> {
    let (run, gamma) = run.resolve("mean")?;
    let surface = run.surface.clone().unwrap_or_else(|| "bowl".into());
    let tol = run.tol.unwrap_or(5e-4);
    let available: Vec<&str> = match surface.as_str() {
        "bowl" => vec!["axioms", "translator-residual", "height-equation", "height-identity", "ellipticity"],
        "flat" | "paraboloid" => [&["axioms"][..], &GRAPH_CHECKS].concat(),
        "sphere" | "ellipsoid" => vec!["axioms", "height-identity", "laplacian-identity"],
        other => return Err(config_err(format!("unknown surface {other:?} for check"))),
    };
    let checks: Vec<String> = run.checks.clone().unwrap_or_else(|| available.iter().map(|s| s.to_string()).collect());
    for c in &checks {
        if !available.contains(&c.as_str()) {
            return Err(config_err(format!("check {c:?} is not available on surface {surface:?}; choose from {available:?}")));
        }
    }
    let mut files = Vec::new();
    let mut entries = Vec::new();
    let mut extra = serde_json::Map::new();
    let n = gamma.n();
    match surface.as_str() {
        "bowl" | "flat" | "paraboloid" => {
            let count = grid_count(&run, default_grid(n))?;
            let (sample, radius) = if surface == "bowl" {
                let (sol, radius) = bowl_for_sampling(&run, &gamma)?;
                extra.insert("profile_status".into(), to_value(&sol.status));
                let grid = Grid::cube(n, radius, count)?;
                (GraphSample::from_profile(grid, &sol)?.restrict_to_ball(radius), radius)
            } else {
                let radius = run.radius.unwrap_or(1.0);
                let grid = Grid::cube(n, radius, count)?;
                let c = if surface == "flat" { 0.0 } else { 0.5 };
                let s = GraphSample::from_function(grid, |x| c * x.iter().map(|v| v * v).sum::<f64>())?;
                (s.restrict_to_ball(radius), radius)
            };
            extra.insert("radius".into(), json!(radius));
            extra.insert("grid".into(), to_value(sample.grid()));
            for c in &checks {
                let field = match c.as_str() {
                    "translator-residual" => translator_residual(&gamma, &sample),
                    "height-equation" => translator_height_equation(&gamma, &sample),
                    "height-identity" => height_identity_residual(&gamma, &sample),
                    "laplacian-identity" => laplacian_identity_residual(&sample),
                    "ellipticity" => {
                        let shift = run.shift.unwrap_or(1.0);
                        let upper = sample.shifted(shift);
                        let rep = linearization_ellipticity(&gamma, &sample, &upper, &[0.25, 0.5, 0.75])?;
                        entries.push(json!({
                            "name": c,
                            "shift": shift,
                            "report": to_value(&rep),
                            "positive": rep.min_eigenvalue > 0.0,
                        }));
                        continue;
                    }
                    _ => {
                        entries.push(axiom_entry(&run, &gamma));
                        continue;
                    }
                };
                files.push((format!("check_{c}.csv"), field.to_csv()));
                entries.push(field_entry(c, &field, tol));
            }
        }
        _ => {
            if n != 2 {
                return Err(config_err("sphere and ellipsoid checks are surfaces in R^3 (n = 2)"));
            }
            let count = grid_count(&run, 26)?;
            let sphere;
            let ellipsoid;
            let chart: &dyn translab_core::geometry::Chart = if surface == "sphere" {
                sphere = Sphere::new(run.radius.unwrap_or(1.0), [0.0; 3])?;
                &sphere
            } else {
                ellipsoid = Ellipsoid::new(1.0, 1.0, 2.0)?;
                &ellipsoid
            };
            let coarse = Ellipsoid::new(1.0, 1.0, 1.0)?.parameter_grid(0.3, count)?;
            let mut samples = Vec::new();
            let mut grid = coarse;
            for _ in 0..3 {
                samples.push((grid.clone(), SurfaceSample::new(&chart, grid.clone(), SurfaceMode::FiniteDifference)?));
                grid = grid.refined();
            }
            for c in &checks {
                if c == "axioms" {
                    entries.push(axiom_entry(&run, &gamma));
                    continue;
                }
                let levels: Vec<(Grid, ScalarField)> = samples
                    .iter()
                    .map(|(g, s)| {
                        let f = if c == "height-identity" {
                            height_identity_residual(&gamma, s)
                        } else {
                            laplacian_identity_residual(s)
                        };
                        (g.clone(), f)
                    })
                    .collect();
                entries.push(refinement_entry(c, &levels, tol, &mut files)?);
            }
        }
    }
    let mut m = header("check", &run, &gamma);
    m.insert("surface".into(), json!(surface));
    m.extend(extra);
    m.insert("checks".into(), Value::Array(entries));
    Ok(Outcome { report: Value::Object(m), files })
}

fn axiom_entry(run: &RunConfig, gamma: &SymmetricCurvature) -> Value {
    let sampler = ConeSampler::with_count(1000, run.seed.unwrap_or(DEFAULT_SEED));
    let rep = verify_axioms(gamma, &sampler);
    json!({
        "name": "axioms",
        "sampler": to_value(&sampler),
        "report": to_value(&rep),
        "tol": AXIOM_TOL,
        "within_tol": rep.holds(AXIOM_TOL),
    })
}

fn require_surface_dim(gamma: &SymmetricCurvature) -> Result<(), CliError> {
    if gamma.n() != 2 {
        return Err(config_err("moving-plane commands work on surfaces in R^3 (n = 2)"));
    }
    Ok(())
}

pub fn symmetry_cmd(run: RunConfig) -> Result<Outcome, CliError> {
    let (run, gamma) = run.resolve("mean")?;
    require_surface_dim(&gamma)?;
    let surface = run.surface.clone().unwrap_or_else(|| "bowl".into());
    let count = grid_count(&run, 121)?;
    let (cloud, radius) = match surface.as_str() {
        "bowl" | "bumped" => {
            let (sol, radius) = bowl_for_sampling(&run, &gamma)?;
            let grid = Grid::cube(2, radius, count)?;
            let sample = if surface == "bowl" {
                GraphSample::from_profile(grid, &sol)?.restrict_to_ball(radius)
            } else {
                // off-centre Gaussian bump of fixed shape relative to the domain
                let it = sol.interpolant();
                let s = radius / 3.0;
                let centre = [-0.7 * s, 0.4 * s];
                GraphSample::from_function(grid, |x| {
                    let r = x[0].hypot(x[1]);
                    if r > radius {
                        return f64::NAN;
                    }
                    let d2 = ((x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2)) / (s * s);
                    it.eval(r).map_or(f64::NAN, |p| p.0) + 0.1 * s * (-d2).exp()
                })?
            };
            (PointCloudSurface::from_graph(&sample)?, radius)
        }
        "cylinder" => {
            let radius = run.radius.unwrap_or(1.0);
            (PointCloudSurface::cylinder(radius, 2.0 * radius, 96, 33)?, radius)
        }
        other => return Err(config_err(format!("unknown surface {other:?} for symmetry"))),
    };
    let angle = run.angle.unwrap_or(0.0);
    let cloud = if angle != 0.0 { cloud.rotated_about_vertical(angle) } else { cloud };
    let t_count = run.t_count.unwrap_or(20);
    if t_count == 0 {
        return Err(config_err("t_count must be positive"));
    }
    let ts: Vec<f64> = (0..t_count)
        .map(|i| {
            let f = if t_count == 1 { 0.5 } else { 0.05 + 0.9 * i as f64 / (t_count - 1) as f64 };
            f * radius
        })
        .collect();
    let opts = OrderOptions { cell_size: None, tolerance: run.tol };
    let reports = symmetry_scan(&cloud, &ts, &opts)?;
    let violations = reports.iter().filter(|r| !r.holds).count();
    let worst = reports
        .iter()
        .filter(|r| r.worst_gap.is_some())
        .max_by(|a, b| a.worst_gap.partial_cmp(&b.worst_gap).expect("finite gaps"));
    let mut files = Vec::new();
    if let Some(w) = worst {
        files.push(("symmetry_heatmap.csv".into(), w.heatmap_csv()));
    }
    let mut m = header("symmetry", &run, &gamma);
    m.insert("surface".into(), json!(surface));
    m.insert("radius".into(), json!(radius));
    m.insert("angle".into(), json!(angle));
    m.insert("points".into(), json!(cloud.points().len()));
    m.insert("violations".into(), json!(violations));
    m.insert("worst_gap".into(), json!(worst.and_then(|w| w.worst_gap)));
    m.insert("worst_t".into(), json!(worst.and_then(|w| w.t)));
    m.insert("reports".into(), to_value(&reports));
    Ok(Outcome { report: Value::Object(m), files })
}

pub fn touch_cmd(run: RunConfig) -> Result<Outcome, CliError> {
    let (run, gamma) = run.resolve("mean")?;
    let scenario = run.surface.clone().unwrap_or_else(|| "shifted".into());
    let (sol, radius) = bowl_for_sampling(&run, &gamma)?;
    let grid = Grid::cube(gamma.n(), radius, grid_count(&run, default_grid(gamma.n()).min(81))?)?;
    let lower = GraphSample::from_profile(grid.clone(), &sol)?.restrict_to_ball(radius);
    let shift = run.shift.unwrap_or(3.0);
    let upper = match scenario.as_str() {
        "shifted" => lower.shifted(shift),
        "perturbed" => {
            // the bowl plus a convex perturbation vanishing at the apex
            let it = sol.interpolant();
            GraphSample::from_function(grid, |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                if r2 > radius * radius {
                    return f64::NAN;
                }
                it.eval(r2.sqrt()).map_or(f64::NAN, |p| p.0) + 0.05 * r2 + shift
            })?
        }
        other => return Err(config_err(format!("unknown touch scenario {other:?}"))),
    };
    let rep = first_touch_shift(&lower, &upper, run.tol)?;
    let mut m = header("touch", &run, &gamma);
    m.insert("scenario".into(), json!(scenario));
    m.insert("radius".into(), json!(radius));
    m.insert("shift".into(), json!(shift));
    m.insert("touch".into(), to_value(&rep));
    Ok(Outcome { report: Value::Object(m), files: vec![] })
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    n: usize,
    label: String,
    alpha: f64,
    verdict: Option<Verdict>,
    /// `γ(1, …, 1)^{1/α}`.
    r0: f64,
    status: Option<ProfileStatus>,
    r_max: Option<f64>,
    r_max_bound: Option<f64>,
    r_max_over_r0: Option<f64>,
    growth: Option<f64>,
    growth_predicted: Option<f64>,
    max_translator_residual: Option<f64>,
    error: Option<String>,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        fn opt(x: Option<f64>) -> String {
            x.map_or(String::new(), |v| format!("{v:e}"))
        }
        let verdict = self.verdict.map_or(String::new(), |v| format!("{v:?}"));
        format!(
            "{},{:e},{},{:e},{},{},{},{},{},{},{}",
            self.n,
            self.alpha,
            verdict,
            self.r0,
            opt(self.r_max),
            opt(self.r_max_bound),
            opt(self.r_max_over_r0),
            opt(self.growth),
            opt(self.growth_predicted),
            opt(self.max_translator_residual),
            self.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
        )
    }
}

fn sweep_row(gamma: &SymmetricCurvature, solver: &SolverConfig) -> SweepRow {
    let alpha = gamma.alpha();
    let mut row = SweepRow {
        n: gamma.n(),
        label: gamma.label(),
        alpha,
        verdict: None,
        r0: gamma.at_ones().powf(1.0 / alpha),
        status: None,
        r_max: None,
        r_max_bound: None,
        r_max_over_r0: None,
        growth: None,
        growth_predicted: None,
        max_translator_residual: None,
        error: None,
    };
    match classify(gamma, &ClassifierConfig::default()) {
        Ok(c) => row.verdict = Some(c.verdict),
        Err(e) => row.error = Some(format!("classify: {e}")),
    }
    match integrate_profile(gamma, solver) {
        Ok(sol) => {
            let meta = ProfileMetadata::new(&sol, gamma);
            row.status = Some(meta.status);
            row.max_translator_residual = Some(meta.max_translator_residual);
            if let Some(b) = meta.blow_up {
                row.r_max = Some(b.r_max);
                row.r_max_bound = Some(b.bound);
                row.r_max_over_r0 = Some(b.r_max / row.r0);
            }
            if let Some(g) = meta.growth {
                row.growth = Some(g.coefficient);
                row.growth_predicted = Some(g.predicted);
            }
        }
        Err(e) => {
            let msg = format!("profile: {e}");
            row.error = Some(row.error.take().map_or(msg.clone(), |m| format!("{m}; {msg}")));
        }
    }
    row
}

/// Numbers use the same `{:e}` form as the profile CSV.
pub const SWEEP_CSV_HEADER: &str =
    "n,alpha,verdict,r0,r_max,r_max_bound,r_max_over_r0,growth,growth_predicted,max_translator_residual,error";

pub fn sweep_cmd(mut run: RunConfig) -> Result<Outcome, CliError> {
    let family = run.gamma_spec("h-times-sn")?;
    let n_min = run.n_min.unwrap_or(2);
    let n_max = run.n_max.unwrap_or(6);
    if n_min < 1 || n_min > n_max || n_max > 16 {
        return Err(config_err(format!("need 1 <= n_min <= n_max <= 16, got {n_min}..={n_max}")));
    }
    let mut gammas = Vec::new();
    for n in n_min..=n_max {
        let mut spec = family.clone();
        spec.n = Some(n);
        gammas.push(spec.build()?);
    }
    let solver = solver_config(&run);
    solver.validate()?;
    // rows are independent and deterministic, so parallel order does not matter
    let rows: Vec<SweepRow> = gammas.par_iter().map(|g| sweep_row(g, &solver)).collect();

    let mut family_spec = GammaSpec::from(&gammas[0]);
    family_spec.n = None;
    run.canonicalize(family_spec.clone());
    run.n = None;
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_line());
        csv.push('\n');
    }
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!("sweep"));
    m.insert("version".into(), json!(translab_core::VERSION));
    m.insert("config".into(), json!(run));
    m.insert("gamma".into(), json!(family_spec));
    m.insert("solver".into(), to_value(&solver));
    m.insert("classifier".into(), to_value(&ClassifierConfig::default()));
    m.insert("rows".into(), to_value(&rows));
    Ok(Outcome { report: Value::Object(m), files: vec![("sweep.csv".into(), csv)] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_has_header_width() {
        let g = SymmetricCurvature::mean(2).unwrap();
        let row = sweep_row(&g, &SolverConfig { r_budget: Some(20.0), ..Default::default() });
        assert_eq!(row.csv_line().split(',').count(), SWEEP_CSV_HEADER.split(',').count());
        assert!(row.growth.is_some() && row.r_max.is_none());
    }
}
