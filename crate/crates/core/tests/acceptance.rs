//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured numbers before asserting.

use std::time::{Duration, Instant};

use translab_core::bowl::{
    blow_up_radius, curvature_asymptotics, entire_growth_coefficient, integrate_profile, slope_derivative,
    SolverConfig,
};
use translab_core::constraint::{classify, ClassifierConfig, ConstraintCurve, Verdict};
use translab_core::curvature::{verify_axioms, ConeSampler};
use translab_core::geometry::{
    height_identity_residual, linearization_ellipticity, refinement_study, translator_height_equation, Chart,
    Ellipsoid, GraphSample, Grid, Sphere, SurfaceMode, SurfaceSample,
};
use translab_core::moving_planes::{order_leq, symmetry_scan, OrderOptions, PointCloudSurface};
use translab_core::{CurvatureFunction, GammaSpec, SymmetricCurvature};

fn verdict_line(id: u32, name: &str, pass: bool, detail: &str) {
    println!("ACCEPTANCE {id} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn check(id: u32, name: &str, pass: bool, detail: String) {
    verdict_line(id, name, pass, &detail);
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn h_times_sn(n: usize) -> SymmetricCurvature {
    SymmetricCurvature::h_times_sn(n).unwrap()
}

fn mean(n: usize) -> SymmetricCurvature {
    SymmetricCurvature::mean(n).unwrap()
}

const RUNTIME_LIMIT: Duration = Duration::from_secs(10);

#[test]
fn criterion_1_ball_radius() {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [2usize, 3] {
        let started = Instant::now();
        let g = h_times_sn(n);
        let verdict = classify(&g, &ClassifierConfig::default()).unwrap().verdict;
        let sol = integrate_profile(&g, &SolverConfig::default()).unwrap();
        let b = blow_up_radius(&sol).unwrap();
        let elapsed = started.elapsed();
        let target = (n as f64).powf(1.0 / (n as f64 + 1.0));
        let rel = (b.r_max - target).abs() / target;
        let ok = verdict == Verdict::Ball && rel <= 0.02 && elapsed < RUNTIME_LIMIT;
        pass &= ok;
        detail.push(format!(
            "n={n}: verdict {verdict:?}, r_max {:.6} ± {:.1e} vs {target:.6}, rel err {:.2}%, {elapsed:.2?}",
            b.r_max,
            b.bound,
            100.0 * rel
        ));
    }
    check(1, "ball radius", pass, detail.join("; "));
}

#[test]
fn criterion_2_entire_growth() {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [2usize, 3] {
        let started = Instant::now();
        let g = mean(n);
        let verdict = classify(&g, &ClassifierConfig::default()).unwrap().verdict;
        let sol = integrate_profile(&g, &SolverConfig { r_budget: Some(50.0), ..Default::default() }).unwrap();
        let fit = entire_growth_coefficient(&sol, &g).unwrap();
        let elapsed = started.elapsed();
        let target = 1.0 / (2.0 * (n as f64 - 1.0));
        let rel = (fit.coefficient - target).abs() / target;
        let ok = verdict == Verdict::Entire && rel <= 0.05 && elapsed < RUNTIME_LIMIT;
        pass &= ok;
        detail.push(format!(
            "n={n}: verdict {verdict:?}, coefficient {:.6} vs {target:.6}, rel err {:.3}%, {elapsed:.2?}",
            fit.coefficient,
            100.0 * rel
        ));
    }
    check(2, "entire growth", pass, detail.join("; "));
}

#[test]
fn criterion_3_classification_oracle() {
    let cases = [
        (mean(2), Verdict::Entire),
        (h_times_sn(2), Verdict::Ball),
        (SymmetricCurvature::sigma_root(2, 2).unwrap(), Verdict::Entire),
    ];
    let mut agree = 0;
    let mut detail = Vec::new();
    for (g, want) in &cases {
        let got = classify(g, &ClassifierConfig::default()).unwrap().verdict;
        if got == *want {
            agree += 1;
        }
        detail.push(format!("{}: {got:?}", g.label()));
    }
    check(3, "classification oracle", agree == cases.len(), format!("{agree}/{} agree; {}", cases.len(), detail.join(", ")));
}

#[test]
fn criterion_4_cylinder_asymptotics() {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in 2..=6 {
        let g = h_times_sn(n);
        let sol = integrate_profile(&g, &SolverConfig::default()).unwrap();
        assert!(sol.is_ball(), "H·S_{n} profile is not ball-type");
        let a = curvature_asymptotics(&sol).unwrap();
        let flat = a.lambda_radial_last < 0.05 * a.lambda_tangential_last;
        let cyl = (a.lambda_tangential_last - 1.0 / a.r_max).abs() <= 0.03 / a.r_max;
        pass &= flat && cyl;
        detail.push(format!(
            "n={n}: λ1 {:.2e}, λtan {:.6}, 1/r_max {:.6}",
            a.lambda_radial_last,
            a.lambda_tangential_last,
            1.0 / a.r_max
        ));
    }
    check(4, "cylinder asymptotics", pass, detail.join("; "));
}

fn built_in() -> Vec<SymmetricCurvature> {
    let product = GammaSpec::from_json(
        r#"{"kind": "product", "n": 3, "params": {"factors": [
            {"gamma": {"kind": "mean"}, "exponent": "1/2"},
            {"gamma": {"kind": "sigma-root", "params": {"k": 3}}, "exponent": "3/2"}]}}"#,
    )
    .unwrap()
    .build()
    .unwrap();
    vec![
        mean(2),
        mean(3),
        mean(5),
        SymmetricCurvature::sigma_root(2, 2).unwrap(),
        SymmetricCurvature::sigma_root(3, 2).unwrap(),
        SymmetricCurvature::sigma_root(4, 3).unwrap(),
        SymmetricCurvature::harmonic_inverse(3, 2).unwrap(),
        SymmetricCurvature::harmonic_inverse(4, 4).unwrap(),
        SymmetricCurvature::hessian_quotient(3, 2, 1).unwrap(),
        SymmetricCurvature::hessian_quotient(4, 3, 1).unwrap(),
        h_times_sn(2),
        h_times_sn(3),
        h_times_sn(5),
        product,
    ]
}

/// Largest relative deviation of the analytic gradient from central
/// differences.
fn fd_gradient_error(g: &SymmetricCurvature, points: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for lambda in points {
        let grad = g.grad(lambda);
        let scale = grad.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let size = lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..lambda.len() {
            let h = 1e-5 * size;
            let mut p = lambda.clone();
            let mut q = lambda.clone();
            p[i] += h;
            q[i] -= h;
            let fd = (g.value(&p) - g.value(&q)) / (2.0 * h);
            worst = worst.max((fd - grad[i]).abs() / scale);
        }
    }
    worst
}

#[test]
fn criterion_5_axioms() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, g) in built_in().iter().enumerate() {
        let sampler = ConeSampler::with_count(1000, 1000 + i as u64);
        let rep = verify_axioms(g, &sampler);
        let fd = fd_gradient_error(g, &sampler.sample(g));
        let ok = rep.samples == 1000 && rep.euler <= 1e-10 && rep.symmetry <= 1e-12 && fd <= 1e-6;
        pass &= ok;
        detail.push(format!("{}: euler {:.1e}, sym {:.1e}, fd {:.1e}", g.label(), rep.euler, rep.symmetry, fd));
    }
    check(5, "axioms", pass, detail.join("; "));
}

#[test]
fn criterion_6_identity_convergence() {
    let mut pass = true;
    let mut detail = Vec::new();
    let sphere = Sphere::new(1.0, [0.0; 3]).unwrap();
    let ellipsoid = Ellipsoid::new(1.0, 1.0, 2.0).unwrap();
    let surfaces: [(&str, &dyn Chart); 2] = [("sphere", &sphere), ("ellipsoid", &ellipsoid)];
    for (name, chart) in surfaces {
        for g in [mean(2), SymmetricCurvature::sigma_root(2, 2).unwrap(), h_times_sn(2)] {
            let mut grid = ellipsoid.parameter_grid(0.3, 26).unwrap();
            let mut levels = Vec::new();
            for _ in 0..3 {
                let s = SurfaceSample::new(&chart, grid.clone(), SurfaceMode::FiniteDifference).unwrap();
                levels.push((grid.clone(), height_identity_residual(&g, &s)));
                grid = grid.refined();
            }
            let study = refinement_study(&levels).unwrap();
            let decreasing = study.max_abs.windows(2).all(|w| w[1] < w[0]);
            let min_order = study.orders.iter().copied().fold(f64::INFINITY, f64::min);
            pass &= decreasing && min_order >= 1.8;
            detail.push(format!("{name} {}: errors {:?}, min order {min_order:.3}", g.label(), study.max_abs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()));
        }
    }
    for (g, radius) in [(mean(2), 3.0), (h_times_sn(2), 1.2)] {
        let sol = integrate_profile(&g, &SolverConfig { r_budget: Some(4.0), ..Default::default() }).unwrap();
        let grid = Grid::cube(2, radius, 101).unwrap();
        let bowl = GraphSample::from_profile(grid, &sol).unwrap().restrict_to_ball(radius);
        let field = translator_height_equation(&g, &bowl);
        let sup = field.max_abs();
        pass &= field.evaluated() > 5000 && sup <= 5e-4;
        detail.push(format!("bowl {}: sup {sup:.2e} over {} points", g.label(), field.evaluated()));
    }
    check(6, "identity convergence", pass, detail.join("; "));
}

/// `v̇` for the mean curvature from the linear translator relation.
fn mean_slope_closed_form(n: usize, r: f64, v: f64) -> f64 {
    (1.0 + v * v) * (1.0 - (n as f64 - 1.0) * v / r)
}

#[test]
fn criterion_7_ode_self_consistency() {
    let mut pass = true;
    let mut detail = Vec::new();

    let mut worst_res = 0.0f64;
    for g in [mean(2), mean(3), SymmetricCurvature::sigma_root(3, 2).unwrap(), h_times_sn(2), h_times_sn(3)] {
        let budget = if g.label().starts_with('H') { None } else { Some(20.0) };
        let sol = integrate_profile(&g, &SolverConfig { r_budget: budget, ..Default::default() }).unwrap();
        worst_res = worst_res.max(sol.max_translator_residual(&g));
    }
    pass &= worst_res <= 1e-8;
    detail.push(format!("max node residual {worst_res:.1e}"));

    let mut closed = 0.0f64;
    for n in [2usize, 3] {
        let g = mean(n);
        for &(r, v) in &[(2.0, 1.0), (3.0, 0.5), (0.5, 0.1), (10.0, 2.0), (50.0, 20.0)] {
            let want = mean_slope_closed_form(n, r, v);
            if want <= 0.0 {
                continue;
            }
            let got = slope_derivative(&g, r, v).unwrap();
            closed = closed.max((got - want).abs() / want.abs().max(1.0));
        }
    }
    pass &= closed <= 1e-10;
    detail.push(format!("mean closed form {closed:.1e}"));

    // α = 1: v̇ = (1 + v²) f(v / r) with f the level-one curve
    let mut composed = 0.0f64;
    for g in [mean(2), SymmetricCurvature::sigma_root(3, 2).unwrap(), SymmetricCurvature::harmonic_inverse(3, 3).unwrap()] {
        assert!((g.alpha() - 1.0).abs() < 1e-15);
        let curve = ConstraintCurve::new(g.clone());
        for &(r, v) in &[(2.0, 0.3), (4.0, 1.0), (1.0, 0.05), (30.0, 5.0)] {
            let Ok(f) = curve.solve_x(v / r) else { continue };
            let want = (1.0 + v * v) * f;
            let got = slope_derivative(&g, r, v).unwrap();
            composed = composed.max((got - want).abs() / want.abs().max(1.0));
        }
    }
    pass &= composed <= 1e-8;
    detail.push(format!("composed form {composed:.1e}"));

    for n in [2usize, 3] {
        let g = h_times_sn(n);
        let a = blow_up_radius(&integrate_profile(&g, &SolverConfig::default()).unwrap()).unwrap();
        let cfg = SolverConfig { epsilon_start: 0.5e-4, ..Default::default() };
        let b = blow_up_radius(&integrate_profile(&g, &cfg).unwrap()).unwrap();
        let change = (a.r_max - b.r_max).abs();
        let bound = a.bound.max(b.bound);
        pass &= change <= bound;
        detail.push(format!("n={n} halving ε moves r_max by {change:.1e} (bound {bound:.1e})"));
    }
    check(7, "ODE self-consistency", pass, detail.join("; "));
}

fn bowl_sample(radius: f64, count: usize) -> GraphSample {
    let sol = integrate_profile(&mean(2), &SolverConfig { r_budget: Some(radius + 1.0), ..Default::default() }).unwrap();
    GraphSample::from_profile(Grid::cube(2, radius, count).unwrap(), &sol).unwrap().restrict_to_ball(radius)
}

fn wavy_over_plane(coef: [f64; 4], count: usize) -> PointCloudSurface {
    let grid = Grid::cube(2, 1.0, count).unwrap();
    let s = GraphSample::from_function(grid, |x| {
        coef[0] + coef[1] * x[0] + coef[2] * (2.0 * x[1]).sin() + coef[3] * x[0] * x[1]
    })
    .unwrap();
    PointCloudSurface::from_graph_over_plane(&s).unwrap()
}

#[test]
fn criterion_8_moving_planes() {
    let mut pass = true;
    let mut detail = Vec::new();
    let radius = 3.0;
    let ts: Vec<f64> = (0..20).map(|i| radius * (0.05 + 0.9 * i as f64 / 19.0)).collect();

    let bowl = PointCloudSurface::from_graph(&bowl_sample(radius, 121)).unwrap();
    for angle in [0.0, 0.83] {
        let reps = symmetry_scan(&bowl.rotated_about_vertical(angle), &ts, &OrderOptions::default()).unwrap();
        let bad = reps.iter().filter(|r| !r.holds).count();
        pass &= reps.len() == 20 && bad == 0;
        detail.push(format!("bowl at angle {angle}: {bad} violations in {}", reps.len()));
    }

    let sol = integrate_profile(&mean(2), &SolverConfig { r_budget: Some(radius + 1.0), ..Default::default() }).unwrap();
    let it = sol.interpolant();
    let bumped = GraphSample::from_function(Grid::cube(2, radius, 121).unwrap(), |x| {
        let r = x[0].hypot(x[1]);
        if r > radius {
            return f64::NAN;
        }
        it.eval(r).unwrap().0 + 0.1 * (-((x[0] + 0.7).powi(2) + (x[1] - 0.4).powi(2))).exp()
    })
    .unwrap();
    let reps = symmetry_scan(&PointCloudSurface::from_graph(&bumped).unwrap(), &ts, &OrderOptions::default()).unwrap();
    let bad = reps.iter().filter(|r| !r.holds).count();
    pass &= bad >= 1;
    detail.push(format!("bumped bowl: {bad} violations"));

    // randomized clouds from a fixed stream
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let mut involution = 0.0f64;
    let mut implications = 0;
    let mut broken = 0;
    for _ in 0..100 {
        let c = [0.3 * next(), 0.2 * next(), 0.1 * next(), 0.1 * next()];
        let a = wavy_over_plane(c, 21);
        let t = next();
        let back = a.reflect(t).reflect(t);
        for (p, q) in a.points().iter().zip(back.points()) {
            for k in 0..3 {
                involution = involution.max((p[k] - q[k]).abs());
            }
        }
        // offsets lean downwards so that both premises often hold
        let db = [-0.03 * next().abs(), 0.005 * next(), 0.005 * next(), 0.005 * next()];
        let dc = [-0.03 * next().abs(), 0.005 * next(), 0.005 * next(), 0.005 * next()];
        let b = wavy_over_plane(std::array::from_fn(|k| c[k] + db[k]), 21);
        let cc = wavy_over_plane(std::array::from_fn(|k| c[k] + db[k] + dc[k]), 21);
        let tol = 1e-3;
        let opts = OrderOptions { cell_size: Some(0.1), tolerance: Some(tol) };
        let cb = order_leq(&cc, &b, &opts).unwrap().holds;
        let ba = order_leq(&b, &a, &opts).unwrap().holds;
        if cb && ba {
            implications += 1;
            let wide = OrderOptions { tolerance: Some(2.0 * tol), ..opts };
            if !order_leq(&cc, &a, &wide).unwrap().holds {
                broken += 1;
            }
        }
    }
    pass &= involution <= 1e-12 && implications >= 20 && broken == 0;
    detail.push(format!("involution error {involution:.1e}; transitivity {broken} broken of {implications}"));
    check(8, "moving planes", pass, detail.join("; "));
}

#[test]
fn criterion_9_ellipticity() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (g, radius) in [(mean(2), 3.0), (h_times_sn(2), 1.2), (SymmetricCurvature::sigma_root(2, 2).unwrap(), 2.0)] {
        let sol = integrate_profile(&g, &SolverConfig { r_budget: Some(4.0), ..Default::default() }).unwrap();
        let grid = Grid::cube(2, radius, 61).unwrap();
        let bowl = GraphSample::from_profile(grid, &sol).unwrap().restrict_to_ball(radius);
        let rep = linearization_ellipticity(&g, &bowl, &bowl.shifted(0.7), &[0.25, 0.5, 0.75]).unwrap();
        pass &= rep.steps.len() == 3 && rep.min_eigenvalue > 0.0;
        detail.push(format!("{}: min eigenvalue {:.3e}", g.label(), rep.min_eigenvalue));
    }
    check(9, "ellipticity", pass, detail.join("; "));
}
