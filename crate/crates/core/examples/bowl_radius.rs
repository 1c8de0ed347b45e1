use translab_core::bowl::{blow_up_radius, curvature_asymptotics, integrate_profile, SolverConfig};
use translab_core::SymmetricCurvature;

fn main() {
    for n in 2..=4 {
        let g = SymmetricCurvature::h_times_sn(n).unwrap();
        let t = std::time::Instant::now();
        let sol = integrate_profile(&g, &SolverConfig::default()).unwrap();
        let b = blow_up_radius(&sol).unwrap();
        let a = curvature_asymptotics(&sol).unwrap();
        println!(
            "n={n} nodes={} r_max={:.9} bound={:.2e} λ1={:.3e} λt={:.6} gap={:.2e} res={:.2e} {:?}",
            sol.len(),
            b.r_max,
            b.bound,
            a.lambda_radial_last,
            a.lambda_tangential_last,
            a.relative_gap,
            sol.max_translator_residual(&g),
            t.elapsed()
        );
    }
}
