use proptest::prelude::*;
use translab_core::curvature::{ConeSampler, Exponent};
use translab_core::geometry::{GraphSample, Grid};
use translab_core::moving_planes::{order_leq, symmetry_scan, OrderOptions, PointCloudSurface};
use translab_core::{CurvatureFunction, GammaSpec, SymmetricCurvature};

/// A built-in curvature function chosen by `(family, n, k)`.
fn built_in(family: u8, n: usize, k: usize) -> SymmetricCurvature {
    match family % 5 {
        0 => SymmetricCurvature::mean(n),
        1 => SymmetricCurvature::sigma_root(n, 1 + k % n),
        2 => SymmetricCurvature::harmonic_inverse(n, 1 + k % n),
        3 => {
            let top = 2 + k % (n - 1);
            SymmetricCurvature::hessian_quotient(n, top, 1 + k % (top - 1))
        }
        _ => SymmetricCurvature::h_times_sn(n),
    }
    .unwrap()
}

fn gamma_and_point() -> impl Strategy<Value = (SymmetricCurvature, Vec<f64>)> {
    (any::<u8>(), 2usize..=5, any::<usize>(), any::<u64>()).prop_map(|(f, n, k, seed)| {
        let g = built_in(f, n, k);
        let lambda = ConeSampler::with_count(1, seed).sample(&g).remove(0);
        (g, lambda)
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn permutation_symmetry((g, lambda) in gamma_and_point(), keys in prop::collection::vec(any::<u32>(), 5)) {
        let mut idx: Vec<usize> = (0..lambda.len()).collect();
        idx.sort_by_key(|&i| keys[i]);
        let permuted: Vec<f64> = idx.iter().map(|&i| lambda[i]).collect();
        prop_assert!(rel(g.value(&permuted), g.value(&lambda)) <= 1e-12);
    }

    #[test]
    fn euler_identity((g, lambda) in gamma_and_point()) {
        let dot: f64 = g.grad(&lambda).iter().zip(&lambda).map(|(d, l)| d * l).sum();
        prop_assert!(rel(dot, g.alpha() * g.value(&lambda)) <= 1e-10);
    }

    #[test]
    fn homogeneity_and_monotonicity((g, lambda) in gamma_and_point(), c in 0.1f64..10.0) {
        let scaled: Vec<f64> = lambda.iter().map(|x| c * x).collect();
        prop_assert!(rel(g.value(&scaled), c.powf(g.alpha()) * g.value(&lambda)) <= 1e-12);
        prop_assert!(g.grad(&lambda).iter().all(|d| *d > 0.0));
    }

    #[test]
    fn spec_json_round_trip((g, lambda) in gamma_and_point(), scale in prop::option::of(0.1f64..10.0)) {
        let g = match scale {
            Some(s) => g.scaled(s).unwrap(),
            None => g,
        };
        let spec = GammaSpec::from(&g);
        let parsed = GammaSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(&parsed, &spec);
        let rebuilt = parsed.build().unwrap();
        prop_assert_eq!(rebuilt.label(), g.label());
        prop_assert_eq!(rebuilt.value(&lambda), g.value(&lambda));
    }

    #[test]
    fn exponent_text_round_trip(p in 1i64..10_000, q in 1i64..10_000) {
        let e = Exponent::new(p, q).unwrap();
        let back: Exponent = e.to_string().parse().unwrap();
        prop_assert_eq!(back, e);
        prop_assert!((e.to_f64() - p as f64 / q as f64).abs() < 1e-15 * (p as f64 / q as f64).max(1.0));
    }
}

fn cloud_strategy() -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-5.0f64..5.0), 1..200)
}

fn over_plane(c: [f64; 4]) -> PointCloudSurface {
    let grid = Grid::cube(2, 1.0, 17).unwrap();
    let s = GraphSample::from_function(grid, |x| c[0] + c[1] * x[0] + c[2] * (2.0 * x[1]).sin() + c[3] * x[0] * x[1])
        .unwrap();
    PointCloudSurface::from_graph_over_plane(&s).unwrap()
}

fn radial_bowl(a: f64, b: f64) -> PointCloudSurface {
    let grid = Grid::cube(2, 1.0, 41).unwrap();
    let s = GraphSample::from_function(grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 > 1.0 {
            f64::NAN
        } else {
            a * r2 + b * r2 * r2
        }
    })
    .unwrap();
    PointCloudSurface::from_graph(&s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reflection_is_an_involution(points in cloud_strategy(), t in -3.0f64..3.0) {
        let s = PointCloudSurface::from_points(points).unwrap();
        let back = s.reflect(t).reflect(t);
        for (p, q) in s.points().iter().zip(back.points()) {
            for k in 0..3 {
                prop_assert!((p[k] - q[k]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn order_is_transitive_up_to_tolerance(
        c in prop::array::uniform4(-0.3f64..0.3),
        d1 in prop::array::uniform4(-0.01f64..0.01),
        d2 in prop::array::uniform4(-0.01f64..0.01),
        drop1 in 0.0f64..0.04,
        drop2 in 0.0f64..0.04,
    ) {
        let a = over_plane(c);
        let b = over_plane(std::array::from_fn(|k| c[k] + d1[k] - if k == 0 { drop1 } else { 0.0 }));
        let cc = over_plane(std::array::from_fn(|k| c[k] + d1[k] + d2[k] - if k == 0 { drop1 + drop2 } else { 0.0 }));
        let tol = 1e-3;
        let opts = OrderOptions { cell_size: Some(0.125), tolerance: Some(tol) };
        if order_leq(&cc, &b, &opts).unwrap().holds && order_leq(&b, &a, &opts).unwrap().holds {
            let wide = OrderOptions { tolerance: Some(2.0 * tol), ..opts };
            prop_assert!(order_leq(&cc, &a, &wide).unwrap().holds);
        }
    }

    #[test]
    fn symmetric_convex_graphs_pass_every_plane(a in 0.2f64..2.0, b in 0.0f64..1.0, t in 0.05f64..0.9) {
        let rep = symmetry_scan(&radial_bowl(a, b), &[t], &OrderOptions::default()).unwrap();
        prop_assert!(rep[0].holds, "{:?}", rep[0].worst_gap);
    }

    #[test]
    fn scan_is_rotation_invariant(a in 0.2f64..2.0, angle in 0.0f64..std::f64::consts::TAU, t in 0.05f64..0.9) {
        let s = radial_bowl(a, 0.3);
        let opts = OrderOptions::default();
        let plain = symmetry_scan(&s, &[t], &opts).unwrap();
        let turned = symmetry_scan(&s.rotated_about_vertical(angle), &[t], &opts).unwrap();
        prop_assert_eq!(plain[0].holds, turned[0].holds);
    }
}
