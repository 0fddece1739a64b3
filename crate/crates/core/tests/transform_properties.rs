use hororadon::functions::gaussian;
use hororadon::{horocycle_to_plane, transform_sphere, transform_via_isometry, PointH, QuadratureSpec};
use proptest::prelude::*;

fn contact_and_radius(n: usize) -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(-1.5..1.5f64, n - 1), 0.1..0.5f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sphere_and_isometry_routes_agree(
        (n, (c, r)) in (2usize..=4).prop_flat_map(|n| (Just(n), contact_and_radius(n)))
    ) {
        let q = QuadratureSpec::default();
        let center: Vec<f64> = (0..n - 1).map(|j| 0.2 - 0.15 * j as f64).collect();
        let f = gaussian(n, center, 0.9, 0.4, 0.6).unwrap();
        let a = transform_sphere(&f, &c, r, &q).unwrap().value;
        let b = transform_via_isometry(&f, &c, r, &q).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-5 * a.abs().max(1e-12), "{} vs {}", a, b);
    }

    #[test]
    fn dilation_covariance(
        (n, (c, r), lambda) in (2usize..=3).prop_flat_map(|n| (Just(n), contact_and_radius(n), 0.5..2.0f64))
    ) {
        // (f ∘ D_λ)^(ξ) = f̂(D_λ ξ), and D_λ maps Sphere(c, r) to Sphere(λc, λr)
        let q = QuadratureSpec::default();
        let center = vec![0.3; n - 1];
        let f = gaussian(n, center.clone(), 0.8, 0.3, 0.5).unwrap();
        let scaled: Vec<f64> = center.iter().map(|v| v / lambda).collect();
        let g = gaussian(n, scaled, 0.8 / lambda, 0.3 / lambda, 0.5).unwrap();
        let lc: Vec<f64> = c.iter().map(|v| v * lambda).collect();
        let a = transform_sphere(&g, &c, r, &q).unwrap();
        let b = transform_sphere(&f, &lc, lambda * r, &q).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-8 * a.value.abs().max(1e-12) + a.error + b.error,
            "{} vs {}", a.value, b.value);
    }

    #[test]
    fn refinement_stays_within_estimate(
        (n, (c, r)) in (2usize..=3).prop_flat_map(|n| (Just(n), contact_and_radius(n)))
    ) {
        let q = QuadratureSpec::default();
        let fine = QuadratureSpec { theta_nodes: 2 * q.theta_nodes, sphere_nodes: 2 * q.sphere_nodes, ..q.clone() };
        let f = gaussian(n, vec![0.1; n - 1], 0.7, 0.5, 0.5).unwrap();
        let a = transform_sphere(&f, &c, r, &q).unwrap();
        let b = transform_sphere(&f, &c, r, &fine).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.error.max(1e-13));
    }

    #[test]
    fn horocycle_maps_onto_plane(
        (c, r, t) in (prop::collection::vec(-3.0..3.0f64, 2), 0.05..2.0f64, 0.05..3.1f64)
    ) {
        // a point of Sphere(c, r) in the vertical plane through c
        let p = PointH::new(vec![c[0] + r * t.sin(), c[1]], r - r * t.cos()).unwrap();
        let image = horocycle_to_plane(&c, r).unwrap().apply(&p).unwrap();
        prop_assert!((image.height() - 1.0 / (2.0 * r)).abs() <= 1e-9 / r);
    }
}
