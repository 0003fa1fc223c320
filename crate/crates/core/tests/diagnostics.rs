mod common;

use std::f64::consts::PI;

use common::{arc_h32, brute_chord_arc, brute_two_point, corner_points, semicircle_points};
use proptest::prelude::*;
use tactoid::diagnostics::{
    chord_arc_constant, cusp_angle, diagnose, dyadic_radii, two_point_constant, vanishing_modulus, vmo_oscillation,
    weil_petersson_suite,
};
use tactoid::geometry::{CuspedSemicircle, GraphCurve, Grid, ParametricCurve, Point, Semicircle, SpectralForm};

fn semicircle(n: usize) -> ParametricCurve {
    let t: Vec<f64> = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
    ParametricCurve::from_stations(semicircle_points(n), t).unwrap()
}

fn wobbly(n: usize) -> Vec<Point> {
    let form = SpectralForm::new(1.0, vec![0.9, 0.2, -0.1]);
    (0..n)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let h = form.h(x);
            [x, h * h]
        })
        .collect()
}

#[test]
fn constants_match_exhaustive_scans() {
    for pts in [wobbly(61), corner_points(41, 1.2), semicircle_points(50)] {
        let c = ParametricCurve::from_points(pts.clone()).unwrap();
        assert_eq!(two_point_constant(&c).unwrap(), brute_two_point(&pts));
        assert!((chord_arc_constant(&c).unwrap() - brute_chord_arc(&pts)).abs() < 1e-12);
    }
}

#[test]
fn semicircle_chord_arc_and_vanishing_modulus() {
    let c = semicircle(1025);
    assert!((chord_arc_constant(&c).unwrap() - PI / 2.0).abs() < 1e-3);
    // chord r subtends arc 2 asin(r/2), so arc/chord − 1 ≈ r²/24
    let radii = [0.4, 0.2, 0.1, 0.05];
    let t = vanishing_modulus(&c, &radii).unwrap();
    for (r, v) in radii.iter().zip(&t.value) {
        let model = r * r / 24.0;
        assert!((v - model).abs() < 0.1 * model, "r={r}: {v} vs {model}");
    }
}

#[test]
fn corner_has_a_scale_free_plateau() {
    for alpha in [PI / 2.0, 2.0 * PI / 3.0] {
        let c = ParametricCurve::from_points(corner_points(401, alpha)).unwrap();
        let plateau = 1.0 / (0.5 * alpha).sin() - 1.0;
        let t = vanishing_modulus(&c, &[0.5, 0.1, 0.02]).unwrap();
        for v in &t.value {
            assert!((v - plateau).abs() < 0.01 * plateau, "{v} vs {plateau}");
        }
        // every dyadic level sees the corner: the β² sum keeps growing
        let wp = weil_petersson_suite(&c).unwrap();
        let lv = &wp.beta_levels.value;
        assert!(lv.len() >= 4);
        let fine = &lv[1..];
        let (lo, hi) = fine.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(lo > 0.3 * hi, "{lv:?}");
    }
}

#[test]
fn arc_tangent_seminorm_matches_quadrature() {
    let n = 801;
    let length = 2.0;
    let pts: Vec<Point> = (0..n)
        .map(|i| {
            let s = length * i as f64 / (n - 1) as f64;
            [s.cos(), s.sin()]
        })
        .collect();
    let t: Vec<f64> = (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect();
    let c = ParametricCurve::from_stations(pts, t).unwrap();
    let wp = weil_petersson_suite(&c).unwrap();
    let oracle = arc_h32(length, wp.band);
    assert!((wp.h32_seminorm - oracle).abs() < 0.01 * oracle, "{} vs {oracle}", wp.h32_seminorm);
    assert!(wp.h32_coarse < wp.h32_seminorm);
}

#[test]
fn smooth_arc_has_vanishing_oscillation() {
    let c = semicircle(513);
    let t = vmo_oscillation(&c, &[0.4, 0.2, 0.1, 0.05]).unwrap();
    assert!(t.value.windows(2).all(|w| w[1] < w[0]), "{:?}", t.value);
    assert!(t.value[3] < 0.05);
}

#[test]
fn cusp_ratio_vanishes_at_a_cusp_and_blows_up_at_a_vertical_end() {
    let radii = [0.2, 0.1, 0.05, 0.025];
    let cusped = GraphCurve::sample(&CuspedSemicircle::new(0.1).unwrap(), 1025, Grid::Arc)
        .unwrap()
        .to_parametric(1025)
        .unwrap();
    let t = cusp_angle(&cusped, &radii).unwrap();
    assert!(t.left.windows(2).all(|w| w[1] <= w[0]), "{:?}", t.left);
    assert!(t.left[3] < 0.5 * t.left[0]);
    for (l, r) in t.left.iter().zip(&t.right) {
        assert!((l - r).abs() < 1e-6 * (1.0 + l));
    }

    let round = GraphCurve::sample(&Semicircle::default(), 1025, Grid::Cosine)
        .unwrap()
        .to_parametric(1025)
        .unwrap();
    let t = cusp_angle(&round, &radii).unwrap();
    assert!(t.left.windows(2).all(|w| w[1] >= w[0]), "{:?}", t.left);
    assert!(t.left[3] > 5.0);
}

#[test]
fn diagnose_bundles_consistent_values() {
    let c = semicircle(257);
    let radii = dyadic_radii(&c, 4);
    assert!((radii[0] - 1.0).abs() < 1e-12);
    let r = diagnose(&c, &radii).unwrap();
    assert_eq!(r.samples, 257);
    assert!((r.length - PI).abs() < 1e-12);
    assert_eq!(r.h32_seminorm, r.weil_petersson.h32_seminorm);
    assert!(vanishing_modulus(&c, &[0.0]).is_err());
}

fn transform(pts: &[Point], angle: f64, scale: f64, shift: Point) -> Vec<Point> {
    let (s, c) = angle.sin_cos();
    pts.iter()
        .map(|p| [scale * (c * p[0] - s * p[1]) + shift[0], scale * (s * p[0] + c * p[1]) + shift[1]])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn constants_are_similarity_invariant(
        angle in 0.0f64..6.28,
        scale in 0.1f64..10.0,
        dx in -5.0f64..5.0,
        dy in -5.0f64..5.0,
    ) {
        let pts = wobbly(48);
        let base = ParametricCurve::from_points(pts.clone()).unwrap();
        let moved = ParametricCurve::from_points(transform(&pts, angle, scale, [dx, dy])).unwrap();
        let tol = 1e-9;
        prop_assert!((two_point_constant(&base).unwrap() - two_point_constant(&moved).unwrap()).abs() < tol);
        prop_assert!((chord_arc_constant(&base).unwrap() - chord_arc_constant(&moved).unwrap()).abs() < tol);
        let r = [0.7, 0.3];
        let a = vanishing_modulus(&base, &r).unwrap().value;
        // radii scale with the curve
        let rs: Vec<f64> = r.iter().map(|v| v * scale).collect();
        let b = vanishing_modulus(&moved, &rs).unwrap().value;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-6);
        }
    }
}
