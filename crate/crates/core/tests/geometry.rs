mod common;

use std::f64::consts::PI;

use common::{cusped_bar, simpson};
use proptest::prelude::*;
use tactoid::geometry::{CosineBump, CuspedSemicircle, Gamma0, GraphCurve, Grid, Profile, Semicircle, SpectralForm};

#[test]
fn gamma0_has_unit_area() {
    let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
    assert!((c.volume() - 1.0).abs() < 1e-8, "{}", c.volume());
}

#[test]
fn semicircle_area_and_length() {
    let c = GraphCurve::sample(&Semicircle::default(), 1025, Grid::Cosine).unwrap();
    assert!((c.volume() - PI / 2.0).abs() < 1e-6);
    assert!((c.perimeter() - PI).abs() < 1e-6);
}

#[test]
fn cusped_area_matches_adaptive_quadrature_of_three_piece_formula() {
    let eps = 0.24;
    let p = CuspedSemicircle::new(eps).unwrap();
    let cw = ((1.0 + eps) / (1.0 - eps)).sqrt();
    let j = (1.0 - eps * eps).sqrt();
    // split at the junctions so each piece is smooth
    let f = |x: f64| cusped_bar(eps, x);
    let oracle = simpson(&f, -cw, -j, 1e-13) + simpson(&f, -j, j, 1e-13) + simpson(&f, j, cw, 1e-13);
    let c = GraphCurve::sample(&p, 2049, Grid::Arc).unwrap();
    // the rescaled curve has area oracle / cw
    assert!((c.volume() * cw - oracle).abs() < 1e-7 * oracle, "{} vs {}", c.volume() * cw, oracle);
    for x in [-0.99, -0.9, -0.3, 0.0, 0.5, 0.97] {
        assert!((p.value(x) - cusped_bar(eps, cw * x)).abs() < 1e-14);
    }
}

#[test]
fn gamma0_perimeter_matches_quadrature() {
    let oracle = simpson(&|x: f64| (1.0 + (x.sin() / (2.0 * PI)).powi(2)).sqrt(), -PI, PI, 1e-13);
    let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
    assert!((c.perimeter() - oracle).abs() < 1e-8, "{}", c.perimeter() - oracle);
}

#[test]
fn flat_limit_perimeter_is_two() {
    let c = GraphCurve::sample(&CosineBump { amplitude: 1e-4, half_width: 1.0 }, 513, Grid::Uniform).unwrap();
    assert!((c.perimeter() - 2.0).abs() < 1e-7);
}

#[test]
fn rescale_scales_lengths_and_areas() {
    let c = GraphCurve::sample(&Gamma0, 513, Grid::Uniform).unwrap();
    let d = c.rescale_to_volume(2.0).unwrap();
    assert!((d.volume() - 2.0).abs() < 1e-12);
    assert!((d.perimeter() - 2f64.sqrt() * c.perimeter()).abs() < 1e-12 * d.perimeter());
    let same = c.rescale_to_volume(c.volume()).unwrap();
    assert_eq!(same, c);
    let four = c.dilate(2.0);
    let back = four.rescale_to_volume(four.volume() / 4.0).unwrap();
    for (x, y) in back.xs().iter().zip(c.xs()) {
        assert!((x - y).abs() < 1e-14);
    }
    assert!(c.rescale_to_volume(0.0).is_err());
}

#[test]
fn semicircle_resampled_at_quarter_angles() {
    let c = GraphCurve::sample(&Semicircle::default(), 4097, Grid::Arc).unwrap();
    let p = c.to_parametric(5).unwrap();
    for (k, pt) in p.points().iter().enumerate() {
        let t = PI * (1.0 - k as f64 / 4.0);
        assert!((pt[0] - t.cos()).abs() < 1e-5 && (pt[1] - t.sin()).abs() < 1e-5, "{k}: {pt:?}");
    }
}

#[test]
fn gamma0_parametric_length_and_admissibility() {
    let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
    let p = c.to_parametric(512).unwrap();
    assert!((p.total_length() - c.perimeter()).abs() < 1e-8 * c.perimeter());
    assert!((p.perimeter() - c.perimeter()).abs() < 1e-6);
    p.check_admissible(1e-6).unwrap();
}

#[test]
fn cosine_resampling_has_monotone_x() {
    let c = GraphCurve::sample(&CosineBump::unit(), 257, Grid::Uniform).unwrap();
    let p = c.to_parametric(100).unwrap();
    assert!(p.points().windows(2).all(|w| w[1][0] >= w[0][0]));
}

#[test]
fn parametric_perimeter_converges_at_second_order() {
    let c = GraphCurve::sample(&CosineBump::unit(), 4097, Grid::Uniform).unwrap();
    let l = c.perimeter();
    let errs: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|i| {
                    let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                    [x, CosineBump::unit().value(x)]
                })
                .collect();
            let chord: f64 = pts.windows(2).map(|w| common::dist(w[0], w[1])).sum();
            l - chord
        })
        .collect();
    let order = (errs[1] / errs[2]).log2();
    assert!(order > 1.8, "{errs:?}");
}

#[test]
fn boundary_angle_values() {
    let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
    let t = c.boundary_angle().unwrap();
    let i = 768; // x = π/2
    assert!((c.xs()[i] - PI / 2.0).abs() < 1e-12);
    assert!((t.curve[i] - (-1.0 / (2.0 * PI)).atan()).abs() < 1e-12);
    assert!((t.curve[i] + 0.15783).abs() < 1e-5);
    assert!(t.curve[512].abs() < 1e-15);
    assert_eq!(t.on_base(0.3), 0.0);

    let s = GraphCurve::sample(&Semicircle::default(), 257, Grid::Cosine).unwrap();
    let ts = s.boundary_angle().unwrap();
    assert!(ts.curve[1] > 1.4 && ts.curve[1] < PI / 2.0);
}

#[test]
fn spectral_samples_reproduce_the_series() {
    let form = SpectralForm::new(1.0, vec![0.9, 0.2, -0.05]);
    let c = GraphCurve::from_spectral(form.clone(), 129, Grid::Cosine).unwrap();
    for (x, f) in c.xs().iter().zip(c.fs()) {
        let h: f64 = (0..3).map(|k| form.coefficients[k] * ((k as f64 + 0.5) * PI * x).cos()).sum();
        assert!((f - h * h).abs() <= 1e-12 * f.abs().max(1e-300) || (f - h * h).abs() < 1e-15);
    }
}

#[test]
fn malformed_samples_are_rejected() {
    assert!(GraphCurve::from_samples(vec![-1.0, 0.5, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]).is_err());
    assert!(GraphCurve::from_samples(vec![-1.0, 0.0, 1.0], vec![0.0, -1.0, 0.0]).is_err());
    assert!(GraphCurve::from_samples(vec![-1.0, 1.0], vec![0.0, 0.0]).is_err());
}

proptest! {
    #[test]
    fn isotropic_scaling_laws(c0 in 0.5f64..1.5, c1 in -0.2f64..0.2, s in 0.1f64..10.0) {
        let c = GraphCurve::from_spectral(SpectralForm::new(1.0, vec![c0, c1]), 129, Grid::Cosine).unwrap();
        let d = c.dilate(s);
        prop_assert!((d.perimeter() - s * c.perimeter()).abs() <= 1e-10 * d.perimeter());
        prop_assert!((d.volume() - s * s * c.volume()).abs() <= 1e-10 * d.volume());
        let v = d.rescale_to_volume(1.0).unwrap();
        prop_assert!((v.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_curves_have_odd_angle_traces(c0 in 0.5f64..1.5, c1 in -0.2f64..0.2, c2 in -0.1f64..0.1) {
        for grid in [Grid::Uniform, Grid::Cosine] {
            let c = GraphCurve::from_spectral(SpectralForm::new(1.0, vec![c0, c1, c2]), 65, grid).unwrap();
            let t = c.boundary_angle().unwrap().curve;
            let n = t.len();
            for i in 0..n {
                prop_assert_eq!(t[i], -t[n - 1 - i]);
            }
        }
    }
}
