mod common;

use std::f64::consts::PI;

use common::simpson;
use tactoid::field::{solve_harmonic, AngleField, Clip, SolveOptions, TestDomainField};
use tactoid::geometry::{CosineBump, CuspedSemicircle, Gamma0, GraphCurve, Grid, Parabola, SpectralForm};

fn nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Wavy top `1 + 0.25 cos(πx)` over `[-1, 1]`.
fn wavy(x: f64) -> (f64, f64) {
    (1.0 + 0.25 * (PI * x).cos(), -0.25 * PI * (PI * x).sin())
}

fn observed_orders(exact: fn(f64, f64) -> f64) -> Vec<f64> {
    let errs: Vec<f64> = [17usize, 33, 65, 129]
        .iter()
        .map(|&n| {
            TestDomainField::solve(nodes(-1.0, 1.0, n), wavy, n, exact, 1e-13)
                .unwrap()
                .max_error(exact)
        })
        .collect();
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn manufactured_harmonic_polynomials_converge_at_second_order() {
    let cases: [(&str, fn(f64, f64) -> f64); 4] = [
        ("xy", |x, y| x * y),
        ("x2-y2", |x, y| x * x - y * y),
        ("re z3", |x, y| x * x * x - 3.0 * x * y * y),
        ("im z3", |x, y| 3.0 * x * x * y - y * y * y),
    ];
    for (name, exact) in cases {
        let orders = observed_orders(exact);
        assert!(orders.iter().all(|&p| p >= 1.8), "{name}: {orders:?}");
    }
}

#[test]
fn xy_energy_on_unit_square() {
    let f = TestDomainField::solve(nodes(0.0, 1.0, 65), |_| (1.0, 0.0), 65, |x, y| x * y, 1e-13).unwrap();
    assert!((f.dirichlet_energy() - 2.0 / 3.0).abs() < 1e-3);
}

#[test]
fn linear_field_has_unit_flux() {
    let f = TestDomainField::solve(nodes(0.0, 1.0, 33), |_| (1.0, 0.0), 33, |_, y| y, 1e-13).unwrap();
    let t = f.dtn_trace().unwrap();
    for (n, ok) in t.normal.iter().zip(&t.valid) {
        if *ok {
            assert!((n - 1.0).abs() < 1e-8, "{n}");
        }
    }
}

#[test]
fn constant_data_gives_zero_energy_and_trace() {
    let f = TestDomainField::solve(nodes(-1.0, 1.0, 33), wavy, 17, |_, _| 0.3, 1e-13).unwrap();
    assert!(f.dirichlet_energy().abs() < 1e-12);
    assert!(f.dtn_trace().unwrap().normal.iter().all(|n| n.abs() < 1e-9));
}

#[test]
fn discrete_maximum_principle() {
    let data = |x: f64, y: f64| (3.0 * x).sin() * (1.0 + y);
    let f = TestDomainField::solve(nodes(-1.0, 1.0, 65), wavy, 33, data, 1e-13).unwrap();
    let (nx, ny) = f.resolution();
    let all: Vec<(f64, f64, f64)> = f.nodes().collect();
    let boundary: Vec<f64> = all
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let (i, j) = (k / ny, k % ny);
            i == 0 || i == nx - 1 || j == 0 || j == ny - 1
        })
        .map(|(_, p)| p.2)
        .collect();
    let lo = boundary.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = boundary.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(all.iter().all(|p| p.2 >= lo - 1e-9 && p.2 <= hi + 1e-9));
}

fn curves() -> Vec<(&'static str, GraphCurve)> {
    vec![
        ("gamma0", GraphCurve::sample(&Gamma0, 257, Grid::Uniform).unwrap()),
        ("cosine", GraphCurve::sample(&CosineBump::unit(), 257, Grid::Cosine).unwrap()),
        ("profile_g", GraphCurve::sample(&CosineBump::small_volume_minimizer(), 257, Grid::Cosine).unwrap()),
        ("cusped", GraphCurve::sample(&CuspedSemicircle::new(0.2).unwrap(), 257, Grid::Arc).unwrap()),
        (
            "spectral",
            GraphCurve::from_spectral(SpectralForm::new(1.0, vec![1.0, 0.12, 0.04, -0.02]), 257, Grid::Cosine).unwrap(),
        ),
        ("parabola", GraphCurve::sample(&Parabola { amplitude: 0.6, half_width: 1.0 }, 257, Grid::Cosine).unwrap()),
    ]
}

#[test]
fn dirichlet_principle_on_several_curves() {
    let opts = SolveOptions::default().with_n_eta(65);
    for (name, c) in curves() {
        let h = solve_harmonic(&c, &opts).unwrap().dirichlet_energy();
        let l = AngleField::linear_extension(&c, &opts).unwrap().dirichlet_energy();
        assert!(h < l - 1e-6, "{name}: {h} vs {l}");
    }
}

#[test]
fn even_curves_give_odd_fields() {
    let c = GraphCurve::sample(&CosineBump::unit(), 129, Grid::Cosine).unwrap();
    let f = solve_harmonic(&c, &SolveOptions::default().with_n_eta(33).with_tol(1e-13)).unwrap();
    let (nx, ny) = f.resolution();
    for i in 0..nx {
        for j in 0..ny {
            assert!((f.theta(i, j) + f.theta(nx - 1 - i, j)).abs() < 1e-9);
        }
    }
}

#[test]
fn boundary_rows_hold_the_data() {
    let c = GraphCurve::sample(&CosineBump::unit(), 129, Grid::Cosine).unwrap();
    let f = solve_harmonic(&c, &SolveOptions::default().with_n_eta(33)).unwrap();
    let angles = c.tangent_angles();
    let (nx, ny) = f.resolution();
    for i in 0..nx {
        assert_eq!(f.theta(i, 0), 0.0);
        assert_eq!(f.theta(i, ny - 1), angles[i]);
    }
}

#[test]
fn gamma0_linear_extension_matches_one_dimensional_quadrature() {
    // Θ = y φ/f with φ = arctan f': ∫₀^f |∇Θ|² dy = φ²/f + (φ' f − φ f')² / (3f)
    let f = |x: f64| (x.cos() + 1.0) / (2.0 * PI);
    let df = |x: f64| -x.sin() / (2.0 * PI);
    let d2f = |x: f64| -x.cos() / (2.0 * PI);
    let integrand = |x: f64| {
        let (fv, d) = (f(x), df(x));
        if fv <= 0.0 {
            return 0.0;
        }
        let phi = d.atan();
        let dphi = d2f(x) / (1.0 + d * d);
        phi * phi / fv + (dphi * fv - phi * d).powi(2) / (3.0 * fv)
    };
    let oracle = simpson(&integrand, -PI, PI, 1e-12);
    let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
    let grid = AngleField::linear_extension(&c, &SolveOptions::default()).unwrap().dirichlet_energy();
    assert!((grid - oracle).abs() < 1e-3 * oracle, "{grid} vs {oracle}");
}

#[test]
fn green_identity_on_gamma0_at_full_resolution() {
    let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
    let f = solve_harmonic(&c, &SolveOptions::default()).unwrap();
    let g = f.green_identity().unwrap();
    assert!(g.defect < 0.02, "{g:?}");
}

#[test]
fn green_defect_shrinks_under_refinement() {
    let defects: Vec<f64> = [(129, 33), (257, 65), (513, 129)]
        .iter()
        .map(|&(n, m)| {
            let c = GraphCurve::sample(&CosineBump::unit(), n, Grid::Cosine).unwrap();
            solve_harmonic(&c, &SolveOptions::default().with_n_eta(m)).unwrap().green_identity().unwrap().defect
        })
        .collect();
    assert!(defects[2] < defects[0], "{defects:?}");
}

#[test]
fn energy_decreases_with_tighter_solver_tolerance() {
    let c = GraphCurve::sample(&CosineBump::unit(), 129, Grid::Cosine).unwrap();
    let loose = solve_harmonic(&c, &SolveOptions::default().with_n_eta(33).with_tol(1e-3)).unwrap().dirichlet_energy();
    let tight = solve_harmonic(&c, &SolveOptions::default().with_n_eta(33).with_tol(1e-12)).unwrap().dirichlet_energy();
    assert!(tight <= loose + 1e-12);
}

#[test]
fn coarse_grids_and_degenerate_clips_are_rejected() {
    let c = GraphCurve::sample(&CosineBump::unit(), 17, Grid::Cosine).unwrap();
    assert!(solve_harmonic(&c, &SolveOptions::default()).is_err());
    let c = GraphCurve::sample(&CosineBump::unit(), 65, Grid::Cosine).unwrap();
    assert!(solve_harmonic(&c, &SolveOptions::default().with_n_eta(33).with_clip(Clip::Margin(40))).is_err());
}
