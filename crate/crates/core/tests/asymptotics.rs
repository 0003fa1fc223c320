mod common;

use std::f64::consts::PI;

use common::{cusped_bar, simpson};
use tactoid::asymptotics::{
    cusped_semicircle, gamma_convergence_table, hausdorff_to_semicircle, large_volume_sweep, limit_profile, ode_check,
    ode_residual, small_volume_sweep, sqrt_two_pi, witness, SmallVolumeOptions, SweepOptions,
};
use tactoid::energy::EnergyOptions;
use tactoid::field::SolveOptions;
use tactoid::geometry::{CosineBump, GraphCurve, Grid, Semicircle};

#[test]
fn small_volume_scalings() {
    let r = small_volume_sweep(&[0.2, 0.1, 0.05, 0.025], &SmallVolumeOptions::default()).unwrap();
    let window = r.summary["window_ratio"];
    assert!(window < 1.01, "{window}");
    for p in &r.points {
        let ratio = p.extra["dirichlet_over_eps"];
        assert!((ratio - PI * PI).abs() < 0.01 * PI * PI, "{ratio}");
    }
    let d = r.fit("dirichlet").unwrap().exponent();
    assert!((d - 1.0).abs() < 0.05, "{d}");
    let t = r.fit("total").unwrap().exponent();
    assert!((t - 2.0 / 3.0).abs() < 0.05, "{t}");
}

#[test]
fn limit_profile_solves_its_ode() {
    assert!(ode_check(4001) < 1e-10);
    let c = PI.powf(-2.0 / 3.0);
    let bumped = ode_residual(
        |x| c * (0.5 * PI * x).cos() + 0.02 * (2.5 * PI * x).cos(),
        |x| -0.25 * PI * PI * c * (0.5 * PI * x).cos() - 0.02 * 6.25 * PI * PI * (2.5 * PI * x).cos(),
        4001,
    );
    assert!(bumped > 1e-2);
    // area of the limit profile is π^{-4/3}
    let area = simpson(&limit_profile, -1.0, 1.0, 1e-13);
    assert!((area - PI.powf(-4.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn witness_is_a_scaled_cosine_bump() {
    let w = witness(0.3, 65, Grid::Uniform).unwrap();
    for (x, f) in w.xs().iter().zip(w.fs()) {
        assert!((f - 0.15 * (1.0 + (PI * x).cos())).abs() < 1e-14);
    }
}

#[test]
fn gamma_table_approaches_the_limit() {
    let curve = GraphCurve::sample(&CosineBump::small_volume_minimizer(), 257, Grid::Uniform).unwrap();
    let opts = EnergyOptions::default()
        .with_solve(SolveOptions::default().with_n_eta(65))
        .without_divergence_check();
    let t = gamma_convergence_table(&curve, &[0.0, 0.2, 0.1, 0.05, 0.02], &opts).unwrap();
    let e0 = t.summary["e0"];
    assert!((e0 - 3.0 * PI.powf(2.0 / 3.0)).abs() < 1e-6);
    let positive: Vec<_> = t.points.iter().filter(|p| p.param > 0.0).collect();
    assert!(positive.windows(2).all(|w| w[1].gap < w[0].gap && w[1].gap > 0.0));
    let x = t.fit("x_derivative_term").unwrap().exponent();
    assert!((x - 4.0 / 3.0).abs() < 0.05, "{x}");
}

#[test]
fn cusped_family_shape_factor_approaches_half_disk_linearly() {
    let ratios: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&eps| {
            let c = cusped_semicircle(eps, 2049, Grid::Arc).unwrap();
            let f = c.perimeter() / c.volume().sqrt();
            assert!(f > sqrt_two_pi());
            (f - sqrt_two_pi()) / eps
        })
        .collect();
    assert!(ratios.windows(2).all(|w| (w[1] / w[0] - 1.0).abs() < 0.25), "{ratios:?}");
}

#[test]
fn cusped_samples_match_the_explicit_profile() {
    let eps = 0.1;
    let c = cusped_semicircle(eps, 257, Grid::Uniform).unwrap();
    // the profile is squeezed horizontally onto [-1, 1]
    let c_half = ((1.0 + eps) / (1.0 - eps)).sqrt();
    for (x, f) in c.xs().iter().zip(c.fs()) {
        let expect = cusped_bar(eps, c_half * x);
        assert!((f - expect).abs() < 1e-9, "x={x}: {f} vs {expect}");
    }
}

#[test]
fn large_volume_gap_shrinks() {
    let opts = SweepOptions {
        n_xi: 513,
        grid: Grid::Arc,
        energy: EnergyOptions::default()
            .with_solve(SolveOptions::default().with_n_eta(129))
            .without_divergence_check(),
    };
    let r = large_volume_sweep(&[1e3, 1e4, 1e5, 1e6], &opts, &[]).unwrap();
    assert!(r.points.windows(2).all(|w| w[1].gap < w[0].gap && w[1].gap > 0.0));
    for p in &r.points {
        // the linear extension bounds the harmonic energy from above
        assert!(p.extra["linear_bound_gap"] >= p.gap);
        assert!(p.extra["shape_factor_gap"] < p.gap);
    }
    assert!(large_volume_sweep(&[0.5], &opts, &[]).is_err());
}

#[test]
fn half_disk_is_at_zero_hausdorff_distance() {
    let c = GraphCurve::sample(&Semicircle::default(), 1025, Grid::Cosine).unwrap();
    assert!(hausdorff_to_semicircle(&c).unwrap() < 5e-3);
    let flat = GraphCurve::sample(&CosineBump::unit(), 257, Grid::Cosine).unwrap();
    assert!(hausdorff_to_semicircle(&flat).unwrap() > 0.05);
}

#[test]
fn sweep_inputs_are_validated() {
    assert!(small_volume_sweep(&[0.5], &SmallVolumeOptions::default()).is_err());
}
