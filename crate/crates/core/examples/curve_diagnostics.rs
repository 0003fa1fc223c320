//! Geometric diagnostics on a smooth arc, a cusped droplet and a corner.

use tactoid::diagnostics::{diagnose, dyadic_radii};
use tactoid::geometry::{CuspedSemicircle, GraphCurve, Grid, ParametricCurve};

fn summary(name: &str, curve: &ParametricCurve) -> tactoid::Result<()> {
    let r = diagnose(curve, &dyadic_radii(curve, 5))?;
    println!("{name}");
    println!("  two-point {:.4}  chord-arc {:.4}", r.two_point_constant, r.chord_arc_constant);
    println!("  vanishing modulus {:?}", r.vanishing_modulus.value.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());
    println!("  VMO               {:?}", r.vmo_table.value.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());
    println!("  beta^2 {:.4}  Moebius {:.4}  H^3/2 {:.4}", r.beta_sq_integral, r.mobius_energy, r.h32_seminorm);
    Ok(())
}

fn main() -> tactoid::Result<()> {
    let arc: Vec<_> = (0..201)
        .map(|i| {
            let t = std::f64::consts::PI * (1.0 - i as f64 / 200.0);
            [t.cos(), t.sin()]
        })
        .collect();
    summary("semicircle", &ParametricCurve::from_points(arc)?)?;

    let cusped = GraphCurve::sample(&CuspedSemicircle::new(0.1)?, 257, Grid::Arc)?;
    let p = cusped.to_parametric(257)?;
    summary("cusped semicircle (eps = 0.1)", &p)?;
    let r = diagnose(&p, &dyadic_radii(&p, 5))?;
    println!("  cusp ratio, left end: {:?}", r.cusp_table.left.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());

    let corner: Vec<_> = (0..201)
        .map(|i| {
            let s = i as f64 / 100.0 - 1.0;
            [s, 1.0 - s.abs()]
        })
        .collect();
    summary("right-angle corner", &ParametricCurve::from_points(corner)?)?;
    Ok(())
}
