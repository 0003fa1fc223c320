//! Minimize the thin-droplet limit functional over eight cosine modes and
//! compare with the closed-form minimizer pi^{-4/3} (1 + cos pi x) / 2.

use std::f64::consts::PI;

use tactoid::asymptotics::{l2_distance, limit_profile, ode_check};
use tactoid::optimize::{minimize, Functional, OptimConfig, ShapeParams};

fn main() -> tactoid::Result<()> {
    let config = OptimConfig {
        functional: Functional::E0,
        k: 8,
        tol: 1e-7,
        ..Default::default()
    };
    let r = minimize(&ShapeParams::cosine(8, 1.0), &config)?;
    let form = r.params.form();
    println!("iterations {}  converged {}  stagnated {}  |g| {:.2e}", r.iterations, r.converged, r.stagnated, r.gradient_norm);
    println!("E_0 = {:.12}  (3 pi^(2/3) = {:.12})", r.energy, 3.0 * PI.powf(2.0 / 3.0));
    println!("L2 distance to the limit profile {:.2e}", l2_distance(|x| form.value(x), limit_profile));
    println!("profile ODE residual {:.1e}", ode_check(2001));
    Ok(())
}
