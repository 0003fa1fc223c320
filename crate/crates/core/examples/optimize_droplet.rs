//! Minimize the unit-area droplet energy over cosine modes on two grid
//! levels, then check the Euler-Lagrange residual of the result.

use tactoid::field::SolveOptions;
use tactoid::geometry::Grid;
use tactoid::optimize::{el_residual, minimize, Functional, OptimConfig, ShapeParams};

fn main() -> tactoid::Result<()> {
    let functional = Functional::ProblemP { v: 1.0 };
    let config = OptimConfig {
        functional,
        k: 8,
        grid: (257, 65),
        ..Default::default()
    };
    let r = minimize(&ShapeParams::cosine(8, 1.0), &config)?;
    for rec in r.trace.iter().step_by(5) {
        println!(
            "it {:3}  level {}  E {:.10}  |g| {:.2e}",
            rec.iteration, rec.level, rec.energy, rec.gradient_norm
        );
    }
    println!("final E {:.10}, converged {}, multiplier {:.6}", r.energy, r.converged, r.lambda);

    for n in [129, 257, 513] {
        let curve = r.params.curve(n, Grid::Uniform)?;
        let el = el_residual(&curve, functional, &SolveOptions::default().with_n_eta((n - 1) / 4 + 1))?;
        println!("n = {n:4}: EL residual {:.4}", el.residual_norm);
    }
    Ok(())
}
