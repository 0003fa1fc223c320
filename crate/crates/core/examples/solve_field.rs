//! Solve for the director angle inside a droplet and inspect the boundary
//! normal derivative and the Green-identity consistency check.

use tactoid::field::{solve_harmonic, AngleField, SolveOptions};
use tactoid::geometry::{CosineBump, GraphCurve, Grid};

fn main() -> tactoid::Result<()> {
    let curve = GraphCurve::sample(&CosineBump::unit(), 257, Grid::Cosine)?;
    let opts = SolveOptions::default().with_n_eta(65);
    let field = solve_harmonic(&curve, &opts)?;
    let linear = AngleField::linear_extension(&curve, &opts)?;
    let green = field.green_identity()?;
    let trace = field.dtn_trace()?;

    println!("grid            {:?}", field.resolution());
    println!("CG iterations   {}", field.stats().iterations);
    println!("harmonic energy {:.8}", field.dirichlet_energy());
    println!("linear ext.     {:.8}  (never below the harmonic value)", linear.dirichlet_energy());
    println!("Green defect    {:.2e}", green.defect);
    let mid = trace.xs.len() / 2;
    println!("normal derivative at x = {:.3}: {:.6}", trace.xs[mid], trace.normal[mid]);
    Ok(())
}
