//! Rescaled energies approaching their thin-droplet limit on the limit
//! profile, with the CSV table and SVG plot written to a temp directory.

use tactoid::asymptotics::gamma_convergence_table;
use tactoid::energy::EnergyOptions;
use tactoid::field::SolveOptions;
use tactoid::geometry::{CosineBump, GraphCurve, Grid};

fn main() -> tactoid::Result<()> {
    let curve = GraphCurve::sample(&CosineBump::small_volume_minimizer(), 257, Grid::Uniform)?;
    let opts = EnergyOptions::default()
        .with_solve(SolveOptions::default().with_n_eta(65))
        .without_divergence_check();
    let table = gamma_convergence_table(&curve, &[0.0, 0.2, 0.1, 0.05, 0.02], &opts)?;
    for p in &table.points {
        println!("eps = {:.2}  E = {:.8}  gap = {:.3e}", p.param, p.total, p.gap);
    }
    for f in &table.fits {
        println!("{:>18}: exponent {:.3}", f.quantity, f.exponent());
    }
    let dir = std::env::temp_dir().join("tactoid_gamma");
    std::fs::create_dir_all(&dir)?;
    table.write_csv(std::fs::File::create(dir.join("gamma.csv"))?)?;
    std::fs::write(dir.join("gamma.svg"), table.svg())?;
    println!("wrote {}", dir.display());
    Ok(())
}
