//! Evaluate every energy functional on the built-in shapes, including the
//! semicircle, whose Dirichlet energy diverges under refinement and is
//! flagged rather than rejected.

use tactoid::energy::{e0, e_eps, e_v, total_energy, EnergyOptions};
use tactoid::field::SolveOptions;
use tactoid::geometry::{CosineBump, GraphCurve, Grid, Semicircle};

fn main() -> tactoid::Result<()> {
    let opts = EnergyOptions::default().with_solve(SolveOptions::default().with_n_eta(65));
    let bump = GraphCurve::sample(&CosineBump::unit(), 257, Grid::Cosine)?;

    let e = total_energy(&bump, &opts, Some(1.0))?;
    println!("E   (area 1)   = {:.6}  diverged = {}", e.total, e.diverged);
    let ev = e_v(&bump, 1e4, &opts)?;
    println!("E_v (v = 1e4)  = {:.6}  F = {:.6}", ev.total, ev.shape_factor);
    let ee = e_eps(&bump, 0.05, &opts)?;
    println!("E_eps (0.05)   = {:.6}", ee.total);
    println!("E_0            = {:.6}", e0(&bump).total);

    let semi = GraphCurve::sample(&Semicircle::default(), 257, Grid::Cosine)?;
    let r = total_energy(&semi, &opts, None)?;
    let study = r.divergence.expect("refinement study");
    println!("semicircle: diverged = {}, levels:", r.diverged);
    for l in &study.levels {
        println!("  {}x{}: {:.3}", l.n_xi, l.n_eta, l.value);
    }
    Ok(())
}
