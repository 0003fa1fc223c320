//! The explicit configuration on [-pi, pi]: its displayed one-dimensional
//! energy integral, the same energy on the solver grid, and the harmonic
//! upper bound. The literature value is printed for comparison only.

use tactoid::energy::baseline_gamma0;
use tactoid::field::SolveOptions;

fn main() -> tactoid::Result<()> {
    let r = baseline_gamma0(513, &SolveOptions::default().with_n_eta(129))?;
    let d = &r.displayed_integral;
    println!("perimeter        {:.10}", d.perimeter);
    println!("normal part      {:.10}", d.normal_part);
    println!("tangential part  {:.10}", d.tangential_part);
    println!("total (1-D)      {:.10}  self-consistency {:.1e}", d.total, d.self_consistency);
    println!("total (grid)     {:.10}  rel. diff {:.1e}", r.grid_extension.total, r.grid_extension.relative_difference);
    println!("harmonic bound   {:.10}", r.upper_bound);
    println!("reference value  {} (deviation {:+.4})", r.reference_value, r.reference_deviation);
    Ok(())
}
