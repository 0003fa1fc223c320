//! Large-volume limit on the cusped-semicircle family eps = v^{-1/4}.

use tactoid::asymptotics::{large_volume_sweep, sqrt_two_pi, SweepOptions};

fn main() -> tactoid::Result<()> {
    let opts = SweepOptions {
        n_xi: 513,
        ..Default::default()
    };
    let opts = SweepOptions {
        energy: opts.energy.with_solve(opts.energy.solve.with_n_eta(129)).without_divergence_check(),
        ..opts
    };
    let r = large_volume_sweep(&[1e4, 1e5, 1e6, 1e7, 1e8], &opts, &[])?;
    println!("limit sqrt(2 pi) = {:.7}", sqrt_two_pi());
    for p in &r.points {
        println!("v = {:.0e}  E_v = {:.6}  gap = {:.4}", p.param, p.total, p.gap);
    }
    for f in &r.fits {
        println!("{:>18}: exponent {:+.3}", f.quantity, f.exponent());
    }
    Ok(())
}
