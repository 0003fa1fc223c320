//! Thin droplets: Dirichlet energy linear in the aspect ratio and total
//! energy at area eps^2 scaling like eps^{2/3}.

use tactoid::asymptotics::{small_volume_sweep, SmallVolumeOptions};

fn main() -> tactoid::Result<()> {
    let r = small_volume_sweep(&[0.2, 0.1, 0.05, 0.025], &SmallVolumeOptions::default())?;
    for p in &r.points {
        println!(
            "eps = {:.3}  D/eps = {:.5}  min energy at area eps^2 = {:.5}",
            p.param, p.extra["dirichlet_over_eps"], p.total
        );
    }
    for f in &r.fits {
        println!("{:>16}: exponent {:.4} (target {:?})", f.quantity, f.exponent(), f.target);
    }
    println!("window ratio {:.4}", r.summary["window_ratio"]);
    Ok(())
}
