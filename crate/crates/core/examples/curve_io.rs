//! Round trip of the two curve file formats: CSV samples and spectral
//! coefficient records.

use tactoid::geometry::{io, GraphCurve, Grid, SpectralForm};

fn main() -> tactoid::Result<()> {
    let form = SpectralForm::new(1.0, vec![0.9, 0.1, -0.02]);
    let curve = GraphCurve::from_spectral(form.clone(), 65, Grid::Cosine)?;

    let mut csv = Vec::new();
    io::write_csv(&curve, &mut csv)?;
    let back = io::read_csv(csv.as_slice())?;
    println!("CSV: {} samples, area {:.10} -> {:.10}", back.len(), curve.volume(), back.volume());

    let mut json = Vec::new();
    io::write_spectral(&form, &mut json)?;
    println!("spectral record: {}", String::from_utf8_lossy(&json).replace('\n', " "));
    let form2 = io::read_spectral(json.as_slice())?;
    println!("area from coefficients {:.10}", form2.area());
    Ok(())
}
