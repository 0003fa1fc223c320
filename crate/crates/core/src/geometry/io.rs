//! Curve files: CSV samples (`x,y` header, ascending x) and spectral records
//! (`{"a": .., "coefficients": [..]}`).

use std::io::{Read, Write};
use std::path::Path;

use super::{GraphCurve, Grid, SpectralForm};
use crate::{Error, Result};

pub fn read_csv<R: Read>(reader: R) -> Result<GraphCurve> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Parse(format!(
            "expected header `x,y`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
        };
        xs.push(parse(&rec[0])?);
        ys.push(parse(&rec[1])?);
    }
    GraphCurve::from_samples(xs, ys)
}

pub fn write_csv<W: Write>(curve: &GraphCurve, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for (x, y) in curve.xs().iter().zip(curve.fs()) {
        w.write_record([format!("{x:.17e}"), format!("{y:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectral<R: Read>(reader: R) -> Result<SpectralForm> {
    let form: SpectralForm = serde_json::from_reader(reader)?;
    if !(form.a > 0.0) || form.coefficients.is_empty() {
        return Err(Error::Parse("spectral record needs a > 0 and coefficients".into()));
    }
    Ok(form)
}

pub fn write_spectral<W: Write>(form: &SpectralForm, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, form)?;
    Ok(())
}

/// Load a curve from a path: `.json` files are spectral records sampled on
/// `n` nodes of `grid`, anything else is read as CSV.
pub fn load(path: &Path, n: usize, grid: Grid) -> Result<GraphCurve> {
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        GraphCurve::from_spectral(read_spectral(file)?, n, grid)
    } else {
        read_csv(file)
    }
}
