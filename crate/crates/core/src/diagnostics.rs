//! Empirical geometric constants of sampled curves: two-point and chord-arc
//! constants, the vanishing chord-arc modulus, endpoint cusp ratios, mean
//! oscillation of the normal, and the Weil-Petersson family of double
//! integrals (tangent `H^{3/2}` seminorm, Möbius energy, β-numbers and the
//! polygon length defect).
//!
//! Arc lengths are read from the curve's stations. Maximum reductions are
//! exact under any thread schedule; sums use a fixed reduction order.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{ParametricCurve, Point};
use crate::numerics::golden_section;
use crate::{Error, Result};

/// Triples are scanned exhaustively up to this many samples.
pub const EXHAUSTIVE_LIMIT: usize = 512;

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn max_of(values: impl ParallelIterator<Item = f64>) -> f64 {
    values.reduce(|| 0.0, f64::max)
}

/// Indices used for triple scans: all of them, or an evenly strided subset
/// that keeps both endpoints.
fn strata(n: usize) -> Vec<usize> {
    if n <= EXHAUSTIVE_LIMIT {
        return (0..n).collect();
    }
    let m = EXHAUSTIVE_LIMIT;
    let mut idx: Vec<usize> = (0..m).map(|k| k * (n - 1) / (m - 1)).collect();
    idx.dedup();
    idx
}

/// `sup max(|z₁z₂|, |z₂z₃|) / |z₁z₃|` over ordered sample triples.
pub fn two_point_constant(curve: &ParametricCurve) -> Result<f64> {
    let pts = curve.points();
    if pts.len() < 3 {
        return Err(Error::MalformedCurve("need at least 3 samples".into()));
    }
    let idx = strata(pts.len());
    Ok(max_of((0..idx.len()).into_par_iter().map(|a| {
        let z1 = pts[idx[a]];
        let mut best = 1.0f64;
        for c in a + 2..idx.len() {
            let z3 = pts[idx[c]];
            let base = dist(z1, z3);
            let mut worst = 0.0f64;
            for &j in &idx[a + 1..c] {
                let z2 = pts[j];
                worst = worst.max(dist(z1, z2).max(dist(z2, z3)));
            }
            best = best.max(worst / base);
        }
        best
    })))
}

fn pair_ratios(curve: &ParametricCurve) -> Result<Vec<(f64, f64)>> {
    let pts = curve.points();
    let t = curve.params();
    let n = pts.len();
    let rows: Vec<Result<Vec<(f64, f64)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let chord = dist(pts[i], pts[j]);
                    if chord == 0.0 {
                        return Err(Error::MalformedCurve(format!("samples {i} and {j} coincide")));
                    }
                    Ok((chord, (t[j] - t[i]) / chord))
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// `sup arc / chord` over sample pairs.
pub fn chord_arc_constant(curve: &ParametricCurve) -> Result<f64> {
    Ok(pair_ratios(curve)?.iter().fold(1.0f64, |m, &(_, r)| m.max(r)))
}

/// A scale-indexed table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub r: Vec<f64>,
    pub value: Vec<f64>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "value"])?;
        for (r, v) in self.r.iter().zip(&self.value) {
            w.write_record([format!("{r:.17e}"), format!("{v:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per `r`: `sup (arc/chord) − 1` over pairs with chord at most `r`.
pub fn vanishing_modulus(curve: &ParametricCurve, r_list: &[f64]) -> Result<Table> {
    check_radii(r_list)?;
    let pairs = pair_ratios(curve)?;
    let value = r_list
        .iter()
        .map(|&r| {
            pairs
                .par_iter()
                .filter(|(c, _)| *c <= r)
                .map(|(_, q)| (q - 1.0).max(0.0))
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    Ok(Table {
        r: r_list.to_vec(),
        value,
    })
}

fn check_radii(r_list: &[f64]) -> Result<()> {
    if r_list.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    Ok(())
}

/// Endpoint slope ratios `y/(x − x_left)` and `y/(x_right − x)`, measured
/// from the endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspTable {
    pub r: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl CuspTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "left", "right"])?;
        for i in 0..self.r.len() {
            w.write_record([self.r[i], self.left[i], self.right[i]].map(|v| format!("{v:.17e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Max over samples within distance `r` of an endpoint of the height over
/// the horizontal offset from it. A sample not strictly inside the
/// horizontal span counts as an infinite ratio.
pub fn cusp_angle(curve: &ParametricCurve, r_list: &[f64]) -> Result<CuspTable> {
    check_radii(r_list)?;
    let pts = curve.points();
    let (l, rt) = (pts[0], pts[pts.len() - 1]);
    let ratio = |end: Point, z: Point, sign: f64| {
        let dx = sign * (z[0] - end[0]);
        let dy = z[1] - end[1];
        if dx > 0.0 {
            dy.abs() / dx
        } else {
            f64::INFINITY
        }
    };
    let scan = |end: Point, sign: f64, r: f64| {
        pts.iter()
            .filter(|&&z| z != end && dist(z, end) <= r)
            .map(|&z| ratio(end, z, sign))
            .fold(0.0f64, f64::max)
    };
    Ok(CuspTable {
        r: r_list.to_vec(),
        left: r_list.iter().map(|&r| scan(l, 1.0, r)).collect(),
        right: r_list.iter().map(|&r| scan(rt, -1.0, r)).collect(),
    })
}

/// Length of the part of segment `p → q` inside the closed disk `B(c, r)`.
fn segment_in_ball(p: Point, q: Point, c: Point, r: f64) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let f = [p[0] - c[0], p[1] - c[1]];
    let a = d[0] * d[0] + d[1] * d[1];
    let b = 2.0 * (f[0] * d[0] + f[1] * d[1]);
    let cc = f[0] * f[0] + f[1] * f[1] - r * r;
    let disc = b * b - 4.0 * a * cc;
    if disc <= 0.0 {
        return 0.0;
    }
    let s = disc.sqrt();
    let t0 = ((-b - s) / (2.0 * a)).max(0.0);
    let t1 = ((-b + s) / (2.0 * a)).min(1.0);
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * a.sqrt()
    }
}

/// Unit normals of the polyline segments (tangent rotated by +90°).
fn segment_normals(pts: &[Point]) -> Vec<Point> {
    pts.windows(2)
        .map(|w| {
            let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
            let l = dx.hypot(dy);
            [-dy / l, dx / l]
        })
        .collect()
}

/// Per `r`: sup over sample centers of the mean oscillation of the
/// segment normal over `B(x, r) ∩ Γ`.
pub fn vmo_oscillation(curve: &ParametricCurve, r_list: &[f64]) -> Result<Table> {
    check_radii(r_list)?;
    let pts = curve.points();
    let normals = segment_normals(pts);
    let value = r_list
        .iter()
        .map(|&r| {
            max_of(pts.par_iter().map(|&c| {
                let mut total = 0.0;
                let mut mean = [0.0; 2];
                let weights: Vec<f64> = pts
                    .windows(2)
                    .map(|w| segment_in_ball(w[0], w[1], c, r))
                    .collect();
                for (w, n) in weights.iter().zip(&normals) {
                    total += w;
                    mean[0] += w * n[0];
                    mean[1] += w * n[1];
                }
                if total == 0.0 {
                    return 0.0;
                }
                mean = [mean[0] / total, mean[1] / total];
                let osc: f64 = weights
                    .iter()
                    .zip(&normals)
                    .map(|(w, n)| w * (n[0] - mean[0]).hypot(n[1] - mean[1]))
                    .sum();
                osc / total
            }))
        })
        .collect();
    Ok(Table {
        r: r_list.to_vec(),
        value,
    })
}

/// Weil-Petersson quantities of a sampled curve, with their truncation
/// data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilPetersson {
    /// `∫∫ |z'(t) − z'(s)|² / (t − s)²` outside the band `|t − s| < 2Δt`.
    pub h32_seminorm: f64,
    /// The same with every other sample (band and spacing doubled).
    pub h32_coarse: f64,
    /// `∫∫ (1/|z − w|² − 1/l(z, w)²)`, diagonal excluded.
    pub mobius_energy: f64,
    /// `∫∫ β²(x, t) dx dt / t²` over dyadic levels.
    pub beta_sq_integral: f64,
    /// Per-level contributions to `beta_sq_integral` (largest `t` first).
    pub beta_levels: Table,
    /// Partial sums of `Σ 2ⁿ [l(Γ) − l(Γₙ)]`.
    pub polygon_defect: Vec<f64>,
    /// Mean station spacing `Δt`.
    pub spacing: f64,
    /// Width of the excluded diagonal band.
    pub band: f64,
}

/// Unit tangents at the samples (central differences, one-sided at the
/// ends) and trapezoid weights in `t`.
fn tangents_and_weights(curve: &ParametricCurve) -> (Vec<Point>, Vec<f64>) {
    let pts = curve.points();
    let t = curve.params();
    let n = pts.len();
    let tangents = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let (dx, dy) = (pts[b][0] - pts[a][0], pts[b][1] - pts[a][1]);
            let l = dx.hypot(dy);
            [dx / l, dy / l]
        })
        .collect();
    let weights = (0..n)
        .map(|i| {
            let lo = if i > 0 { t[i] - t[i - 1] } else { 0.0 };
            let hi = if i + 1 < n { t[i + 1] - t[i] } else { 0.0 };
            0.5 * (lo + hi)
        })
        .collect();
    (tangents, weights)
}

fn fixed_sum(rows: Vec<f64>) -> f64 {
    rows.iter().sum()
}

fn h32(curve: &ParametricCurve, band: f64) -> f64 {
    let (tan, w) = tangents_and_weights(curve);
    let t = curve.params();
    let n = t.len();
    fixed_sum(
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    let dt = t[j] - t[i];
                    if dt.abs() < band {
                        continue;
                    }
                    let d = (tan[i][0] - tan[j][0]).powi(2) + (tan[i][1] - tan[j][1]).powi(2);
                    acc += w[i] * w[j] * d / (dt * dt);
                }
                acc
            })
            .collect(),
    )
}

fn mobius(curve: &ParametricCurve) -> f64 {
    let (_, w) = tangents_and_weights(curve);
    let pts = curve.points();
    let t = curve.params();
    let n = pts.len();
    fixed_sum(
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let c = dist(pts[i], pts[j]);
                    let l = (t[j] - t[i]).abs();
                    acc += w[i] * w[j] * (1.0 / (c * c) - 1.0 / (l * l));
                }
                acc
            })
            .collect(),
    )
}

/// `inf` over lines of `sup dist(z, L)` for the given points, divided by
/// `t`: half the minimal strip width.
fn beta(window: &[Point], t: f64) -> f64 {
    if window.len() < 3 {
        return 0.0;
    }
    let width = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for z in window {
            let p = -s * z[0] + c * z[1];
            lo = lo.min(p);
            hi = hi.max(p);
        }
        0.5 * (hi - lo)
    };
    // coarse scan to bracket the global minimum, then golden section
    const SCAN: usize = 64;
    let step = std::f64::consts::PI / SCAN as f64;
    let (k, _) = (0..SCAN)
        .map(|k| (k, width(k as f64 * step)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let centre = k as f64 * step;
    let (_, best) = golden_section(width, centre - step, centre + step, 1e-10);
    best.min(width(centre)) / t
}

fn beta_integral(curve: &ParametricCurve, spacing: f64) -> (f64, Table) {
    let pts = curve.points();
    let diameter = pts
        .iter()
        .flat_map(|p| pts.iter().map(move |q| dist(*p, *q)))
        .fold(0.0f64, f64::max);
    let (_, w) = tangents_and_weights(curve);
    let mut levels = Vec::new();
    let mut t = diameter;
    while t >= 4.0 * spacing {
        levels.push(t);
        t *= 0.5;
    }
    let contributions: Vec<f64> = levels
        .iter()
        .map(|&t| {
            let row: Vec<f64> = (0..pts.len())
                .into_par_iter()
                .map(|i| {
                    let window: Vec<Point> = pts.iter().copied().filter(|z| dist(*z, pts[i]) <= t).collect();
                    w[i] * beta(&window, t).powi(2)
                })
                .collect();
            // ∫ dt/t² over the dyadic band around t is ln 2 / t
            std::f64::consts::LN_2 / t * fixed_sum(row)
        })
        .collect();
    let total = contributions.iter().sum();
    (
        total,
        Table {
            r: levels,
            value: contributions,
        },
    )
}

fn polygon_defect(curve: &ParametricCurve) -> Vec<f64> {
    let length = curve.perimeter();
    let t0 = curve.params()[0];
    let total = curve.total_length();
    let mut sums = Vec::new();
    let mut acc = 0.0;
    let mut n = 0u32;
    while (1usize << n) * 4 <= curve.len() {
        let m = 1usize << n;
        let verts: Vec<Point> = (0..=m)
            .map(|j| curve.point_at(t0 + total * j as f64 / m as f64))
            .collect();
        let ln: f64 = verts.windows(2).map(|v| dist(v[0], v[1])).sum();
        acc += m as f64 * (length - ln).max(0.0);
        sums.push(acc);
        n += 1;
    }
    sums
}

/// Tangent seminorm, Möbius energy, β-number integral and polygon defect.
pub fn weil_petersson_suite(curve: &ParametricCurve) -> Result<WeilPetersson> {
    if curve.len() < 8 {
        return Err(Error::MalformedCurve("need at least 8 samples".into()));
    }
    let spacing = curve.total_length() / (curve.len() - 1) as f64;
    let band = 2.0 * spacing;
    let coarse_pts: Vec<Point> = curve.points().iter().step_by(2).copied().collect();
    let coarse_t: Vec<f64> = curve.params().iter().step_by(2).copied().collect();
    let coarse = ParametricCurve::from_stations(coarse_pts, coarse_t)?;
    let (beta_sq_integral, beta_levels) = beta_integral(curve, spacing);
    Ok(WeilPetersson {
        h32_seminorm: h32(curve, band),
        h32_coarse: h32(&coarse, 2.0 * band),
        mobius_energy: mobius(curve),
        beta_sq_integral,
        beta_levels,
        polygon_defect: polygon_defect(curve),
        spacing,
        band,
    })
}

/// All diagnostics of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub samples: usize,
    pub length: f64,
    pub two_point_constant: f64,
    pub chord_arc_constant: f64,
    pub vanishing_modulus: Table,
    pub cusp_table: CuspTable,
    pub vmo_table: Table,
    pub beta_sq_integral: f64,
    pub mobius_energy: f64,
    pub h32_seminorm: f64,
    pub polygon_defect_partial_sums: Vec<f64>,
    pub weil_petersson: WeilPetersson,
}

/// Radii `diam · 2^{-k}`, `k = 1..=levels`.
pub fn dyadic_radii(curve: &ParametricCurve, levels: usize) -> Vec<f64> {
    let pts = curve.points();
    let diam = dist(pts[0], pts[pts.len() - 1]).max(
        pts.iter()
            .map(|p| dist(*p, pts[0]))
            .fold(0.0f64, f64::max),
    );
    (1..=levels).map(|k| diam * 0.5f64.powi(k as i32)).collect()
}

/// Runs every diagnostic with the given radii.
pub fn diagnose(curve: &ParametricCurve, r_list: &[f64]) -> Result<DiagnosticsReport> {
    let wp = weil_petersson_suite(curve)?;
    Ok(DiagnosticsReport {
        samples: curve.len(),
        length: curve.total_length(),
        two_point_constant: two_point_constant(curve)?,
        chord_arc_constant: chord_arc_constant(curve)?,
        vanishing_modulus: vanishing_modulus(curve, r_list)?,
        cusp_table: cusp_angle(curve, r_list)?,
        vmo_table: vmo_oscillation(curve, r_list)?,
        beta_sq_integral: wp.beta_sq_integral,
        mobius_energy: wp.mobius_energy,
        h32_seminorm: wp.h32_seminorm,
        polygon_defect_partial_sums: wp.polygon_defect.clone(),
        weil_petersson: wp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn segment(n: usize) -> ParametricCurve {
        ParametricCurve::from_points((0..n).map(|i| [i as f64 / (n - 1) as f64, 0.0]).collect()).unwrap()
    }

    #[test]
    fn straight_segment_is_trivial() {
        let c = segment(65);
        assert_eq!(two_point_constant(&c).unwrap(), 1.0);
        assert!((chord_arc_constant(&c).unwrap() - 1.0).abs() < 1e-12);
        let r = [0.5, 0.1];
        assert!(vanishing_modulus(&c, &r).unwrap().value.iter().all(|v| *v < 1e-12));
        assert!(vmo_oscillation(&c, &r).unwrap().value.iter().all(|v| *v < 1e-12));
        let wp = weil_petersson_suite(&c).unwrap();
        assert!(wp.h32_seminorm.abs() < 1e-20);
        assert!(wp.mobius_energy.abs() < 1e-9);
        assert!(wp.beta_sq_integral < 1e-20);
        assert!(wp.polygon_defect.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn segment_in_ball_lengths() {
        assert!((segment_in_ball([-2.0, 0.0], [2.0, 0.0], [0.0, 0.0], 1.0) - 2.0).abs() < 1e-14);
        assert_eq!(segment_in_ball([-2.0, 2.0], [2.0, 2.0], [0.0, 0.0], 1.0), 0.0);
        assert!((segment_in_ball([0.0, 0.0], [0.5, 0.0], [0.0, 0.0], 1.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn beta_of_a_square_window() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        // narrowest strip of the unit square has width 1
        assert!((beta(&pts, 1.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn semicircle_chord_arc() {
        let n = 257;
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let a = PI * (1.0 - i as f64 / (n - 1) as f64);
                [a.cos(), a.sin()]
            })
            .collect();
        let t: Vec<f64> = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
        let c = ParametricCurve::from_stations(pts, t).unwrap();
        assert!((chord_arc_constant(&c).unwrap() - PI / 2.0).abs() < 1e-12);
    }
}
