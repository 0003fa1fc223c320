//! Reference computations used by the integration tests. Nothing here calls
//! into the library's numerics, so agreement is a genuine cross-check.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // split into panels so that narrow features are not skipped
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            rec(f, lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), tol / panels as f64, 48)
        })
        .sum()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Exhaustive scan of `max(|z1 z2|, |z2 z3|) / |z1 z3|` over ordered triples.
pub fn brute_two_point(p: &[[f64; 2]]) -> f64 {
    let mut best: f64 = 1.0;
    for i in 0..p.len() {
        for k in i + 2..p.len() {
            let base = dist(p[i], p[k]);
            for j in i + 1..k {
                best = best.max(dist(p[i], p[j]).max(dist(p[j], p[k])) / base);
            }
        }
    }
    best
}

/// Exhaustive scan of polyline arc length over chord.
pub fn brute_chord_arc(p: &[[f64; 2]]) -> f64 {
    let mut best: f64 = 1.0;
    for i in 0..p.len() {
        let mut arc = 0.0;
        for j in i + 1..p.len() {
            arc += dist(p[j - 1], p[j]);
            best = best.max(arc / dist(p[i], p[j]));
        }
    }
    best
}

/// Points on the unit upper semicircle at equal angle steps, left to right.
pub fn semicircle_points(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let t = PI * (1.0 - i as f64 / (n - 1) as f64);
            [t.cos(), t.sin()]
        })
        .collect()
}

/// Two unit-speed segments meeting at interior angle `alpha` at the origin.
pub fn corner_points(n: usize, alpha: f64) -> Vec<[f64; 2]> {
    let half = (n - 1) / 2;
    let left = [-(0.5 * alpha).sin(), -(0.5 * alpha).cos()];
    let right = [(0.5 * alpha).sin(), -(0.5 * alpha).cos()];
    (0..n)
        .map(|i| {
            if i <= half {
                let s = 1.0 - i as f64 / half as f64;
                [s * left[0], s * left[1]]
            } else {
                let s = (i - half) as f64 / (n - 1 - half) as f64;
                [s * right[0], s * right[1]]
            }
        })
        .collect()
}

/// The unscaled three-piece cusped profile, written out directly.
pub fn cusped_bar(eps: f64, x: f64) -> f64 {
    let c = ((1.0 + eps) / (1.0 - eps)).sqrt();
    let r = eps / (1.0 - eps);
    let j = (1.0 - eps * eps).sqrt();
    if x.abs() <= j {
        (1.0 - x * x).sqrt()
    } else if x < 0.0 {
        r - (r * r - (x + c).powi(2)).max(0.0).sqrt()
    } else {
        r - (r * r - (-x + c).powi(2)).max(0.0).sqrt()
    }
}

/// `∫_band^L 2 (L − u) · 4 sin²(u/2) / u² du`: the double integral of
/// `|z'(t) − z'(s)|² / (t − s)²` over a unit-circle arc of length `L`,
/// restricted to `|t − s| ≥ band`.
pub fn arc_h32(length: f64, band: f64) -> f64 {
    simpson(
        &|u: f64| 2.0 * (length - u) * 4.0 * (0.5 * u).sin().powi(2) / (u * u),
        band,
        length,
        1e-12,
    )
}
