//! Small numerical kernels shared across modules: adaptive quadrature,
//! sampled-data differentiation, golden-section search and power-law fits.

use serde::{Deserialize, Serialize};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WEIGHTS_K[7];
    let mut gauss = fc * GK_WEIGHTS_G[3];
    for (k, &node) in GK_NODES.iter().enumerate().take(7) {
        let s = f(c - h * node) + f(c + h * node);
        kronrod += GK_WEIGHTS_K[k] * s;
        if k % 2 == 1 {
            gauss += GK_WEIGHTS_G[k / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature. Nodes are interior, so the
/// integrand is never evaluated at `a` or `b`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol.max(1e-15 * val.abs()) || depth == 0 {
            return val;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    recurse(&f, a, b, tol, 40)
}

/// Composite trapezoid rule on a (possibly nonuniform) grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Second-order derivative of sampled data on a nonuniform grid; one-sided
/// three-point stencils at the ends.
pub fn derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 3, "derivative needs at least three samples");
    let three_point = |x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, at: f64| {
        // derivative of the quadratic through the three points, evaluated at `at`
        let l0 = ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2));
        let l1 = ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2));
        let l2 = ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1));
        y0 * l0 + y1 * l1 + y2 * l2
    };
    let mut d = vec![0.0; n];
    d[0] = three_point(xs[0], xs[1], xs[2], ys[0], ys[1], ys[2], xs[0]);
    for i in 1..n - 1 {
        d[i] = three_point(
            xs[i - 1],
            xs[i],
            xs[i + 1],
            ys[i - 1],
            ys[i],
            ys[i + 1],
            xs[i],
        );
    }
    d[n - 1] = three_point(
        xs[n - 3],
        xs[n - 2],
        xs[n - 1],
        ys[n - 3],
        ys[n - 2],
        ys[n - 1],
        xs[n - 1],
    );
    d
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Power-law fit `y ≈ C x^p` by least squares in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// Slope between the first and last points only.
    pub endpoint_slope: f64,
    /// Standard error of the fitted exponent.
    pub exponent_stderr: f64,
}

impl PowerFit {
    /// Least-squares and endpoint slopes disagreeing by more than 0.1 signals
    /// an under-resolved sweep.
    pub fn under_resolved(&self) -> bool {
        (self.exponent - self.endpoint_slope).abs() > 0.1
    }
}

pub fn power_fit(xs: &[f64], ys: &[f64]) -> Option<PowerFit> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let p = sxy / sxx;
    let c = my - p * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - c - p * x).powi(2))
        .sum();
    let residual = (ss / n).sqrt();
    let stderr = if lx.len() > 2 {
        (ss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let last = lx.len() - 1;
    Some(PowerFit {
        exponent: p,
        prefactor: c.exp(),
        residual,
        endpoint_slope: (ly[last] - ly[0]) / (lx[last] - lx[0]),
        exponent_stderr: stderr,
    })
}

/// Ratio `x / sin x`, accurate near zero.
pub fn x_over_sin(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x / x.sin()
    }
}

/// `2 sin(x/2) / x`, accurate near zero.
pub fn sinc_half(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 24.0
    } else {
        2.0 * (0.5 * x).sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_integrates_smooth_and_endpoint_singular() {
        let v = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-12);
        // 1/sqrt(x) is never evaluated at x = 0
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn derivative_is_exact_for_quadratics() {
        let xs = [0.0, 0.1, 0.35, 0.5, 0.9, 1.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d = derivative(&xs, &ys);
        for (x, dv) in xs.iter().zip(d) {
            assert!((dv - (6.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx < 1e-18);
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.25)).collect();
        let fit = power_fit(&xs, &ys).unwrap();
        assert!((fit.exponent + 0.25).abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-12);
        assert!(!fit.under_resolved());
        assert!(power_fit(&[1.0], &[1.0]).is_none());
        assert!(power_fit(&[1.0, 2.0], &[1.0, -1.0]).is_none());
    }
}
