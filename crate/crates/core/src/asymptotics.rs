//! Large- and small-volume limits.
//!
//! * Large volume: `E_v` on the cusped semicircle with `ε = v^{-1/4}`
//!   approaches `√(2π)`, the shape factor of the half disk.
//! * Small volume: thin droplets of aspect `ε` carry Dirichlet energy of
//!   order `ε`, the total energy at area `ε²` scales like `ε^{2/3}`, and the
//!   rescaled functionals `E_ε` approach `E₀`, whose minimizer is
//!   `π^{-4/3} (1 + cos πx) / 2`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{compress, e0, e_eps, e_v, quadratic_quadrature, EnergyOptions, EnergyReport};
use crate::field::{self, AngleField, SolveOptions};
use crate::geometry::{hausdorff_distance, CosineBump, CuspedSemicircle, GraphCurve, Grid, Semicircle};
use crate::numerics::{derivative, golden_section, integrate, power_fit, PowerFit};
use crate::optimize::{minimize, Functional, OptimConfig, ShapeParams};
use crate::plot::{line_plot, Scale, Series};
use crate::{Error, Result};

/// `√(2π)`, the shape factor `l/√A` of the half disk.
pub fn sqrt_two_pi() -> f64 {
    (2.0 * PI).sqrt()
}

/// Sampled cusped semicircle on `[-1, 1]` (`0 < ε < 1/4`).
pub fn cusped_semicircle(eps: f64, n: usize, grid: Grid) -> Result<GraphCurve> {
    GraphCurve::sample(&CuspedSemicircle::new(eps)?, n, grid)
}

/// A fitted exponent with its target and the under-resolution flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub quantity: String,
    pub target: Option<f64>,
    pub fit: PowerFit,
    /// Least-squares and endpoint slopes disagree by more than 0.1.
    pub under_resolved: bool,
}

impl ExponentFit {
    fn new(quantity: &str, target: Option<f64>, xs: &[f64], ys: &[f64]) -> Option<Self> {
        if xs.len() < 4 {
            return None;
        }
        let fit = power_fit(xs, ys)?;
        Some(ExponentFit {
            quantity: quantity.to_string(),
            target,
            under_resolved: fit.under_resolved(),
            fit,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.fit.exponent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// `v` or `ε`.
    pub param: f64,
    pub dirichlet: f64,
    pub perimeter: f64,
    pub total: f64,
    /// `total − target` where a target exists.
    pub gap: f64,
    /// Further named quantities (written as extra CSV columns).
    pub extra: BTreeMap<String, f64>,
    pub report: Option<EnergyReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    LargeVolume,
    SmallVolume,
    GammaConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    /// Name of the swept parameter (`v` or `eps`).
    pub parameter: String,
    pub target: Option<f64>,
    pub points: Vec<SweepPoint>,
    pub fits: Vec<ExponentFit>,
    /// Summary numbers specific to the sweep.
    pub summary: BTreeMap<String, f64>,
}

impl SweepResult {
    pub fn fit(&self, quantity: &str) -> Option<&ExponentFit> {
        self.fits.iter().find(|f| f.quantity == quantity)
    }

    fn extra_columns(&self) -> Vec<String> {
        let mut names: Vec<String> = self.points.iter().flat_map(|p| p.extra.keys().cloned()).collect();
        names.sort();
        names.dedup();
        names
    }

    /// `param,dirichlet,perimeter,total,gap` followed by the extra columns.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let extras = self.extra_columns();
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["param", "dirichlet", "perimeter", "total", "gap"];
        header.extend(extras.iter().map(String::as_str));
        w.write_record(&header)?;
        for p in &self.points {
            let mut row: Vec<String> = [p.param, p.dirichlet, p.perimeter, p.total, p.gap]
                .iter()
                .map(|v| format!("{v:.17e}"))
                .collect();
            row.extend(
                extras
                    .iter()
                    .map(|k| p.extra.get(k).map(|v| format!("{v:.17e}")).unwrap_or_default()),
            );
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Log-log plot of `|gap|` (or the total when there is no target) and
    /// every extra series, annotated with the fitted slopes.
    pub fn svg(&self) -> String {
        let xs: Vec<f64> = self.points.iter().map(|p| p.param).collect();
        let main: Vec<f64> = self
            .points
            .iter()
            .map(|p| if self.target.is_some() { p.gap.abs() } else { p.total })
            .collect();
        let mut series_data: Vec<(String, Vec<f64>)> = vec![(
            if self.target.is_some() { "|gap|".into() } else { "total".into() },
            main,
        )];
        for k in self.extra_columns() {
            let ys = self
                .points
                .iter()
                .map(|p| p.extra.get(&k).copied().unwrap_or(f64::NAN).abs())
                .collect();
            series_data.push((k, ys));
        }
        let series: Vec<Series> = series_data
            .iter()
            .map(|(n, ys)| Series {
                name: n,
                xs: &xs,
                ys,
            })
            .collect();
        let notes: Vec<String> = self
            .fits
            .iter()
            .map(|f| {
                let target = f.target.map(|t| format!(" (target {t:.3})")).unwrap_or_default();
                format!("slope[{}] = {:.3} ± {:.3}{}", f.quantity, f.fit.exponent, f.fit.exponent_stderr, target)
            })
            .collect();
        line_plot(&format!("{:?} sweep", self.kind), Scale::Log, Scale::Log, &series, &notes)
    }
}

/// Options shared by the sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub n_xi: usize,
    pub grid: Grid,
    pub energy: EnergyOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            n_xi: 1025,
            grid: Grid::Arc,
            energy: EnergyOptions::default(),
        }
    }
}

/// An optimized large-volume shape to evaluate alongside the cusped family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedShape {
    pub v: f64,
    pub params: ShapeParams,
}

/// `E_v` on the cusped semicircle with `ε = v^{-1/4}`.
///
/// Besides the harmonic value (the functional itself) each point records
/// the upper bound obtained from the linear extension `Θ = η arctan f'`
/// (`linear_bound_gap`) and the shape-factor part of the gap
/// (`shape_factor_gap`). The harmonic Dirichlet energy of the family grows
/// only logarithmically in `1/ε`, the linear extension like `1/ε`.
pub fn large_volume_sweep(
    v_list: &[f64],
    opts: &SweepOptions,
    optimized: &[OptimizedShape],
) -> Result<SweepResult> {
    if v_list.iter().any(|v| !(*v >= 1.0)) {
        return Err(Error::Domain("large-volume sweep needs v >= 1".into()));
    }
    let target = sqrt_two_pi();
    let points: Vec<SweepPoint> = v_list
        .par_iter()
        .map(|&v| {
            let eps = v.powf(-0.25);
            let curve = cusped_semicircle(eps, opts.n_xi, opts.grid)?;
            let r = e_v(&curve, v, &opts.energy)?;
            let lin = AngleField::linear_extension(&curve, &opts.energy.solve)?.dirichlet_energy();
            let mut extra = BTreeMap::new();
            extra.insert("eps".into(), eps);
            extra.insert("shape_factor_gap".into(), r.shape_factor - target);
            extra.insert("linear_bound_gap".into(), lin / v.sqrt() + r.shape_factor - target);
            Ok(SweepPoint {
                param: v,
                dirichlet: r.dirichlet,
                perimeter: r.perimeter,
                total: r.total,
                gap: r.total - target,
                extra,
                report: Some(r),
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = points.iter().map(|p| p.param).collect();
    let series = |k: &str| -> Vec<f64> { points.iter().map(|p| p.extra[k]).collect() };
    let gaps: Vec<f64> = points.iter().map(|p| p.gap).collect();
    let fits = [
        ExponentFit::new("gap", Some(-0.25), &xs, &gaps),
        ExponentFit::new("linear_bound_gap", Some(-0.25), &xs, &series("linear_bound_gap")),
        ExponentFit::new("shape_factor_gap", Some(-0.25), &xs, &series("shape_factor_gap")),
    ]
    .into_iter()
    .flatten()
    .collect();
    let mut summary = BTreeMap::new();
    for (k, o) in optimized.iter().enumerate() {
        let s = evaluate_optimized_large(o, opts)?;
        for (name, val) in s {
            summary.insert(format!("optimized[{k}].{name}"), val);
        }
    }
    Ok(SweepResult {
        kind: SweepKind::LargeVolume,
        parameter: "v".into(),
        target: Some(target),
        points,
        fits,
        summary,
    })
}

/// `E_v`, `F` and the Hausdorff distance to the unit half circle (after
/// dilation to area `π/2`) of an optimized shape.
pub fn evaluate_optimized_large(o: &OptimizedShape, opts: &SweepOptions) -> Result<Vec<(String, f64)>> {
    let curve = o.params.curve(opts.n_xi, opts.grid)?;
    let r = e_v(&curve, o.v, &opts.energy)?;
    let d = hausdorff_to_semicircle(&curve)?;
    Ok(vec![
        ("v".into(), o.v),
        ("e_v".into(), r.total),
        ("shape_factor".into(), r.shape_factor),
        ("shape_factor_rel_gap".into(), (r.shape_factor - sqrt_two_pi()) / sqrt_two_pi()),
        ("hausdorff".into(), d),
    ])
}

/// Hausdorff distance between `curve` dilated to area `π/2` and the unit
/// upper half circle, both densely sampled by arc length.
pub fn hausdorff_to_semicircle(curve: &GraphCurve) -> Result<f64> {
    let scaled = curve.rescale_to_volume(PI / 2.0)?;
    let semi = GraphCurve::sample(&Semicircle::default(), 2049, Grid::Arc)?;
    let a = scaled.to_parametric(4096)?;
    let b = semi.to_parametric(4096)?;
    Ok(hausdorff_distance(a.points(), b.points()))
}

/// The witness `(ε/2)(1 + cos πx)` on `[-1, 1]`.
pub fn witness(eps: f64, n: usize, grid: Grid) -> Result<GraphCurve> {
    GraphCurve::sample(
        &CosineBump {
            amplitude: eps,
            half_width: 1.0,
        },
        n,
        grid,
    )
}

/// `min_s D(s w) + ε F(s w)` over amplitudes of the unit cosine bump `w`:
/// the energy at area `ε²` restricted to that one-parameter family.
pub fn amplitude_minimum(eps: f64, n: usize, solve: &SolveOptions) -> Result<(f64, f64)> {
    let energy = |ln_s: f64| -> f64 {
        let s = ln_s.exp();
        match witness(s, n, Grid::Uniform).and_then(|c| {
            let d = field::solve_harmonic(&c, solve)?.dirichlet_energy();
            Ok(d + eps * c.perimeter() / c.volume().sqrt())
        }) {
            Ok(v) => v,
            Err(_) => f64::INFINITY,
        }
    };
    let (ln_s, value) = golden_section(energy, (1e-3f64).ln(), (4.0f64).ln(), 1e-6);
    Ok((ln_s.exp(), value))
}

/// Options of the small-volume sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallVolumeOptions {
    pub sweep: SweepOptions,
    /// Run the `E_ε` optimizer at each `ε` and record the distance of the
    /// result to the limit profile.
    pub optimize: bool,
    pub k: usize,
    pub optim_grid: (usize, usize),
}

impl Default for SmallVolumeOptions {
    fn default() -> Self {
        SmallVolumeOptions {
            sweep: SweepOptions {
                n_xi: 513,
                grid: Grid::Uniform,
                energy: EnergyOptions::default()
                    .with_solve(SolveOptions::default().with_n_eta(129))
                    .without_divergence_check(),
            },
            optimize: false,
            k: 8,
            optim_grid: (257, 65),
        }
    }
}

/// `L²` distance between two shapes on `[-1, 1]`.
pub fn l2_distance(a: impl Fn(f64) -> f64, b: impl Fn(f64) -> f64) -> f64 {
    integrate(|x| (a(x) - b(x)).powi(2), -1.0, 1.0, 1e-12).sqrt()
}

/// The limit profile `π^{-4/3} (1 + cos πx) / 2`.
pub fn limit_profile(x: f64) -> f64 {
    PI.powf(-4.0 / 3.0) * (0.5 * PI * x).cos().powi(2)
}

/// Dirichlet energy of thin witness droplets and the total energy at area
/// `ε²`.
pub fn small_volume_sweep(eps_list: &[f64], opts: &SmallVolumeOptions) -> Result<SweepResult> {
    if eps_list.iter().any(|e| !(*e > 0.0 && *e <= 0.2)) {
        return Err(Error::Domain("small-volume sweep needs eps in (0, 0.2]".into()));
    }
    let s = &opts.sweep;
    let points: Vec<SweepPoint> = eps_list
        .par_iter()
        .map(|&eps| {
            let curve = witness(eps, s.n_xi, s.grid)?;
            let f = field::solve_harmonic(&curve, &s.energy.solve)?;
            let d = f.dirichlet_energy();
            let lin = AngleField::linear_extension(&curve, &s.energy.solve)?.dirichlet_energy();
            let (amp, total) = amplitude_minimum(eps, 257, &SolveOptions::default().with_n_eta(65).with_tol(1e-9))?;
            let mut extra = BTreeMap::new();
            extra.insert("dirichlet_over_eps".into(), d / eps);
            extra.insert("linear_extension".into(), lin);
            extra.insert("optimal_amplitude".into(), amp);
            if opts.optimize {
                let cfg = OptimConfig {
                    functional: Functional::Eps { eps },
                    k: opts.k,
                    grid: opts.optim_grid,
                    levels: 2,
                    ..Default::default()
                };
                let r = minimize(&ShapeParams::cosine(opts.k, PI.powf(-2.0 / 3.0)), &cfg)?;
                let form = r.params.form();
                extra.insert("optimized_energy".into(), r.energy);
                extra.insert(
                    "profile_distance".into(),
                    l2_distance(|x| form.value(x), limit_profile),
                );
            }
            Ok(SweepPoint {
                param: eps,
                dirichlet: d,
                perimeter: curve.perimeter(),
                total,
                gap: f64::NAN,
                extra,
                report: None,
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = points.iter().map(|p| p.param).collect();
    let ds: Vec<f64> = points.iter().map(|p| p.dirichlet).collect();
    let totals: Vec<f64> = points.iter().map(|p| p.total).collect();
    let lins: Vec<f64> = points.iter().map(|p| p.extra["linear_extension"]).collect();
    let fits = [
        ExponentFit::new("dirichlet", Some(1.0), &xs, &ds),
        ExponentFit::new("linear_extension", Some(1.0), &xs, &lins),
        ExponentFit::new("total", Some(2.0 / 3.0), &xs, &totals),
    ]
    .into_iter()
    .flatten()
    .collect();
    let ratios: Vec<f64> = points.iter().map(|p| p.extra["dirichlet_over_eps"]).collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
    let mut summary = BTreeMap::new();
    summary.insert("dirichlet_over_eps_min".into(), lo);
    summary.insert("dirichlet_over_eps_max".into(), hi);
    summary.insert("window_ratio".into(), hi / lo);
    Ok(SweepResult {
        kind: SweepKind::SmallVolume,
        parameter: "eps".into(),
        target: None,
        points,
        fits,
        summary,
    })
}

/// Max of `|h'' + h / (4 (∫h²)^{3/2})|` on `n` uniform points, with `h''`
/// supplied in closed form and `∫h²` by the trapezoid rule on the same
/// points.
pub fn ode_residual(h: impl Fn(f64) -> f64, d2h: impl Fn(f64) -> f64, n: usize) -> f64 {
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let sq: Vec<f64> = xs.iter().map(|&x| h(x).powi(2)).collect();
    let mass = crate::numerics::trapezoid(&xs, &sq);
    let k = 4.0 * mass.powf(1.5);
    xs.iter().map(|&x| (d2h(x) + h(x) / k).abs()).fold(0.0, f64::max)
}

/// Residual of `h(x) = π^{-2/3} cos(πx/2)` in `h'' = −h / (4 (∫h²)^{3/2})`.
pub fn ode_check(n: usize) -> f64 {
    let c = PI.powf(-2.0 / 3.0);
    ode_residual(
        |x| c * (0.5 * PI * x).cos(),
        |x| -0.25 * PI * PI * c * (0.5 * PI * x).cos(),
        n,
    )
}

/// `ε^{-2/3} ∫∫ (∂_x Θ)²` for the linear extension on `𝒯_ε Γ`, by 1-D
/// quadrature: with `δ = ε^{2/3}`, `q = arctan(δ f') / (δ f)` and
/// `Θ = y q`, the inner `y`-integral is `q'² (δf)³ / 3`.
pub fn x_derivative_term(curve: &GraphCurve, eps: f64) -> f64 {
    let delta = eps.powf(2.0 / 3.0);
    let xs = curve.xs();
    let fs = curve.fs();
    let ds = curve.slopes();
    let d2 = derivative(xs, ds);
    let integrand: Vec<f64> = (0..xs.len())
        .map(|i| {
            let (f, d) = (fs[i], ds[i]);
            if !(f > 0.0) || !d.is_finite() {
                return 0.0;
            }
            let df = delta * f;
            let phi = (delta * d).atan();
            let dphi = delta * d2[i] / (1.0 + (delta * d).powi(2));
            let dq = (dphi * df - phi * delta * d) / (df * df);
            dq * dq * df.powi(3) / 3.0
        })
        .collect();
    quadratic_quadrature(xs, &integrand) / delta
}

/// `E_ε(f)` and its gap to `E₀(f)` along `eps_list`, plus the `∂_x` part of
/// the linear-extension energy. An `ε = 0` entry is `E₀(f)` itself.
pub fn gamma_convergence_table(curve: &GraphCurve, eps_list: &[f64], opts: &EnergyOptions) -> Result<SweepResult> {
    let limit = e0(curve);
    let points: Vec<SweepPoint> = eps_list
        .par_iter()
        .map(|&eps| {
            if eps == 0.0 {
                return Ok(SweepPoint {
                    param: 0.0,
                    dirichlet: limit.dirichlet,
                    perimeter: limit.perimeter,
                    total: limit.total,
                    gap: 0.0,
                    extra: BTreeMap::new(),
                    report: Some(limit.clone()),
                });
            }
            let r = e_eps(curve, eps, opts)?;
            let lin = AngleField::linear_extension(&compress(curve, eps), &opts.solve)?.dirichlet_energy();
            let mut extra = BTreeMap::new();
            extra.insert("x_derivative_term".into(), x_derivative_term(curve, eps));
            extra.insert("linear_extension_gap".into(), eps.powf(-2.0 / 3.0) * lin + r.perimeter_term - limit.total);
            Ok(SweepPoint {
                param: eps,
                dirichlet: r.dirichlet,
                perimeter: r.perimeter,
                total: r.total,
                gap: r.total - limit.total,
                extra,
                report: Some(r),
            })
        })
        .collect::<Result<_>>()?;
    let positive: Vec<&SweepPoint> = points.iter().filter(|p| p.param > 0.0).collect();
    let xs: Vec<f64> = positive.iter().map(|p| p.param).collect();
    let gaps: Vec<f64> = positive.iter().map(|p| p.gap).collect();
    let xt: Vec<f64> = positive.iter().map(|p| p.extra["x_derivative_term"]).collect();
    let fits = [
        ExponentFit::new("gap", None, &xs, &gaps),
        ExponentFit::new("x_derivative_term", Some(4.0 / 3.0), &xs, &xt),
    ]
    .into_iter()
    .flatten()
    .collect();
    let mut summary = BTreeMap::new();
    summary.insert("e0".into(), limit.total);
    Ok(SweepResult {
        kind: SweepKind::GammaConvergence,
        parameter: "eps".into(),
        target: Some(limit.total),
        points,
        fits,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode_identity_holds_for_the_closed_form() {
        assert!(ode_check(2001) < 1e-10);
        let c = PI.powf(-2.0 / 3.0);
        let r = ode_residual(
            |x| c * (0.5 * PI * x).cos() + 0.01 * (1.5 * PI * x).cos(),
            |x| -0.25 * PI * PI * c * (0.5 * PI * x).cos() - 0.01 * 2.25 * PI * PI * (1.5 * PI * x).cos(),
            2001,
        );
        assert!(r > 1e-2);
    }

    #[test]
    fn limit_profile_vanishes_at_the_ends() {
        assert!(limit_profile(1.0).abs() < 1e-30);
        assert!((limit_profile(0.0) - PI.powf(-4.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn csv_has_fixed_and_extra_columns() {
        let mut extra = BTreeMap::new();
        extra.insert("b".to_string(), 2.0);
        let s = SweepResult {
            kind: SweepKind::SmallVolume,
            parameter: "eps".into(),
            target: None,
            points: vec![SweepPoint {
                param: 0.1,
                dirichlet: 1.0,
                perimeter: 2.0,
                total: 3.0,
                gap: 0.0,
                extra,
                report: None,
            }],
            fits: vec![],
            summary: BTreeMap::new(),
        };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("param,dirichlet,perimeter,total,gap,b\n"));
    }
}
