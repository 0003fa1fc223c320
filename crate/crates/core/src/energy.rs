//! Scalar functionals of a droplet shape.
//!
//! | functional | total |
//! |---|---|
//! | `E`   | `∫|∇Θ|² + l` |
//! | `E_v` | `∫|∇Θ|² / √v + l / √A` |
//! | `E_ε` | `ε^{-2/3} ∫|∇Θ_ε|² + l(𝒯_ε Γ) / √(∫f)`, with `𝒯_ε f = ε^{2/3} f` |
//! | `E₀`  | `∫ f'²/f + 2a / √(∫f)` |
//! | `F`   | `l / √A` |
//!
//! Every report stores the two weighted parts, `dirichlet_term` and
//! `perimeter_term`, and `total` is their sum.

use serde::{Deserialize, Serialize};

use crate::field::{self, AngleField, ClipMargin, SolveOptions};
use crate::geometry::{Gamma0, GraphCurve, Grid, SpectralForm};
use crate::numerics::integrate;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionalId {
    #[serde(rename = "E")]
    E,
    #[serde(rename = "E_v")]
    Ev,
    #[serde(rename = "E_eps")]
    Eeps,
    #[serde(rename = "E0")]
    E0,
    #[serde(rename = "F")]
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionInfo {
    pub n_xi: usize,
    pub n_eta: usize,
    pub clip_margin: ClipMargin,
    pub iterations: usize,
    pub residual: f64,
}

impl ResolutionInfo {
    fn of(field: &AngleField) -> Self {
        let (n_xi, n_eta) = field.resolution();
        ResolutionInfo {
            n_xi,
            n_eta,
            clip_margin: field.clip_margin(),
            iterations: field.stats().iterations,
            residual: field.stats().residual,
        }
    }
}

/// One level of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n_xi: usize,
    pub n_eta: usize,
    pub value: f64,
}

/// Energies on three nested grids. Convergent discretizations shrink the
/// increments geometrically (ratio ≈ 1/4 at second order); a logarithmic
/// divergence keeps them constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceStudy {
    pub levels: Vec<Level>,
    /// Ratio of the last increment to the previous one.
    pub increment_ratio: f64,
    /// Finest over coarsest value.
    pub growth: f64,
    pub diverged: bool,
}

/// Increment ratio at or above which a refinement sequence counts as
/// non-convergent.
pub const DIVERGENCE_RATIO: f64 = 0.8;
/// Growth factor over the study that counts as divergence regardless of the
/// increment pattern.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

impl DivergenceStudy {
    pub fn from_levels(levels: Vec<Level>) -> Self {
        let v: Vec<f64> = levels.iter().map(|l| l.value).collect();
        let n = v.len();
        let (ratio, growth) = if n >= 3 {
            let d1 = v[n - 2] - v[n - 3];
            let d2 = v[n - 1] - v[n - 2];
            let ratio = if d1 != 0.0 { d2 / d1 } else { 0.0 };
            (ratio, v[n - 1] / v[0])
        } else {
            (0.0, 1.0)
        };
        let last_increment = if n >= 2 { (v[n - 1] - v[n - 2]).abs() } else { 0.0 };
        let significant = last_increment > 1e-6 * v[n - 1].abs().max(1e-300);
        let diverged = !v[n - 1].is_finite()
            || (significant && ratio >= DIVERGENCE_RATIO)
            || growth >= DIVERGENCE_GROWTH;
        DivergenceStudy {
            levels,
            increment_ratio: ratio,
            growth,
            diverged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub functional: FunctionalId,
    pub parameters: Parameters,
    /// `∫|∇Θ|²` on the evaluated domain (for `E₀`: `∫ f'²/f`).
    pub dirichlet: f64,
    /// `l(Γ)` of the evaluated curve.
    pub perimeter: f64,
    /// `|Ω_Γ|` of the evaluated curve.
    pub volume: f64,
    pub dirichlet_term: f64,
    pub perimeter_term: f64,
    pub total: f64,
    /// `F = l / √A`.
    pub shape_factor: f64,
    pub resolution: Option<ResolutionInfo>,
    pub divergence: Option<DivergenceStudy>,
    pub diverged: bool,
}

impl EnergyReport {
    fn assemble(
        functional: FunctionalId,
        parameters: Parameters,
        curve: &GraphCurve,
        dirichlet: DirichletPart,
        dirichlet_weight: f64,
        perimeter_term: f64,
    ) -> Self {
        let perimeter = curve.perimeter();
        let volume = curve.volume();
        let dirichlet_term = dirichlet_weight * dirichlet.value;
        let diverged = dirichlet.study.as_ref().is_some_and(|s| s.diverged);
        EnergyReport {
            functional,
            parameters,
            dirichlet: dirichlet.value,
            perimeter,
            volume,
            dirichlet_term,
            perimeter_term,
            total: dirichlet_term + perimeter_term,
            shape_factor: perimeter / volume.sqrt(),
            resolution: dirichlet.resolution,
            divergence: dirichlet.study,
            diverged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyOptions {
    pub solve: SolveOptions,
    /// Re-run on coarsened grids and flag non-convergence.
    pub divergence_check: bool,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions {
            solve: SolveOptions::default(),
            divergence_check: true,
        }
    }
}

impl EnergyOptions {
    pub fn with_solve(mut self, solve: SolveOptions) -> Self {
        self.solve = solve;
        self
    }
    pub fn without_divergence_check(mut self) -> Self {
        self.divergence_check = false;
        self
    }
}

struct DirichletPart {
    value: f64,
    resolution: Option<ResolutionInfo>,
    study: Option<DivergenceStudy>,
}

fn coarse_eta(n_eta: usize, step: usize) -> usize {
    if (n_eta - 1) % step == 0 {
        (n_eta - 1) / step + 1
    } else {
        (n_eta - 1) / step + 2
    }
}

/// Harmonic Dirichlet energy of `curve`, with an optional refinement study
/// over the sample grid coarsened by 4 and 2.
fn dirichlet_part(curve: &GraphCurve, opts: &EnergyOptions) -> Result<DirichletPart> {
    let field = field::solve_harmonic(curve, &opts.solve)?;
    let value = field.dirichlet_energy();
    let study = if opts.divergence_check {
        refinement_study(curve, &opts.solve, value)
    } else {
        None
    };
    Ok(DirichletPart {
        value,
        resolution: Some(ResolutionInfo::of(&field)),
        study,
    })
}

fn refinement_study(curve: &GraphCurve, solve: &SolveOptions, finest: f64) -> Option<DivergenceStudy> {
    let (min_x, min_eta) = field::MIN_RESOLUTION;
    let mut levels = Vec::new();
    for step in [4usize, 2] {
        let coarse = curve.coarsen(step)?;
        let n_eta = coarse_eta(solve.n_eta, step);
        if coarse.len() < min_x || n_eta < min_eta {
            return None;
        }
        let e = field::solve_harmonic(&coarse, &solve.with_n_eta(n_eta))
            .ok()?
            .dirichlet_energy();
        levels.push(Level {
            n_xi: coarse.len(),
            n_eta,
            value: e,
        });
    }
    levels.push(Level {
        n_xi: curve.len(),
        n_eta: solve.n_eta,
        value: finest,
    });
    Some(DivergenceStudy::from_levels(levels))
}

/// `E(Γ) = ∫|∇Θ|² + l(Γ)`. With `normalize = Some(v)` the curve is first
/// dilated to area `v`.
pub fn total_energy(curve: &GraphCurve, opts: &EnergyOptions, normalize: Option<f64>) -> Result<EnergyReport> {
    let curve = match normalize {
        Some(v) => curve.rescale_to_volume(v)?,
        None => curve.clone(),
    };
    let d = dirichlet_part(&curve, opts)?;
    let l = curve.perimeter();
    Ok(EnergyReport::assemble(
        FunctionalId::E,
        Parameters {
            v: normalize,
            eps: None,
        },
        &curve,
        d,
        1.0,
        l,
    ))
}

/// `E_v(Γ) = ∫|∇Θ|² / √v + l / √|Ω_Γ|`.
pub fn e_v(curve: &GraphCurve, v: f64, opts: &EnergyOptions) -> Result<EnergyReport> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("v must be positive, got {v}")));
    }
    let d = dirichlet_part(curve, opts)?;
    let f = curve.perimeter() / curve.volume().sqrt();
    Ok(EnergyReport::assemble(
        FunctionalId::Ev,
        Parameters {
            v: Some(v),
            eps: None,
        },
        curve,
        d,
        1.0 / v.sqrt(),
        f,
    ))
}

/// `F(Γ) = l / √|Ω_Γ|` (no field solve).
pub fn shape_factor(curve: &GraphCurve) -> EnergyReport {
    let d = DirichletPart {
        value: 0.0,
        resolution: None,
        study: None,
    };
    let f = curve.perimeter() / curve.volume().sqrt();
    EnergyReport::assemble(FunctionalId::F, Parameters::default(), curve, d, 0.0, f)
}

/// The vertically compressed curve `𝒯_ε Γ = {(x, ε^{2/3} f(x))}`.
pub fn compress(curve: &GraphCurve, eps: f64) -> GraphCurve {
    curve.scale_vertical(eps.powf(2.0 / 3.0))
}

/// `E_ε(f) = ε^{-2/3} ∫|∇Θ_{𝒯_ε Γ}|² + l(𝒯_ε Γ) / √(∫f)`.
pub fn e_eps(curve: &GraphCurve, eps: f64, opts: &EnergyOptions) -> Result<EnergyReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    let squeezed = compress(curve, eps);
    let d = dirichlet_part(&squeezed, opts)?;
    let perimeter_term = squeezed.perimeter() / curve.volume().sqrt();
    let mut r = EnergyReport::assemble(
        FunctionalId::Eeps,
        Parameters {
            v: None,
            eps: Some(eps),
        },
        &squeezed,
        d,
        eps.powf(-2.0 / 3.0),
        perimeter_term,
    );
    // report the uncompressed area, which the functional is normalized by
    r.volume = curve.volume();
    r.shape_factor = curve.perimeter() / r.volume.sqrt();
    Ok(r)
}

/// Quadratic-interpolant quadrature of sampled data: Simpson-type on pairs of
/// intervals (any spacing), with a trailing single interval integrated from
/// the quadratic through its last three samples.
pub fn quadratic_quadrature(xs: &[f64], ys: &[f64]) -> f64 {
    fn piece(x: [f64; 3], y: [f64; 3], lo: f64, hi: f64) -> f64 {
        let lagrange = |t: f64| {
            let l0 = (t - x[1]) * (t - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
            let l1 = (t - x[0]) * (t - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
            let l2 = (t - x[0]) * (t - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
            y[0] * l0 + y[1] * l1 + y[2] * l2
        };
        // 2-point Gauss is exact for quadratics
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let g = h / 3f64.sqrt();
        h * (lagrange(c - g) + lagrange(c + g))
    }
    let n = xs.len();
    if n < 3 {
        return crate::numerics::trapezoid(xs, ys);
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        total += piece(
            [xs[i], xs[i + 1], xs[i + 2]],
            [ys[i], ys[i + 1], ys[i + 2]],
            xs[i],
            xs[i + 2],
        );
        i += 2;
    }
    if i + 1 < n {
        total += piece(
            [xs[n - 3], xs[n - 2], xs[n - 1]],
            [ys[n - 3], ys[n - 2], ys[n - 1]],
            xs[n - 2],
            xs[n - 1],
        );
    }
    total
}

/// `∫ f'²/f` from samples. Endpoint values of the integrand are extrapolated
/// quadratically from the three nearest interior samples.
fn singular_quotient(curve: &GraphCurve) -> f64 {
    let (xs, fs, ds) = (curve.xs(), curve.fs(), curve.slopes());
    let n = xs.len();
    let mut q: Vec<f64> = (0..n)
        .map(|i| if fs[i] > 0.0 { ds[i] * ds[i] / fs[i] } else { 0.0 })
        .collect();
    let extrapolate = |x: [f64; 3], y: [f64; 3], t: f64| {
        let l0 = (t - x[1]) * (t - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
        let l1 = (t - x[0]) * (t - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
        let l2 = (t - x[0]) * (t - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
        y[0] * l0 + y[1] * l1 + y[2] * l2
    };
    if n >= 5 {
        q[0] = extrapolate([xs[1], xs[2], xs[3]], [q[1], q[2], q[3]], xs[0]);
        q[n - 1] = extrapolate(
            [xs[n - 4], xs[n - 3], xs[n - 2]],
            [q[n - 4], q[n - 3], q[n - 2]],
            xs[n - 1],
        );
    }
    quadratic_quadrature(xs, &q)
}

/// `E₀(f) = ∫ f'²/f + 2a / √(∫f)` (for `a = 1` the perimeter part is the
/// familiar `2/√(∫f)`).
///
/// With a spectral form the quotient is evaluated exactly as `4∫h'²`.
/// Otherwise it is integrated from samples, and a non-integrable quotient
/// (slope not vanishing where `f` does) is reported through the
/// divergence flag rather than as an error.
pub fn e0(curve: &GraphCurve) -> EnergyReport {
    if let Some(form) = curve.spectral() {
        return e0_spectral(form);
    }
    let a = curve.half_width();
    let volume = curve.volume();
    let value = singular_quotient(curve);
    let ds = curve.slopes();
    let n = ds.len();
    let slope_scale = curve.max_height() / a;
    let end_slope = ds[0].abs().max(ds[n - 1].abs());
    let endpoint_contact = !(end_slope <= 1e-4 * slope_scale);
    let mut levels = Vec::new();
    for step in [4usize, 2] {
        if let Some(c) = curve.coarsen(step) {
            levels.push(Level {
                n_xi: c.len(),
                n_eta: 0,
                value: singular_quotient(&c),
            });
        }
    }
    levels.push(Level {
        n_xi: curve.len(),
        n_eta: 0,
        value,
    });
    let grows = levels
        .windows(2)
        .all(|w| w[1].value >= 1.25 * w[0].value)
        && levels.len() == 3;
    let mut study = (levels.len() >= 2).then(|| DivergenceStudy::from_levels(levels));
    if let Some(s) = study.as_mut() {
        s.diverged |= endpoint_contact || grows;
    }
    let diverged = endpoint_contact || study.as_ref().is_some_and(|s| s.diverged);
    let perimeter_term = 2.0 * a / volume.sqrt();
    let perimeter = curve.perimeter();
    EnergyReport {
        functional: FunctionalId::E0,
        parameters: Parameters::default(),
        dirichlet: value,
        perimeter,
        volume,
        dirichlet_term: value,
        perimeter_term,
        total: value + perimeter_term,
        shape_factor: perimeter / volume.sqrt(),
        resolution: None,
        divergence: study,
        diverged,
    }
}

/// `E₀` of `f = h²` in closed form: `4 a Σ c_k² ω_k² + 2a / √(a Σ c_k²)`.
pub fn e0_spectral(form: &SpectralForm) -> EnergyReport {
    let a = form.a;
    let volume = form.area();
    let quotient = 4.0 * form.dh_energy();
    let perimeter_term = 2.0 * a / volume.sqrt();
    let perimeter = integrate(|x| form.slope(x).hypot(1.0), -a, a, 1e-12);
    EnergyReport {
        functional: FunctionalId::E0,
        parameters: Parameters::default(),
        dirichlet: quotient,
        perimeter,
        volume,
        dirichlet_term: quotient,
        perimeter_term,
        total: quotient + perimeter_term,
        shape_factor: perimeter / volume.sqrt(),
        resolution: None,
        divergence: None,
        diverged: false,
    }
}

/// Clipped energy as the clip floor shrinks, with the Richardson estimate
/// of the unclipped limit from the last three levels (assuming geometric
/// convergence).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipStudy {
    pub floors: Vec<f64>,
    pub margins: Vec<ClipMargin>,
    pub energies: Vec<f64>,
    pub extrapolated: Option<f64>,
}

pub fn clip_study(curve: &GraphCurve, solve: &SolveOptions, floors: &[f64]) -> Result<ClipStudy> {
    let mut margins = Vec::new();
    let mut energies = Vec::new();
    for &floor in floors {
        let f = field::solve_harmonic(curve, &solve.with_clip(field::Clip::Floor(floor)))?;
        margins.push(f.clip_margin());
        energies.push(f.dirichlet_energy());
    }
    let n = energies.len();
    let extrapolated = (n >= 3).then(|| {
        let (e0, e1, e2) = (energies[n - 3], energies[n - 2], energies[n - 1]);
        let d1 = e1 - e0;
        let d2 = e2 - e1;
        if (d1 - d2).abs() > 0.0 && d2 / d1 < 1.0 && d2 / d1 > 0.0 {
            e2 + d2 * d2 / (d1 - d2)
        } else {
            e2
        }
    });
    Ok(ClipStudy {
        floors: floors.to_vec(),
        margins,
        energies,
        extrapolated,
    })
}

/// The explicit configuration `Γ₀`: `f₀ = (cos x + 1)/(2π)` on `[-π, π]`
/// with the extension `Θ₀ = −η arcsin(sin x / 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub displayed_integral: DisplayedIntegral,
    pub grid_extension: GridExtension,
    /// Harmonic extension of the tangential data `arctan f₀'`.
    pub harmonic: EnergyReport,
    /// Dirichlet energy of the harmonic extension of the `arcsin` trace.
    pub harmonic_arcsin_dirichlet: f64,
    /// Dirichlet energy of `η arctan f₀'`.
    pub linear_extension_dirichlet: f64,
    /// `M = E(Γ₀)`, the energy upper bound for minimizers.
    pub upper_bound: f64,
    pub reference_value: f64,
    /// `displayed_integral.total − reference_value`.
    pub reference_deviation: f64,
}

/// Adaptive quadrature of the displayed one-dimensional energy integral of
/// `Θ₀` and its three terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplayedIntegral {
    /// `∫ √(1 + sin²x / 4π²)`.
    pub perimeter: f64,
    /// `∫ 2π |arcsin(sin x / 2π)|² / (cos x + 1)`.
    pub normal_part: f64,
    /// `∫ |cos x (cos x + 1)/√(4π² − sin²x) + arcsin(sin x/2π) sin x|² / (6π (cos x + 1))`.
    pub tangential_part: f64,
    pub total: f64,
    /// Difference between evaluations at tolerances 1e-10 and 1e-13.
    pub self_consistency: f64,
}

/// Two-dimensional quadrature of `|∇Θ₀|²` on the solver grid, plus perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridExtension {
    pub n_xi: usize,
    pub n_eta: usize,
    pub dirichlet: f64,
    pub perimeter: f64,
    pub total: f64,
    /// `|total − displayed total| / displayed total`.
    pub relative_difference: f64,
}

/// The literature value quoted for `E(Γ₀)`.
pub const GAMMA0_REFERENCE: f64 = 12.65;

fn displayed_terms(tol: f64) -> [f64; 3] {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    // 1 + cos x = 2 cos²(x/2), evaluated without cancellation near ±π
    let one_plus_cos = |x: f64| 2.0 * (0.5 * x).cos().powi(2);
    let perimeter = integrate(|x| (1.0 + (x.sin() / two_pi).powi(2)).sqrt(), -PI, PI, tol);
    let normal = integrate(
        |x| two_pi * (x.sin() / two_pi).asin().powi(2) / one_plus_cos(x),
        -PI,
        PI,
        tol,
    );
    let tangential = integrate(
        |x| {
            let s = x.sin();
            let inner = x.cos() * one_plus_cos(x) / (two_pi * two_pi - s * s).sqrt()
                + (s / two_pi).asin() * s;
            inner * inner / (6.0 * PI * one_plus_cos(x))
        },
        -PI,
        PI,
        tol,
    );
    [perimeter, normal, tangential]
}

/// Evaluates `Γ₀` three ways: the displayed integral by adaptive quadrature,
/// the grid energy of `Θ₀`, and the harmonic energy of the tangential data.
pub fn baseline_gamma0(n_xi: usize, solve: &SolveOptions) -> Result<BaselineReport> {
    let [p, n, t] = displayed_terms(1e-13);
    let coarse = displayed_terms(1e-10);
    let total = p + n + t;
    let displayed = DisplayedIntegral {
        perimeter: p,
        normal_part: n,
        tangential_part: t,
        total,
        self_consistency: (coarse.iter().sum::<f64>() - total).abs(),
    };

    let curve = GraphCurve::sample(&Gamma0, n_xi, Grid::Uniform)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let theta0 = AngleField::eta_linear_with_trace(&curve, solve.n_eta, |x| {
        -(x.sin() / two_pi).asin()
    })?;
    let grid_dirichlet = theta0.dirichlet_energy();
    let perimeter = curve.perimeter();
    let grid_total = grid_dirichlet + perimeter;
    let grid_extension = GridExtension {
        n_xi,
        n_eta: solve.n_eta,
        dirichlet: grid_dirichlet,
        perimeter,
        total: grid_total,
        relative_difference: (grid_total - total).abs() / total,
    };

    let opts = EnergyOptions {
        solve: *solve,
        divergence_check: false,
    };
    let harmonic = total_energy(&curve, &opts, None)?;
    let arcsin = field::solve_harmonic_with_trace(&curve, solve, |x| -(x.sin() / two_pi).asin())?;
    let linear = AngleField::linear_extension(&curve, solve)?;
    Ok(BaselineReport {
        displayed_integral: displayed,
        grid_extension,
        upper_bound: harmonic.total,
        harmonic,
        harmonic_arcsin_dirichlet: arcsin.dirichlet_energy(),
        linear_extension_dirichlet: linear.dirichlet_energy(),
        reference_value: GAMMA0_REFERENCE,
        reference_deviation: total - GAMMA0_REFERENCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CosineBump;

    #[test]
    fn quadratic_quadrature_is_exact_for_quadratics() {
        let xs = [0.0, 0.1, 0.35, 0.5, 0.9, 1.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + x - 3.0 * x * x).collect();
        let exact = 1.0 + 0.5 - 1.0;
        assert!((quadratic_quadrature(&xs, &ys) - exact).abs() < 1e-14);
    }

    #[test]
    fn e0_of_unit_bump_from_samples() {
        let c = GraphCurve::sample(&CosineBump::unit(), 513, Grid::Uniform).unwrap();
        let r = e0(&c);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((r.dirichlet - pi2).abs() < 1e-8, "{}", r.dirichlet - pi2);
        assert!(!r.diverged);
    }

    #[test]
    fn total_is_sum_of_terms() {
        let c = GraphCurve::sample(&CosineBump::unit(), 65, Grid::Uniform).unwrap();
        let opts = EnergyOptions::default()
            .with_solve(SolveOptions::default().with_n_eta(17))
            .without_divergence_check();
        let r = e_v(&c, 4.0, &opts).unwrap();
        assert_eq!(r.total, r.dirichlet_term + r.perimeter_term);
        assert_eq!(r.dirichlet_term, r.dirichlet / 2.0);
    }

    #[test]
    fn divergence_rule() {
        let lv = |v: f64| Level {
            n_xi: 0,
            n_eta: 0,
            value: v,
        };
        let log = DivergenceStudy::from_levels(vec![lv(1.0), lv(1.5), lv(2.0)]);
        assert!(log.diverged);
        let conv = DivergenceStudy::from_levels(vec![lv(1.0), lv(1.04), lv(1.05)]);
        assert!(!conv.diverged);
    }
}
