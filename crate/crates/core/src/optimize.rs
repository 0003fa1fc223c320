//! Shape optimization over the half-integer cosine family `f = h²`.
//!
//! Shape derivatives use the boundary form of the first variation. For a
//! vertical boundary velocity `V = (0, g)` with `g(±a) = 0`:
//!
//! ```text
//! dl = ∫ f'g' / √(1+f'²) dx
//! dD = ∫ { 2 Θ_ν g'/√(1+f'²) − 2 Θ_ν Θ_y g √(1+f'²) + g |∇Θ|² } dx
//! dA = ∫ g dx
//! ```
//!
//! The factor 2 on the middle term comes from the material derivative of
//! the boundary data, `Θ' = g'/(1+f'²) − g Θ_y`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{compress, e0, quadratic_quadrature};
use crate::field::{self, AngleField, Clip, SolveOptions};
use crate::geometry::{GraphCurve, Grid, SpectralForm};
use crate::numerics::derivative;
use crate::{Error, Result};

/// Objective functionals accepted by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Functional {
    /// `E(Γ) = ∫|∇Θ|² + l(Γ)` on the curve dilated to area `v`; equal to
    /// `∫|∇Θ|² + √v l/√A` on any dilate.
    ProblemP { v: f64 },
    /// `E_v(Γ) = ∫|∇Θ|²/√v + l/√A`.
    Ev { v: f64 },
    /// `E_ε(f) = ε^{-2/3} ∫|∇Θ_{𝒯_ε Γ}|² + l(𝒯_ε Γ)/√(∫f)`.
    Eps { eps: f64 },
    /// `E₀(f) = ∫ f'²/f + 2a/√(∫f)`.
    E0,
}

impl Functional {
    fn validate(&self) -> Result<()> {
        match *self {
            Functional::ProblemP { v } | Functional::Ev { v } if !(v > 0.0) => {
                Err(Error::Domain(format!("v must be positive, got {v}")))
            }
            Functional::Eps { eps } if !(eps > 0.0 && eps <= 1.0) => {
                Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")))
            }
            _ => Ok(()),
        }
    }

    /// Area the iterates are dilated to before evaluation, if any.
    pub fn normalization(&self) -> Option<f64> {
        match *self {
            Functional::ProblemP { v } | Functional::Ev { v } => Some(v),
            _ => None,
        }
    }
}

/// Coefficients of `h(x) = Σ c_k cos((k+½)πx/a)`; the shape is `f = h²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub a: f64,
    pub coefficients: Vec<f64>,
}

impl ShapeParams {
    pub fn new(a: f64, coefficients: Vec<f64>) -> Self {
        ShapeParams { a, coefficients }
    }

    /// `K` modes with only the leading one set: `f = c₀² cos²(πx/2a)`.
    pub fn cosine(k: usize, c0: f64) -> Self {
        let mut c = vec![0.0; k.max(1)];
        c[0] = c0;
        ShapeParams::new(1.0, c)
    }

    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    pub fn form(&self) -> SpectralForm {
        SpectralForm::new(self.a, self.coefficients.clone())
    }

    pub fn curve(&self, n: usize, grid: Grid) -> Result<GraphCurve> {
        GraphCurve::from_spectral(self.form(), n, grid)
    }

    /// `∂f/∂c_k = 2h cos(ω_k x)` and its derivative, sampled at `xs`.
    pub fn direction(&self, k: usize, xs: &[f64]) -> Direction {
        let form = self.form();
        let w = form.frequency(k);
        let (g, dg) = xs
            .iter()
            .map(|&x| {
                let (h, dh) = (form.h(x), form.dh(x));
                let (c, s) = ((w * x).cos(), (w * x).sin());
                (2.0 * h * c, 2.0 * (dh * c - h * w * s))
            })
            .unzip();
        Direction { g, dg }
    }
}

/// Perturbation `g` and `g'` sampled on a curve's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
}

impl Direction {
    pub fn from_fn(xs: &[f64], g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64) -> Self {
        Direction {
            g: xs.iter().map(|&x| g(x)).collect(),
            dg: xs.iter().map(|&x| dg(x)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Direction {
            g: vec![0.0; n],
            dg: vec![0.0; n],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Direction {
            g: self.g.iter().map(|v| v * s).collect(),
            dg: self.dg.iter().map(|v| v * s).collect(),
        }
    }
}

/// `f + t g` with slopes `f' + t g'`.
pub fn perturb(curve: &GraphCurve, dir: &Direction, t: f64) -> Result<GraphCurve> {
    let n = curve.len();
    let mut fs: Vec<f64> = curve.fs().iter().zip(&dir.g).map(|(f, g)| f + t * g).collect();
    fs[0] = 0.0;
    fs[n - 1] = 0.0;
    let slopes = curve
        .slopes()
        .iter()
        .zip(&dir.dg)
        .map(|(d, g)| d + t * g)
        .collect();
    GraphCurve::from_samples_with_slopes(curve.xs().to_vec(), fs, slopes)
}

/// Evaluation of a functional on one curve, with the field it used.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    /// Area of the curve the functional was normalized to (or of the curve
    /// itself).
    pub volume: f64,
    pub dirichlet: f64,
    pub perimeter: f64,
    field: Option<AngleField>,
    area: f64,
    curve: GraphCurve,
}

/// Evaluates `functional` on `curve` (no divergence study).
pub fn evaluate(curve: &GraphCurve, functional: Functional, solve: &SolveOptions) -> Result<Evaluation> {
    functional.validate()?;
    let area = curve.volume();
    match functional {
        Functional::ProblemP { v } | Functional::Ev { v } => {
            let f = field::solve_harmonic(curve, solve)?;
            let d = f.dirichlet_energy();
            let l = curve.perimeter();
            let shape = l / area.sqrt();
            let normalized = curve.rescale_to_volume(v)?;
            let value = match functional {
                Functional::ProblemP { .. } => d + v.sqrt() * shape,
                _ => d / v.sqrt() + shape,
            };
            Ok(Evaluation {
                value,
                volume: normalized.volume(),
                dirichlet: d,
                perimeter: l,
                field: Some(f),
                area,
                curve: curve.clone(),
            })
        }
        Functional::Eps { eps } => {
            let squeezed = compress(curve, eps);
            let f = field::solve_harmonic(&squeezed, solve)?;
            let d = f.dirichlet_energy();
            let l = squeezed.perimeter();
            Ok(Evaluation {
                value: eps.powf(-2.0 / 3.0) * d + l / area.sqrt(),
                volume: area,
                dirichlet: d,
                perimeter: l,
                field: Some(f),
                area,
                curve: curve.clone(),
            })
        }
        Functional::E0 => {
            let r = e0(curve);
            Ok(Evaluation {
                value: r.total,
                volume: area,
                dirichlet: r.dirichlet,
                perimeter: r.perimeter,
                field: None,
                area,
                curve: curve.clone(),
            })
        }
    }
}

/// Boundary-form derivatives of the three shape quantities along one
/// direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub dirichlet: f64,
    pub perimeter: f64,
    pub volume: f64,
}

/// Per-column boundary quantities of a solved field.
struct BoundaryData {
    xs: Vec<f64>,
    slopes: Vec<f64>,
    normal: Vec<f64>,
    theta_y: Vec<f64>,
    grad_sq: Vec<f64>,
    valid: Vec<bool>,
    free: Vec<bool>,
}

fn boundary_data(field: &AngleField) -> Result<BoundaryData> {
    let t = field.dtn_trace()?;
    Ok(BoundaryData {
        grad_sq: t.grad_sq(),
        xs: t.xs,
        slopes: field.curve().slopes().to_vec(),
        normal: t.normal,
        theta_y: t.theta_y,
        valid: t.valid,
        free: t.free,
    })
}

/// Replaces invalid entries by quadratic extrapolation from the nearest
/// three valid neighbours on the interior side.
fn fill_invalid(xs: &[f64], ys: &mut [f64], valid: &[bool]) {
    let n = xs.len();
    let valid_idx: Vec<usize> = (0..n).filter(|&i| valid[i] && ys[i].is_finite()).collect();
    if valid_idx.len() < 3 {
        for y in ys.iter_mut() {
            if !y.is_finite() {
                *y = 0.0;
            }
        }
        return;
    }
    for i in 0..n {
        if valid[i] && ys[i].is_finite() {
            continue;
        }
        let pos = valid_idx.partition_point(|&j| j < i);
        let start = pos.saturating_sub(1).min(valid_idx.len() - 3);
        let start = if pos == 0 { 0 } else if pos >= valid_idx.len() { valid_idx.len() - 3 } else { start };
        let idx = [valid_idx[start], valid_idx[start + 1], valid_idx[start + 2]];
        let x = idx.map(|j| xs[j]);
        let y = idx.map(|j| ys[j]);
        let t = xs[i];
        let l0 = (t - x[1]) * (t - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
        let l1 = (t - x[0]) * (t - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
        let l2 = (t - x[0]) * (t - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
        ys[i] = y[0] * l0 + y[1] * l1 + y[2] * l2;
    }
}

fn rates_from(b: &BoundaryData, dir: &Direction) -> Rates {
    let n = b.xs.len();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n];
    for i in 0..n {
        let s = b.slopes[i];
        let w = s.hypot(1.0);
        d[i] = 2.0 * b.normal[i] * dir.dg[i] / w - 2.0 * b.normal[i] * b.theta_y[i] * dir.g[i] * w
            + dir.g[i] * b.grad_sq[i];
        l[i] = if s.is_finite() { s * dir.dg[i] / w } else { f64::NAN };
    }
    let slope_ok: Vec<bool> = b.slopes.iter().map(|s| s.is_finite()).collect();
    fill_invalid(&b.xs, &mut d, &b.valid);
    fill_invalid(&b.xs, &mut l, &slope_ok);
    Rates {
        dirichlet: quadratic_quadrature(&b.xs, &d),
        perimeter: quadratic_quadrature(&b.xs, &l),
        volume: quadratic_quadrature(&b.xs, &dir.g),
    }
}

/// Boundary-form rates of `∫|∇Θ|²`, `l` and `A` along each direction.
pub fn boundary_rates(field: &AngleField, dirs: &[Direction]) -> Result<Vec<Rates>> {
    let b = boundary_data(field)?;
    Ok(dirs.par_iter().map(|d| rates_from(&b, d)).collect())
}

/// Shape gradient of a functional along a set of directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    /// `d/dt J(f + t g)` for each direction.
    pub rates: Vec<f64>,
    pub components: Vec<Rates>,
    /// Multiplier of the area constraint implied by the normalization
    /// (0 for functionals without one).
    pub lambda: f64,
    /// Green-identity defect of the field the traces came from.
    pub green_defect: f64,
    /// Set when the Green-identity defect exceeds 10%.
    pub low_accuracy: bool,
}

/// Threshold on the Green-identity defect above which gradients are
/// flagged as low accuracy.
pub const GREEN_WARNING: f64 = 0.1;

/// Combines boundary rates into the rate of `functional`. The area
/// constraint enters through `−λ dA` with `λ` from the normalization.
fn combine(functional: Functional, eval: &Evaluation, r: &Rates) -> (f64, f64) {
    let a = eval.area;
    match functional {
        Functional::ProblemP { v } => {
            let s = v.sqrt();
            let lambda = s * eval.perimeter / (2.0 * a.powf(1.5));
            (r.dirichlet + s * r.perimeter / a.sqrt() - lambda * r.volume, lambda)
        }
        Functional::Ev { v } => {
            let lambda = eval.perimeter / (2.0 * a.powf(1.5));
            (r.dirichlet / v.sqrt() + r.perimeter / a.sqrt() - lambda * r.volume, lambda)
        }
        Functional::Eps { .. } => {
            let lambda = eval.perimeter / (2.0 * a.powf(1.5));
            (r.dirichlet + r.perimeter / a.sqrt() - lambda * r.volume, lambda)
        }
        Functional::E0 => (f64::NAN, 0.0),
    }
}

fn multiplier(functional: Functional, eval: &Evaluation) -> f64 {
    match functional {
        Functional::E0 => eval.area.powf(-1.5),
        f => combine(f, eval, &Rates { dirichlet: 0.0, perimeter: 0.0, volume: 0.0 }).1,
    }
}

fn gradient_from(
    functional: Functional,
    eval: &Evaluation,
    dirs: &[Direction],
) -> Result<GradientReport> {
    let field = eval
        .field
        .as_ref()
        .ok_or_else(|| Error::Domain("functional has no field".into()))?;
    let dirs_on_field: Vec<Direction> = match functional {
        // directions act on f; the field lives on ε^{2/3} f
        Functional::Eps { eps } => dirs.iter().map(|d| d.scaled(eps.powf(2.0 / 3.0))).collect(),
        _ => dirs.to_vec(),
    };
    let components = boundary_rates(field, &dirs_on_field)?;
    let zero = Rates { dirichlet: 0.0, perimeter: 0.0, volume: 0.0 };
    let lambda = combine(functional, eval, &zero).1;
    let rates = components
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut r = *r;
            if let Functional::Eps { eps } = functional {
                // perimeter and Dirichlet rates are on the compressed curve;
                // the area rate is on f itself
                r.volume = quadratic_quadrature(field.curve().xs(), &dirs[k].g);
                r.dirichlet *= eps.powf(-2.0 / 3.0);
            }
            combine(functional, eval, &r).0
        })
        .collect();
    let green = field.green_identity()?.defect;
    Ok(GradientReport {
        rates,
        components,
        lambda,
        green_defect: green,
        low_accuracy: !(green <= GREEN_WARNING),
    })
}

/// `d/dt J(f + t g)` at `t = 0` from the boundary form, for each direction.
/// Not available for `E₀` (use [`e0_gradient`]).
pub fn shape_gradient(
    curve: &GraphCurve,
    functional: Functional,
    dirs: &[Direction],
    solve: &SolveOptions,
) -> Result<GradientReport> {
    if functional == Functional::E0 {
        return Err(Error::Domain("E0 has a closed-form gradient; use e0_gradient".into()));
    }
    let eval = evaluate(curve, functional, solve)?;
    gradient_from(functional, &eval, dirs)
}

/// Symmetric difference `(J(f+tg) − J(f−tg)) / 2t` of the discrete
/// functional.
pub fn finite_difference(
    curve: &GraphCurve,
    functional: Functional,
    dir: &Direction,
    t: f64,
    solve: &SolveOptions,
) -> Result<f64> {
    let plus = evaluate(&perturb(curve, dir, t)?, functional, solve)?.value;
    let minus = evaluate(&perturb(curve, dir, -t)?, functional, solve)?.value;
    Ok((plus - minus) / (2.0 * t))
}

/// Value of `functional` on `curve` with the Dirichlet part taken from
/// `field` with frozen interior values.
fn frozen_value(functional: Functional, field: &AngleField, curve: &GraphCurve) -> Result<f64> {
    let area = curve.volume();
    match functional {
        Functional::ProblemP { v } => {
            Ok(field.frozen_energy(curve)? + v.sqrt() * curve.perimeter() / area.sqrt())
        }
        Functional::Ev { v } => Ok(field.frozen_energy(curve)? / v.sqrt() + curve.perimeter() / area.sqrt()),
        Functional::Eps { eps } => {
            let squeezed = compress(curve, eps);
            Ok(eps.powf(-2.0 / 3.0) * field.frozen_energy(&squeezed)? + squeezed.perimeter() / area.sqrt())
        }
        Functional::E0 => Ok(e0(curve).total),
    }
}

/// Step used for the frozen-field differences, relative to `max |g|` and
/// the curve height.
const FROZEN_STEP: f64 = 1e-5;

/// Derivative of the discrete functional along each direction, using the
/// stationarity of the solved field: the interior values are frozen and
/// only the geometry and boundary data move, so no further solves are
/// needed. Accurate to the solver tolerance and `O(t²)` in the step.
pub fn discrete_gradient(
    curve: &GraphCurve,
    functional: Functional,
    dirs: &[Direction],
    solve: &SolveOptions,
) -> Result<Vec<f64>> {
    let eval = evaluate(curve, functional, solve)?;
    discrete_gradient_from(functional, &eval, dirs)
}

fn discrete_gradient_from(functional: Functional, eval: &Evaluation, dirs: &[Direction]) -> Result<Vec<f64>> {
    let curve = &eval.curve;
    let Some(field) = eval.field.as_ref() else {
        return Err(Error::Domain("functional has no field".into()));
    };
    dirs.par_iter()
        .map(|d| {
            let gmax = d.g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax == 0.0 {
                return Ok(0.0);
            }
            let t = FROZEN_STEP * curve.max_height() / gmax;
            let plus = frozen_value(functional, field, &perturb(curve, d, t)?)?;
            let minus = frozen_value(functional, field, &perturb(curve, d, -t)?)?;
            Ok((plus - minus) / (2.0 * t))
        })
        .collect()
}

/// `E₀` in coefficient space and its exact gradient.
pub fn e0_value_and_gradient(params: &ShapeParams) -> (f64, Vec<f64>) {
    let form = params.form();
    let a = form.a;
    let area = form.area();
    let value = 4.0 * form.dh_energy() + 2.0 * a / area.sqrt();
    let grad = params
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let w = form.frequency(k);
            8.0 * a * c * w * w - 2.0 * a * a * c / area.powf(1.5)
        })
        .collect();
    (value, grad)
}

/// Gradient of `E₀` with respect to the coefficients.
pub fn e0_gradient(params: &ShapeParams) -> Vec<f64> {
    e0_value_and_gradient(params).1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub functional: Functional,
    /// Truncation order `K`.
    pub k: usize,
    /// Finest field grid `(n_ξ, n_η)`; coarser levels are derived from it.
    pub grid: (usize, usize),
    /// Number of grid levels (each halves the previous resolution).
    pub levels: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub solver_tol: f64,
    /// Fixed clip margin per level, keeping the discrete functional smooth
    /// in the coefficients. `None` uses the height floor.
    pub clip_margin: Option<usize>,
    pub seed: u64,
    /// Write the current curve as `checkpoint_NNNNN.csv` into `dir` every
    /// `every` iterations.
    #[serde(default)]
    pub checkpoint: Option<Checkpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub every: usize,
    pub dir: std::path::PathBuf,
}

impl Checkpoint {
    fn write(&self, iteration: usize, x: &[f64], n: usize) -> Result<()> {
        if self.every == 0 || iteration % self.every != 0 {
            return Ok(());
        }
        std::fs::create_dir_all(&self.dir)?;
        let curve = ShapeParams::new(1.0, x.to_vec()).curve(n, Grid::Uniform)?;
        let file = std::fs::File::create(self.dir.join(format!("checkpoint_{iteration:05}.csv")))?;
        crate::geometry::io::write_csv(&curve, std::io::BufWriter::new(file))
    }
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            functional: Functional::ProblemP { v: 1.0 },
            k: 16,
            grid: (513, 129),
            levels: 2,
            tol: 1e-5,
            max_iter: 200,
            solver_tol: 1e-10,
            clip_margin: None,
            seed: 0,
            checkpoint: None,
        }
    }
}

impl OptimConfig {
    fn level_grids(&self) -> Vec<(usize, usize)> {
        let mut out = vec![self.grid];
        for _ in 1..self.levels.max(1) {
            let (nx, ne) = *out.last().unwrap();
            let next = ((nx - 1) / 2 + 1, (ne - 1) / 2 + 1);
            if next.0 < field::MIN_RESOLUTION.0 || next.1 < field::MIN_RESOLUTION.1 {
                break;
            }
            out.push(next);
        }
        out.reverse();
        out
    }

    fn solve_options(&self, n_eta: usize, n_xi: usize) -> SolveOptions {
        let clip = match self.clip_margin {
            Some(m) => Clip::Margin((m * (n_xi - 1)).div_ceil(self.grid.0 - 1).max(1)),
            None => Clip::default(),
        };
        SolveOptions {
            n_eta,
            tol: self.solver_tol,
            clip,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub level: usize,
    pub energy: f64,
    pub gradient_norm: f64,
    pub volume: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub params: ShapeParams,
    pub functional: Functional,
    pub energy_trace: Vec<f64>,
    pub gradient_norm_trace: Vec<f64>,
    pub volume_trace: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    pub energy: f64,
    pub gradient_norm: f64,
    /// Area-constraint multiplier at the final iterate.
    pub lambda: f64,
    pub el_residual: Option<ElResidual>,
    pub converged: bool,
    /// Line search failed to find a decrease.
    pub stagnated: bool,
    pub iterations: usize,
    pub low_accuracy: bool,
}

struct Objective<'a> {
    config: &'a OptimConfig,
    n_xi: usize,
    solve: SolveOptions,
}

struct Point {
    x: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    volume: f64,
    lambda: f64,
    low_accuracy: bool,
}

impl Objective<'_> {
    fn value(&self, x: &[f64]) -> Result<(f64, Option<Evaluation>)> {
        let params = ShapeParams::new(1.0, x.to_vec());
        match self.config.functional {
            Functional::E0 => Ok((e0_value_and_gradient(&params).0, None)),
            f => {
                let curve = params.curve(self.n_xi, Grid::Uniform)?;
                let e = evaluate(&curve, f, &self.solve)?;
                Ok((e.value, Some(e)))
            }
        }
    }

    fn point(&self, x: Vec<f64>, value: f64, eval: Option<Evaluation>) -> Result<Point> {
        let params = ShapeParams::new(1.0, x.clone());
        match (self.config.functional, eval) {
            (Functional::E0, _) | (_, None) => {
                let (_, grad) = e0_value_and_gradient(&params);
                Ok(Point {
                    volume: params.form().area(),
                    x,
                    value,
                    grad,
                    lambda: params.form().area().powf(-1.5),
                    low_accuracy: false,
                })
            }
            (f, Some(e)) => {
                let xs = e.field.as_ref().unwrap().curve().xs().to_vec();
                let dirs: Vec<Direction> = (0..params.k()).map(|k| params.direction(k, &xs)).collect();
                let grad = discrete_gradient_from(f, &e, &dirs)?;
                let green = e.field.as_ref().unwrap().green_identity()?.defect;
                Ok(Point {
                    volume: e.volume,
                    x,
                    value,
                    grad,
                    lambda: multiplier(f, &e),
                    low_accuracy: !(green <= GREEN_WARNING),
                })
            }
        }
    }

    fn at(&self, x: Vec<f64>) -> Result<Point> {
        let (v, e) = self.value(&x)?;
        self.point(x, v, e)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS in coefficient space with Armijo backtracking (`c = 1e-4`, step
/// halving, at most 40 halvings). Stops once `‖∇J‖ ≤ tol`.
/// Field functionals are differentiated exactly at the discrete level (see
/// [`discrete_gradient`]). Field functionals run on a sequence of
/// grids; the next grid is entered once the gradient norm falls below
/// `10 · tol` or the line search stalls.
pub fn minimize(start: &ShapeParams, config: &OptimConfig) -> Result<OptimResult> {
    config.functional.validate()?;
    if start.a != 1.0 {
        return Err(Error::Domain("the optimizer works on [-1, 1] (a = 1)".into()));
    }
    if !(config.tol > 0.0) || config.k == 0 {
        return Err(Error::Domain("tol must be positive and K at least 1".into()));
    }
    let mut x0 = start.coefficients.clone();
    x0.resize(config.k, 0.0);
    let grids = if config.functional == Functional::E0 {
        vec![config.grid]
    } else {
        config.level_grids()
    };
    let mut trace = Vec::new();
    let mut iteration = 0usize;
    let mut current: Option<Point> = None;
    let mut stagnated = false;
    let mut converged = false;
    let n = config.k;
    for (level, &(n_xi, n_eta)) in grids.iter().enumerate() {
        let last_level = level + 1 == grids.len();
        let obj = Objective {
            config,
            n_xi,
            solve: config.solve_options(n_eta, n_xi),
        };
        let mut p = obj.at(current.take().map(|p| p.x).unwrap_or_else(|| x0.clone()))?;
        let level_tol = if last_level { config.tol } else { 10.0 * config.tol };
        // the curvature in mode k grows like ω_k², so the initial inverse
        // Hessian is diag(ω₀²/ω_k²)
        let precond: Vec<f64> = (0..n).map(|k| ((2 * k + 1) as f64).powi(-2)).collect();
        let reset = |h: &mut Vec<Vec<f64>>, scale: f64| {
            *h = vec![vec![0.0; n]; n];
            for (i, row) in h.iter_mut().enumerate() {
                row[i] = scale * precond[i];
            }
        };
        let mut h = Vec::new();
        reset(&mut h, 1.0);
        let mut first = true;
        stagnated = false;
        trace.push(IterationRecord {
            iteration,
            level,
            energy: p.value,
            gradient_norm: norm(&p.grad),
            volume: p.volume,
            step: 0.0,
        });
        loop {
            let gnorm = norm(&p.grad);
            if gnorm <= level_tol {
                converged = last_level;
                break;
            }
            if iteration >= config.max_iter {
                break;
            }
            let mut dir: Vec<f64> = (0..n).map(|i| -dot(&h[i], &p.grad)).collect();
            let mut slope = dot(&dir, &p.grad);
            if !(slope < 0.0) {
                reset(&mut h, 1.0);
                dir = (0..n).map(|i| -precond[i] * p.grad[i]).collect();
                slope = dot(&dir, &p.grad);
            }
            // keep trial steps within a fraction of the current shape size
            let limit = 0.5 * norm(&p.x) / norm(&dir);
            let mut t = if first { limit.min(1.0 / gnorm.max(1e-300)).min(1.0) } else { limit.min(1.0) };
            let mut accepted = None;
            for _ in 0..=40 {
                let trial: Vec<f64> = p.x.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
                if let Ok((v, e)) = obj.value(&trial) {
                    if v <= p.value + 1e-4 * t * slope && v < p.value {
                        accepted = Some((trial, v, e));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((xn, vn, en)) = accepted else {
                stagnated = true;
                break;
            };
            let next = obj.point(xn, vn, en)?;
            iteration += 1;
            let s: Vec<f64> = next.x.iter().zip(&p.x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = next.grad.iter().zip(&p.grad).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * norm(&s) * norm(&y) {
                if first {
                    let yd: f64 = (0..n).map(|i| y[i] * y[i] * precond[i]).sum();
                    reset(&mut h, sy / yd);
                }
                let hy: Vec<f64> = (0..n).map(|i| dot(&h[i], &y)).collect();
                let yhy = dot(&y, &hy);
                let rho = 1.0 / sy;
                for i in 0..n {
                    for j in 0..n {
                        h[i][j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                    }
                }
                first = false;
            }
            trace.push(IterationRecord {
                iteration,
                level,
                energy: next.value,
                gradient_norm: norm(&next.grad),
                volume: next.volume,
                step: t,
            });
            p = next;
            if let Some(c) = &config.checkpoint {
                c.write(iteration, &p.x, n_xi)?;
            }
        }
        current = Some(p);
        if iteration >= config.max_iter {
            break;
        }
    }
    let p = current.expect("at least one level");
    let params = ShapeParams::new(1.0, p.x.clone());
    Ok(OptimResult {
        functional: config.functional,
        energy_trace: trace.iter().map(|r| r.energy).collect(),
        gradient_norm_trace: trace.iter().map(|r| r.gradient_norm).collect(),
        volume_trace: trace.iter().map(|r| r.volume).collect(),
        trace,
        energy: p.value,
        gradient_norm: norm(&p.grad),
        lambda: p.lambda,
        el_residual: None,
        converged,
        stagnated,
        iterations: iteration,
        low_accuracy: p.low_accuracy,
        params,
    })
}

/// Relative height below which columns are left out of residual
/// assessments; the residual involves derivatives of `f'/f`, whose
/// discretization error grows like `f⁻²` toward the tips.
pub const RESIDUAL_FLOOR: f64 = 1e-2;

/// Pointwise Euler-Lagrange residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    /// Mean of `R(x)` over the assessed interval.
    pub lambda_estimate: f64,
    /// L² deviation of `R` from its mean, over `|λ| + mean |R|`.
    pub residual_norm: f64,
    pub xs: Vec<f64>,
    pub profile: Vec<f64>,
}

fn summarize(xs: Vec<f64>, r: Vec<f64>) -> Result<ElResidual> {
    if xs.len() < 3 {
        return Err(Error::DegenerateDomain("too few columns to assess the residual".into()));
    }
    let width = xs[xs.len() - 1] - xs[0];
    let mean = crate::numerics::trapezoid(&xs, &r) / width;
    let dev: Vec<f64> = r.iter().map(|v| (v - mean).powi(2)).collect();
    let abs: Vec<f64> = r.iter().map(|v| v.abs()).collect();
    let l2 = (crate::numerics::trapezoid(&xs, &dev) / width).sqrt();
    let mean_abs = crate::numerics::trapezoid(&xs, &abs) / width;
    Ok(ElResidual {
        lambda_estimate: mean,
        residual_norm: l2 / (mean.abs() + mean_abs),
        xs,
        profile: r,
    })
}

/// Euler-Lagrange residual of `functional` at `curve`.
///
/// For the field functionals the curve is first brought to the
/// functional's normalization and
/// `R = −(f'/w)' − 2 (Θ_ν/w)' − 2 Θ_ν Θ_y w + |∇Θ|²` (`w = √(1+f'²)`) is
/// evaluated on the unclipped columns; at a constrained critical point `R`
/// is the constant `λ`. For `E₀`, `R = −2 (f'/f)' − (f'/f)²`, which equals
/// `(∫f)^{-3/2}` at critical points; columns with `f < RESIDUAL_FLOOR · max f`
/// are excluded in both cases.
pub fn el_residual(curve: &GraphCurve, functional: Functional, solve: &SolveOptions) -> Result<ElResidual> {
    functional.validate()?;
    match functional {
        Functional::E0 => {
            let (xs, fs, ds) = (curve.xs(), curve.fs(), curve.slopes());
            let floor = RESIDUAL_FLOOR * curve.max_height();
            let keep: Vec<usize> = (0..xs.len()).filter(|&i| fs[i] >= floor).collect();
            let x: Vec<f64> = keep.iter().map(|&i| xs[i]).collect();
            let q: Vec<f64> = keep.iter().map(|&i| ds[i] / fs[i]).collect();
            if x.len() < 3 {
                return Err(Error::DegenerateDomain("too few columns above the floor".into()));
            }
            let dq = derivative(&x, &q);
            let r = q.iter().zip(&dq).map(|(q, d)| -2.0 * d - q * q).collect();
            summarize(x, r)
        }
        _ => {
            let (target, perimeter_weight) = match functional {
                Functional::ProblemP { v } | Functional::Ev { v } => (curve.rescale_to_volume(v)?, 1.0),
                Functional::Eps { eps } => {
                    let delta = eps.powf(2.0 / 3.0);
                    (compress(curve, eps), delta / curve.volume().sqrt())
                }
                Functional::E0 => unreachable!(),
            };
            let field = field::solve_harmonic(&target, solve)?;
            el_profile(&field, perimeter_weight)
        }
    }
}

/// Perimeter part of the residual alone, `R = −(f'/√(1+f'²))'` (the
/// curvature), on columns with finite slope.
pub fn perimeter_residual(curve: &GraphCurve) -> Result<ElResidual> {
    let keep: Vec<usize> = (1..curve.len() - 1).filter(|&i| curve.slopes()[i].is_finite()).collect();
    let x: Vec<f64> = keep.iter().map(|&i| curve.xs()[i]).collect();
    let t: Vec<f64> = keep
        .iter()
        .map(|&i| {
            let s = curve.slopes()[i];
            s / s.hypot(1.0)
        })
        .collect();
    if x.len() < 3 {
        return Err(Error::DegenerateDomain("too few columns with finite slope".into()));
    }
    let r = derivative(&x, &t).iter().map(|d| -d).collect();
    summarize(x, r)
}

/// `R(x)` from a solved field with the perimeter part weighted by
/// `perimeter_weight`.
pub fn el_profile(field: &AngleField, perimeter_weight: f64) -> Result<ElResidual> {
    let b = boundary_data(field)?;
    let floor = RESIDUAL_FLOOR * field.curve().max_height();
    let fs = field.curve().fs();
    let keep: Vec<usize> = (0..b.xs.len())
        .filter(|&i| b.valid[i] && b.free[i] && fs[i] >= floor)
        .collect();
    if keep.len() < 5 {
        return Err(Error::DegenerateDomain("too few unclipped columns".into()));
    }
    let x: Vec<f64> = keep.iter().map(|&i| b.xs[i]).collect();
    let w: Vec<f64> = keep.iter().map(|&i| b.slopes[i].hypot(1.0)).collect();
    let tangent: Vec<f64> = keep.iter().zip(&w).map(|(&i, w)| b.slopes[i] / w).collect();
    let flux: Vec<f64> = keep.iter().zip(&w).map(|(&i, w)| b.normal[i] / w).collect();
    let d_tangent = derivative(&x, &tangent);
    let d_flux = derivative(&x, &flux);
    let r = keep
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let field_part = -2.0 * d_flux[k] - 2.0 * b.normal[i] * b.theta_y[i] * w[k] + b.grad_sq[i];
            field_part - perimeter_weight * d_tangent[k]
        })
        .collect();
    summarize(x, r)
}
