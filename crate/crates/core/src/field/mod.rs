//! Harmonic director-angle fields on droplet domains.
//!
//! The droplet `{0 < y < f(x)}` is mapped to the rectangle
//! `(ξ, η) ∈ [-a, a] × [0, 1]` with `η = y / f(ξ)`. In these coordinates the
//! Dirichlet integrand becomes `(Θ_ξ − η (f'/f) Θ_η)² + (Θ_η / f)²` with area
//! element `f dξ dη`. Fields are bilinear on the mapped grid and the
//! transformed integrand is integrated by Gauss quadrature, so the discrete
//! problem is a symmetric positive-definite quadratic minimization and the
//! discrete Dirichlet principle holds exactly.
//!
//! Near `x = ±a` the mapped coefficients blow up because `f → 0`. Columns
//! where `f` drops below a floor are clipped: their values are prescribed by
//! linear interpolation in `η` between the two boundary values.

mod mesh;
mod solver;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::geometry::GraphCurve;
use crate::numerics::derivative;
use crate::{Error, Result};
use mesh::{hermite_gauss, Mesh};
use solver::System;

/// How the degenerate endpoint columns are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clip {
    /// Clip the runs of end columns with `f < floor · max f`.
    Floor(f64),
    /// Clip exactly this many columns at each end (at least one, since
    /// `f(±a) = 0`). Keeps the clip set fixed under shape perturbations.
    Margin(usize),
}

impl Default for Clip {
    fn default() -> Self {
        Clip::Floor(1e-3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub n_eta: usize,
    /// Relative residual target of the linear solver.
    pub tol: f64,
    pub clip: Clip,
    /// Defaults to `50 · n_ξ · n_η`.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            n_eta: 257,
            tol: 1e-10,
            clip: Clip::default(),
            max_iter: None,
        }
    }
}

impl SolveOptions {
    pub fn with_n_eta(mut self, n_eta: usize) -> Self {
        self.n_eta = n_eta;
        self
    }
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
    pub fn with_clip(mut self, clip: Clip) -> Self {
        self.clip = clip;
        self
    }
}

/// Number of clipped columns at each end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipMargin {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Minimum resolution accepted by [`solve_harmonic`].
pub const MIN_RESOLUTION: (usize, usize) = (33, 17);

/// Discrete harmonic (or explicitly prescribed) angle field on a droplet.
#[derive(Debug, Clone)]
pub struct AngleField {
    curve: GraphCurve,
    mesh: Mesh,
    theta: Vec<f64>,
    top: Vec<f64>,
    clip: ClipMargin,
    stats: SolveStats,
}

/// Boundary gradient of the field along the curve, one entry per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtnTrace {
    pub xs: Vec<f64>,
    /// Outward normal derivative `∂Θ/∂ν`.
    pub normal: Vec<f64>,
    pub theta_x: Vec<f64>,
    pub theta_y: Vec<f64>,
    /// `false` where the trace is undefined (`f = 0` or infinite slope).
    pub valid: Vec<bool>,
    /// `true` for unclipped columns.
    pub free: Vec<bool>,
}

impl DtnTrace {
    /// `|∇Θ|²` on the curve.
    pub fn grad_sq(&self) -> Vec<f64> {
        self.theta_x
            .iter()
            .zip(&self.theta_y)
            .map(|(a, b)| a * a + b * b)
            .collect()
    }
}

/// Comparison of `∫_Γ Θ ∂Θ/∂ν dℋ¹` with `∫|∇Θ|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenCheck {
    pub boundary: f64,
    pub energy: f64,
    /// `|boundary − energy| / energy` (0 if both vanish).
    pub defect: f64,
}

/// Sidecar record written next to a field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub n_xi: usize,
    pub n_eta: usize,
    pub clip_margin: ClipMargin,
    pub iterations: usize,
    pub residual: f64,
}

fn curve_mesh(curve: &GraphCurve, n_eta: usize) -> Mesh {
    let gauss = hermite_gauss(curve.xs(), curve.fs(), curve.slopes());
    Mesh::new(curve.xs().to_vec(), curve.fs().to_vec(), n_eta, gauss)
}

fn clip_columns(curve: &GraphCurve, clip: Clip) -> Result<ClipMargin> {
    let fs = curve.fs();
    let n = fs.len();
    let fmax = curve.max_height();
    if !(fmax > 1e-12 * curve.half_width()) {
        return Err(Error::DegenerateDomain(format!(
            "maximum height {fmax:.3e} is below the width floor"
        )));
    }
    let margin = match clip {
        Clip::Floor(rel) => {
            let floor = rel * fmax;
            let left = fs.iter().take_while(|&&f| f < floor).count();
            let right = fs.iter().rev().take_while(|&&f| f < floor).count();
            if left + right < n {
                if let Some(i) = (left..n - right).find(|&i| fs[i] < floor) {
                    return Err(Error::DegenerateDomain(format!(
                        "height below the width floor at interior x = {}",
                        curve.xs()[i]
                    )));
                }
            }
            ClipMargin { left, right }
        }
        Clip::Margin(m) => ClipMargin {
            left: m.max(1),
            right: m.max(1),
        },
    };
    if margin.left + margin.right + 3 > n {
        return Err(Error::DegenerateDomain(format!(
            "only {} unclipped columns remain",
            n.saturating_sub(margin.left + margin.right)
        )));
    }
    Ok(margin)
}

impl AngleField {
    fn prepare(curve: &GraphCurve, opts: &SolveOptions) -> Result<(Mesh, Vec<f64>, ClipMargin)> {
        if opts.n_eta < 3 {
            return Err(Error::Domain(format!("n_eta must be at least 3, got {}", opts.n_eta)));
        }
        let top = curve.boundary_angle()?.curve;
        let clip = clip_columns(curve, opts.clip)?;
        Ok((curve_mesh(curve, opts.n_eta), top, clip))
    }

    /// Field `Θ = η · top(ξ)` (linear in `η` between the boundary values).
    fn eta_linear(mesh: &Mesh, top: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; mesh.len()];
        for (i, t) in top.iter().enumerate() {
            for j in 0..mesh.ny {
                theta[mesh.index(i, j)] = mesh.eta(j) * t;
            }
        }
        theta
    }

    /// The linear-in-`η` extension `Θ = η arctan f'(ξ)` of the boundary data.
    pub fn linear_extension(curve: &GraphCurve, opts: &SolveOptions) -> Result<AngleField> {
        let (mesh, top, clip) = Self::prepare(curve, opts)?;
        let theta = Self::eta_linear(&mesh, &top);
        Ok(AngleField {
            curve: curve.clone(),
            mesh,
            theta,
            top,
            clip,
            stats: SolveStats {
                iterations: 0,
                residual: 0.0,
            },
        })
    }

    /// `Θ = η · trace(ξ)` for an arbitrary curve trace (not necessarily the
    /// tangential anchoring data).
    pub fn eta_linear_with_trace(
        curve: &GraphCurve,
        n_eta: usize,
        trace: impl Fn(f64) -> f64,
    ) -> Result<AngleField> {
        if n_eta < 3 {
            return Err(Error::Domain(format!("n_eta must be at least 3, got {n_eta}")));
        }
        let mesh = curve_mesh(curve, n_eta);
        let top: Vec<f64> = curve.xs().iter().map(|&x| trace(x)).collect();
        let theta = Self::eta_linear(&mesh, &top);
        let n = curve.len();
        Ok(AngleField {
            curve: curve.clone(),
            mesh,
            theta,
            top,
            clip: ClipMargin { left: 1, right: 1 }.min_for(n),
            stats: SolveStats {
                iterations: 0,
                residual: 0.0,
            },
        })
    }

    pub fn curve(&self) -> &GraphCurve {
        &self.curve
    }

    /// `(n_ξ, n_η)`.
    pub fn resolution(&self) -> (usize, usize) {
        (self.mesh.nx(), self.mesh.ny)
    }

    pub fn clip_margin(&self) -> ClipMargin {
        self.clip
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    /// Value at mapped node `(i, j)`: `ξ = x_i`, `η = j / (n_η − 1)`.
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.theta[self.mesh.index(i, j)]
    }

    /// All nodal values, column-major in `η` (`index = i · n_η + j`).
    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    /// Boundary data on the curve.
    pub fn top_trace(&self) -> &[f64] {
        &self.top
    }

    pub fn dirichlet_energy(&self) -> f64 {
        self.mesh.energy(&self.theta)
    }

    /// Energy carried by each cell column `[x_i, x_{i+1}]`.
    pub fn column_energy(&self) -> Vec<f64> {
        self.mesh.column_energy(&self.theta)
    }

    /// Discrete energy on a perturbed curve (same `x` samples) with the
    /// interior values of this field held fixed and the boundary rows and
    /// clipped columns updated to the new curve's data. Since a solved field
    /// is stationary with respect to its free values, the derivative of
    /// this map at the unperturbed curve is the derivative of the discrete
    /// harmonic energy.
    pub fn frozen_energy(&self, curve: &GraphCurve) -> Result<f64> {
        if curve.xs() != self.curve.xs() {
            return Err(Error::Domain("perturbed curve must keep the x samples".into()));
        }
        let mesh = curve_mesh(curve, self.mesh.ny);
        let top = curve.boundary_angle()?.curve;
        let mut theta = self.theta.clone();
        let (nx, ny) = (mesh.nx(), mesh.ny);
        for i in 0..nx {
            let clipped = i < self.clip.left || i >= nx - self.clip.right;
            if clipped {
                for j in 0..ny {
                    theta[mesh.index(i, j)] = mesh.eta(j) * top[i];
                }
            } else {
                theta[mesh.index(i, ny - 1)] = top[i];
            }
        }
        Ok(mesh.energy(&theta))
    }

    /// Normal derivative on the curve from a second-order one-sided stencil
    /// in `η` and the tangential derivative of the boundary data.
    pub fn dtn_trace(&self) -> Result<DtnTrace> {
        let mut t = top_gradient(&self.mesh, &self.theta, &self.top, self.curve.slopes())?;
        let n = t.xs.len();
        for i in 0..n {
            t.free[i] = i >= self.clip.left && i < n - self.clip.right;
        }
        Ok(t)
    }

    pub fn green_identity(&self) -> Result<GreenCheck> {
        let t = self.dtn_trace()?;
        let slopes = self.curve.slopes();
        let integrand: Vec<f64> = (0..t.xs.len())
            .map(|i| {
                if t.valid[i] {
                    self.top[i] * (-slopes[i] * t.theta_x[i] + t.theta_y[i])
                } else {
                    0.0
                }
            })
            .collect();
        let boundary = crate::numerics::trapezoid(&t.xs, &integrand);
        Ok(green(boundary, self.dirichlet_energy()))
    }

    pub fn metadata(&self) -> FieldMetadata {
        FieldMetadata {
            n_xi: self.mesh.nx(),
            n_eta: self.mesh.ny,
            clip_margin: self.clip,
            iterations: self.stats.iterations,
            residual: self.stats.residual,
        }
    }

    /// Dump as CSV `xi,eta,theta`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["xi", "eta", "theta"])?;
        for i in 0..self.mesh.nx() {
            for j in 0..self.mesh.ny {
                w.write_record([
                    format!("{:.17e}", self.mesh.xs[i]),
                    format!("{:.17e}", self.mesh.eta(j)),
                    format!("{:.17e}", self.theta(i, j)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

impl ClipMargin {
    fn min_for(self, n: usize) -> Self {
        ClipMargin {
            left: self.left.min(n),
            right: self.right.min(n),
        }
    }
}

fn green(boundary: f64, energy: f64) -> GreenCheck {
    let defect = if energy > 0.0 {
        (boundary - energy).abs() / energy
    } else if boundary == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    GreenCheck {
        boundary,
        energy,
        defect,
    }
}

fn top_gradient(mesh: &Mesh, theta: &[f64], top: &[f64], slopes: &[f64]) -> Result<DtnTrace> {
    let ny = mesh.ny;
    if ny < 4 {
        return Err(Error::Domain(format!(
            "n_eta = {ny} is too coarse for the boundary stencil (need at least 4)"
        )));
    }
    let nx = mesh.nx();
    let h = mesh.d_eta();
    let d_xi = derivative(&mesh.xs, top);
    let mut out = DtnTrace {
        xs: mesh.xs.clone(),
        normal: vec![f64::NAN; nx],
        theta_x: vec![f64::NAN; nx],
        theta_y: vec![f64::NAN; nx],
        valid: vec![false; nx],
        free: vec![true; nx],
    };
    for i in 0..nx {
        let f = mesh.tops[i];
        let s = slopes[i];
        if !(f > 0.0) || !s.is_finite() || !d_xi[i].is_finite() {
            continue;
        }
        let u = |j: usize| theta[mesh.index(i, j)];
        let t_eta = (3.0 * u(ny - 1) - 4.0 * u(ny - 2) + u(ny - 3)) / (2.0 * h);
        let ty = t_eta / f;
        let tx = d_xi[i] - s * ty;
        out.theta_x[i] = tx;
        out.theta_y[i] = ty;
        out.normal[i] = (-s * tx + ty) / (1.0 + s * s).sqrt();
        out.valid[i] = true;
    }
    Ok(out)
}

/// Solves `ΔΘ = 0` in the droplet with `Θ = 0` on the base and
/// `Θ = arctan f'` on the curve.
pub fn solve_harmonic(curve: &GraphCurve, opts: &SolveOptions) -> Result<AngleField> {
    let top = curve.boundary_angle()?.curve;
    solve_with_top(curve, opts, top)
}

/// Harmonic extension of an arbitrary trace on the curve (0 on the base).
pub fn solve_harmonic_with_trace(
    curve: &GraphCurve,
    opts: &SolveOptions,
    trace: impl Fn(f64) -> f64,
) -> Result<AngleField> {
    let top = curve.xs().iter().map(|&x| trace(x)).collect();
    solve_with_top(curve, opts, top)
}

fn solve_with_top(curve: &GraphCurve, opts: &SolveOptions, top: Vec<f64>) -> Result<AngleField> {
    let (min_x, min_eta) = MIN_RESOLUTION;
    if curve.len() < min_x || opts.n_eta < min_eta {
        return Err(Error::Domain(format!(
            "resolution {}x{} is below the minimum {min_x}x{min_eta}",
            curve.len(),
            opts.n_eta
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let clip = clip_columns(curve, opts.clip)?;
    let mesh = curve_mesh(curve, opts.n_eta);
    let mut theta = AngleField::eta_linear(&mesh, &top);
    let nx = mesh.nx();
    let ny = mesh.ny;
    let mut fixed = vec![false; mesh.len()];
    for i in 0..nx {
        let clipped = i < clip.left || i >= nx - clip.right;
        for j in 0..ny {
            fixed[mesh.index(i, j)] = clipped || j == 0 || j == ny - 1;
        }
    }
    let coef = mesh.stiffness();
    let system = System {
        nx,
        ny,
        coef: &coef,
        fixed: &fixed,
    };
    let max_iter = opts.max_iter.unwrap_or(50 * nx * ny);
    let out = system.solve(&mut theta, opts.tol, max_iter)?;
    Ok(AngleField {
        curve: curve.clone(),
        mesh,
        theta,
        top,
        clip,
        stats: SolveStats {
            iterations: out.iterations,
            residual: out.residual,
        },
    })
}

/// `∫|∇Θ|²` of a field.
pub fn dirichlet_energy(field: &AngleField) -> f64 {
    field.dirichlet_energy()
}

/// Boundary normal derivative of a field.
pub fn dtn_trace(field: &AngleField) -> Result<DtnTrace> {
    field.dtn_trace()
}

/// Harmonic field on a general graph domain `{x₀ < x < x₁, 0 < y < top(x)}`
/// with arbitrary Dirichlet data on the whole boundary. Used to verify the
/// solver against known harmonic functions.
#[derive(Debug, Clone)]
pub struct TestDomainField {
    mesh: Mesh,
    slopes: Vec<f64>,
    theta: Vec<f64>,
    top: Vec<f64>,
    stats: SolveStats,
}

impl TestDomainField {
    /// `top` returns `(height, slope)` and must be positive on the interval.
    pub fn solve(
        xs: Vec<f64>,
        top: impl Fn(f64) -> (f64, f64),
        n_eta: usize,
        data: impl Fn(f64, f64) -> f64,
        tol: f64,
    ) -> Result<TestDomainField> {
        if xs.len() < 3 || n_eta < 3 {
            return Err(Error::Domain("test domain needs at least 3x3 nodes".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MalformedCurve("x must be strictly increasing".into()));
        }
        let (tops, slopes): (Vec<f64>, Vec<f64>) = xs.iter().map(|&x| top(x)).unzip();
        if tops.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::DegenerateDomain("test domain top must be positive".into()));
        }
        let gauss = mesh::gauss_points(&xs)
            .into_iter()
            .map(|pts| pts.map(&top))
            .collect();
        let mesh = Mesh::new(xs, tops, n_eta, gauss);
        let nx = mesh.nx();
        let mut theta = vec![0.0; mesh.len()];
        let mut fixed = vec![false; mesh.len()];
        let mut top_data = vec![0.0; nx];
        for i in 0..nx {
            let x = mesh.xs[i];
            let lo = data(x, 0.0);
            let hi = data(x, mesh.tops[i]);
            top_data[i] = hi;
            for j in 0..n_eta {
                let n = mesh.index(i, j);
                let side = i == 0 || i == nx - 1 || j == 0 || j == n_eta - 1;
                fixed[n] = side;
                theta[n] = if side {
                    let p = mesh.point(i, j);
                    data(p[0], p[1])
                } else {
                    let e = mesh.eta(j);
                    (1.0 - e) * lo + e * hi
                };
            }
        }
        let coef = mesh.stiffness();
        let system = System {
            nx,
            ny: n_eta,
            coef: &coef,
            fixed: &fixed,
        };
        let out = system.solve(&mut theta, tol, 50 * nx * n_eta)?;
        Ok(TestDomainField {
            mesh,
            slopes,
            theta,
            top: top_data,
            stats: SolveStats {
                iterations: out.iterations,
                residual: out.residual,
            },
        })
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.mesh.nx(), self.mesh.ny)
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn dirichlet_energy(&self) -> f64 {
        self.mesh.energy(&self.theta)
    }

    /// Nodal values with physical coordinates `(x, y, Θ)`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.mesh.nx()).flat_map(move |i| {
            (0..self.mesh.ny).map(move |j| {
                let p = self.mesh.point(i, j);
                (p[0], p[1], self.theta[self.mesh.index(i, j)])
            })
        })
    }

    /// Max-norm distance to `exact` over the nodes.
    pub fn max_error(&self, exact: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes()
            .map(|(x, y, t)| (t - exact(x, y)).abs())
            .fold(0.0, f64::max)
    }

    /// Normal derivative on the top boundary.
    pub fn dtn_trace(&self) -> Result<DtnTrace> {
        top_gradient(&self.mesh, &self.theta, &self.top, &self.slopes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CosineBump, Gamma0, Grid};

    fn unit(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_data_gives_constant_field() {
        let f = TestDomainField::solve(unit(17), |_| (1.0, 0.0), 17, |_, _| 0.7, 1e-12).unwrap();
        assert!(f.max_error(|_, _| 0.7) < 1e-13);
        assert!(f.dirichlet_energy() < 1e-12);
        let t = f.dtn_trace().unwrap();
        assert!(t.normal.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn linear_field_is_reproduced_with_unit_flux() {
        let f = TestDomainField::solve(unit(33), |_| (1.0, 0.0), 33, |_, y| y, 1e-12).unwrap();
        assert!(f.max_error(|_, y| y) < 1e-10);
        let t = f.dtn_trace().unwrap();
        assert!(t.normal.iter().all(|v| (v - 1.0).abs() < 1e-8));
    }

    #[test]
    fn boundary_rows_hold_data_exactly() {
        let c = GraphCurve::sample(&Gamma0, 65, Grid::Uniform).unwrap();
        let field = solve_harmonic(&c, &SolveOptions::default().with_n_eta(17)).unwrap();
        let top = c.tangent_angles();
        for i in 0..65 {
            assert_eq!(field.theta(i, 0), 0.0);
            assert_eq!(field.theta(i, 16), top[i]);
        }
    }

    #[test]
    fn harmonic_energy_below_linear_extension() {
        let c = GraphCurve::sample(&CosineBump::unit(), 129, Grid::Uniform).unwrap();
        let opts = SolveOptions::default().with_n_eta(33);
        let h = solve_harmonic(&c, &opts).unwrap();
        let l = AngleField::linear_extension(&c, &opts).unwrap();
        assert!(h.dirichlet_energy() < l.dirichlet_energy() - 1e-6);
    }

    #[test]
    fn too_coarse_resolution_is_rejected() {
        let c = GraphCurve::sample(&Gamma0, 17, Grid::Uniform).unwrap();
        assert!(matches!(
            solve_harmonic(&c, &SolveOptions::default()),
            Err(Error::Domain(_))
        ));
    }
}
