use serde::{Deserialize, Serialize};

use super::{ParametricCurve, Profile, SpectralForm};
use crate::numerics::{derivative, sinc_half};
use crate::{Error, Result};

/// Sampling grid for a graph curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    #[default]
    Uniform,
    /// Cosine-clustered (Chebyshev-Lobatto) nodes; dense near `x = ±a`,
    /// where minimizers develop cusps.
    Cosine,
    /// Cosine-clustered in arc length of the sampled profile: resolves
    /// steep stretches as well as the endpoints. Falls back to `Cosine`
    /// where no profile is available.
    Arc,
}

/// Nodes at arc-length stations `L (1 − cos(πk/(n−1))) / 2`, using the
/// substitution `x = −a cos θ` so the arc density stays finite at vertical
/// endpoints.
fn arc_nodes<P: Profile + ?Sized>(profile: &P, n: usize) -> Vec<f64> {
    let a = profile.half_width();
    let m = 64 * n;
    let theta: Vec<f64> = (0..=m).map(|k| std::f64::consts::PI * k as f64 / m as f64).collect();
    let density = |t: f64| {
        let (s, c) = t.sin_cos();
        let d = profile.slope(-a * c);
        let v = a * s * (1.0 + d * d).sqrt();
        if v.is_finite() {
            v
        } else {
            // vertical tangent exactly at the endpoint
            0.0
        }
    };
    let mut sigma = vec![0.0; m + 1];
    let mut prev = density(0.0);
    for k in 1..=m {
        let cur = density(theta[k]);
        sigma[k] = sigma[k - 1] + 0.5 * (prev + cur) * (theta[k] - theta[k - 1]);
        prev = cur;
    }
    let total = sigma[m];
    let mut xs = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let target = total * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos());
        while j + 1 < m && sigma[j + 1] < target {
            j += 1;
        }
        let span = sigma[j + 1] - sigma[j];
        let w = if span > 0.0 { ((target - sigma[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
        let t = theta[j] + w * (theta[j + 1] - theta[j]);
        xs.push(-a * t.cos());
    }
    xs[0] = -a;
    xs[n - 1] = a;
    for i in 1..n {
        if xs[i] <= xs[i - 1] {
            xs[i] = xs[i - 1] + f64::EPSILON * a;
        }
    }
    xs
}

impl Grid {
    /// `n` nodes on `[-a, a]`, exactly mirror-symmetric with exact endpoints.
    pub fn nodes(self, a: f64, n: usize) -> Vec<f64> {
        let m = (n - 1) as f64;
        (0..n)
            .map(|i| match self {
                Grid::Uniform => a * (2.0 * i as f64 - m) / m,
                Grid::Cosine | Grid::Arc => {
                    let k = i.min(n - 1 - i);
                    let v = if 2 * k == n - 1 {
                        0.0
                    } else {
                        a * (std::f64::consts::PI * k as f64 / m).cos()
                    };
                    if i <= n - 1 - i {
                        -v
                    } else {
                        v
                    }
                }
            })
            .collect()
    }
}

/// Droplet upper boundary as a positive graph `y = f(x)` on `[-a, a]`.
///
/// Samples satisfy `f(±a) = 0` exactly and `f > 0` strictly inside.
/// Slopes are carried alongside the samples: analytic when the curve comes
/// from a [`Profile`] or a [`SpectralForm`], second-order finite differences
/// otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCurve {
    a: f64,
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
    spectral: Option<SpectralForm>,
}

/// Trace of the director angle on the boundary of the droplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub xs: Vec<f64>,
    /// `arctan f'(x)` on the curve.
    pub curve: Vec<f64>,
}

impl BoundaryTrace {
    /// The angle on the base segment `[-a, a] × {0}`.
    pub fn on_base(&self, _x: f64) -> f64 {
        0.0
    }
}

impl GraphCurve {
    pub fn from_samples(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        Self::validate(&xs, &fs)?;
        let slopes = derivative(&xs, &fs);
        Self::build(xs, fs, slopes, None)
    }

    pub fn from_samples_with_slopes(xs: Vec<f64>, fs: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        Self::validate(&xs, &fs)?;
        if slopes.len() != xs.len() {
            return Err(Error::MalformedCurve(
                "slope count differs from sample count".into(),
            ));
        }
        Self::build(xs, fs, slopes, None)
    }

    /// Sample an analytic profile on `n` nodes.
    pub fn sample<P: Profile + ?Sized>(profile: &P, n: usize, grid: Grid) -> Result<Self> {
        let a = profile.half_width();
        if !(a > 0.0) {
            return Err(Error::Domain(format!("half-width must be positive, got {a}")));
        }
        if n < 3 {
            return Err(Error::MalformedCurve(format!("need at least 3 samples, got {n}")));
        }
        let xs = match grid {
            Grid::Arc => arc_nodes(profile, n),
            _ => grid.nodes(a, n),
        };
        let mut fs: Vec<f64> = xs.iter().map(|&x| profile.value(x)).collect();
        fs[0] = 0.0;
        fs[n - 1] = 0.0;
        let slopes = xs.iter().map(|&x| profile.slope(x)).collect();
        Self::from_samples_with_slopes(xs, fs, slopes)
    }

    /// Sample `f = h²` from a spectral form; the form is retained.
    pub fn from_spectral(form: SpectralForm, n: usize, grid: Grid) -> Result<Self> {
        let mut c = Self::sample(&form, n, grid)?;
        c.spectral = Some(form);
        Ok(c)
    }

    fn validate(xs: &[f64], fs: &[f64]) -> Result<()> {
        let n = xs.len();
        if n < 3 {
            return Err(Error::MalformedCurve(format!("need at least 3 samples, got {n}")));
        }
        if fs.len() != n {
            return Err(Error::MalformedCurve("x and y lengths differ".into()));
        }
        if xs.iter().chain(fs).any(|v| !v.is_finite()) {
            return Err(Error::MalformedCurve("non-finite sample".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MalformedCurve("x samples must be strictly increasing".into()));
        }
        let a = 0.5 * (xs[n - 1] - xs[0]);
        if (xs[0] + xs[n - 1]).abs() > 1e-12 * a {
            return Err(Error::MalformedCurve(format!(
                "base must be symmetric [-a, a], got [{}, {}]",
                xs[0],
                xs[n - 1]
            )));
        }
        if fs[0] != 0.0 || fs[n - 1] != 0.0 {
            return Err(Error::MalformedCurve("endpoints must lie on the axis".into()));
        }
        if let Some(i) = (1..n - 1).find(|&i| !(fs[i] > 0.0)) {
            return Err(Error::MalformedCurve(format!(
                "curve touches or crosses the axis at interior sample x = {}",
                xs[i]
            )));
        }
        Ok(())
    }

    fn build(xs: Vec<f64>, fs: Vec<f64>, slopes: Vec<f64>, spectral: Option<SpectralForm>) -> Result<Self> {
        let n = xs.len();
        let a = 0.5 * (xs[n - 1] - xs[0]);
        Ok(GraphCurve {
            a,
            xs,
            fs,
            slopes,
            spectral,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.a
    }
    pub fn len(&self) -> usize {
        self.xs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }
    pub fn fs(&self) -> &[f64] {
        &self.fs
    }
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }
    pub fn spectral(&self) -> Option<&SpectralForm> {
        self.spectral.as_ref()
    }
    pub fn max_height(&self) -> f64 {
        self.fs.iter().cloned().fold(0.0, f64::max)
    }

    /// Tangent angle `arctan f'` at each sample (±π/2 for infinite slopes).
    pub fn tangent_angles(&self) -> Vec<f64> {
        self.slopes.iter().map(|s| s.atan()).collect()
    }

    /// Per-interval `(chord, turning angle)`. Each interval is modelled as the
    /// circular arc through its end samples whose tangent turns by the
    /// difference of the end tangent angles; this is exact for circles.
    fn arcs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let th = self.tangent_angles();
        (0..self.len() - 1).map(move |i| {
            let dx = self.xs[i + 1] - self.xs[i];
            let dy = self.fs[i + 1] - self.fs[i];
            (dx.hypot(dy), th[i + 1] - th[i])
        })
    }

    /// Arc length of each interval.
    pub fn interval_lengths(&self) -> Vec<f64> {
        self.arcs().map(|(c, phi)| c / sinc_half(phi)).collect()
    }

    /// Area of the region between the curve and the base segment.
    ///
    /// Trapezoid rule plus the circular-segment area of each interval's arc
    /// model (removes the O(h²) trapezoid bias).
    pub fn volume(&self) -> f64 {
        let mut total = 0.0;
        for (i, (c, phi)) in self.arcs().enumerate() {
            let trap = 0.5 * (self.xs[i + 1] - self.xs[i]) * (self.fs[i] + self.fs[i + 1]);
            total += trap - segment_area(c, phi);
        }
        total
    }

    /// Plain trapezoid quadrature of `∫ f dx`.
    pub fn trapezoid_volume(&self) -> f64 {
        crate::numerics::trapezoid(&self.xs, &self.fs)
    }

    /// Length `l(Γ)` of the curve (sum of interval arc lengths).
    pub fn perimeter(&self) -> f64 {
        self.interval_lengths().iter().sum()
    }

    /// Isotropic dilation about the origin.
    pub fn dilate(&self, s: f64) -> GraphCurve {
        GraphCurve {
            a: self.a * s,
            xs: self.xs.iter().map(|x| x * s).collect(),
            fs: self.fs.iter().map(|f| f * s).collect(),
            slopes: self.slopes.clone(),
            spectral: self.spectral.as_ref().map(|f| f.dilate(s)),
        }
    }

    /// Isotropic dilation to the target area. Lengths scale by
    /// `√(v_target / volume)`; the Dirichlet energy of the transported
    /// angle field is unchanged.
    pub fn rescale_to_volume(&self, v_target: f64) -> Result<GraphCurve> {
        if !(v_target > 0.0) {
            return Err(Error::Domain(format!("target volume must be positive, got {v_target}")));
        }
        let v = self.volume();
        if !(v > 0.0) {
            return Err(Error::Domain("curve has non-positive volume".into()));
        }
        if v == v_target {
            return Ok(self.clone());
        }
        let s = (v_target / v).sqrt();
        Ok(self.dilate(s))
    }

    /// Vertical compression `(x, s f(x))`.
    pub fn scale_vertical(&self, s: f64) -> GraphCurve {
        GraphCurve {
            a: self.a,
            xs: self.xs.clone(),
            fs: self.fs.iter().map(|f| f * s).collect(),
            slopes: self.slopes.iter().map(|d| d * s).collect(),
            spectral: None,
        }
    }

    /// Mirror image `x → -x`.
    pub fn mirrored(&self) -> GraphCurve {
        let mut xs: Vec<f64> = self.xs.iter().rev().map(|x| -x).collect();
        let n = xs.len();
        xs[0] = -self.a;
        xs[n - 1] = self.a;
        GraphCurve {
            a: self.a,
            xs,
            fs: self.fs.iter().rev().cloned().collect(),
            slopes: self.slopes.iter().rev().map(|d| -d).collect(),
            spectral: self.spectral.as_ref().map(|s| {
                // h(-x) has the same coefficients: the basis is even
                s.clone()
            }),
        }
    }

    /// Every `step`-th sample, if the sample count allows it.
    pub fn coarsen(&self, step: usize) -> Option<GraphCurve> {
        if step == 0 || (self.len() - 1) % step != 0 || (self.len() - 1) / step < 2 {
            return None;
        }
        let pick = |v: &Vec<f64>| v.iter().step_by(step).cloned().collect::<Vec<_>>();
        Some(GraphCurve {
            a: self.a,
            xs: pick(&self.xs),
            fs: pick(&self.fs),
            slopes: pick(&self.slopes),
            spectral: self.spectral.clone(),
        })
    }

    /// Director angle on the boundary: `arctan f'` on the curve, 0 on the
    /// base. Infinite slopes are allowed only at the two endpoints.
    pub fn boundary_angle(&self) -> Result<BoundaryTrace> {
        let n = self.len();
        if let Some(i) = (1..n - 1).find(|&i| !self.slopes[i].is_finite()) {
            return Err(Error::VerticalTangent { x: self.xs[i] });
        }
        Ok(BoundaryTrace {
            xs: self.xs.clone(),
            curve: self.tangent_angles(),
        })
    }

    /// Resample at `n_points` equal arc-length stations.
    pub fn to_parametric(&self, n_points: usize) -> Result<ParametricCurve> {
        if n_points < 3 {
            return Err(Error::Domain(format!("need at least 3 stations, got {n_points}")));
        }
        let lens = self.interval_lengths();
        let total: f64 = lens.iter().sum();
        let th = self.tangent_angles();
        let mut cumulative = Vec::with_capacity(lens.len() + 1);
        cumulative.push(0.0);
        for l in &lens {
            cumulative.push(cumulative.last().unwrap() + l);
        }
        let mut points = Vec::with_capacity(n_points);
        let mut params = Vec::with_capacity(n_points);
        let mut seg = 0usize;
        for j in 0..n_points {
            let s = total * j as f64 / (n_points - 1) as f64;
            params.push(s);
            if j == 0 {
                points.push([self.xs[0], 0.0]);
                continue;
            }
            if j == n_points - 1 {
                points.push([self.xs[self.len() - 1], 0.0]);
                continue;
            }
            while seg + 1 < lens.len() && cumulative[seg + 1] < s {
                seg += 1;
            }
            let sigma = (s - cumulative[seg]).clamp(0.0, lens[seg]);
            let (x0, y0) = (self.xs[seg], self.fs[seg]);
            let (dx, dy) = (self.xs[seg + 1] - x0, self.fs[seg + 1] - y0);
            let phi = th[seg + 1] - th[seg];
            let beta = dy.atan2(dx);
            let start = beta - 0.5 * phi;
            let kappa = if lens[seg] > 0.0 { phi / lens[seg] } else { 0.0 };
            let turn = kappa * sigma;
            let r = sigma * sinc_half(turn);
            let ang = start + 0.5 * turn;
            points.push([x0 + r * ang.cos(), (y0 + r * ang.sin()).max(0.0)]);
        }
        ParametricCurve::from_stations(points, params)
    }
}

/// Signed area between a chord of length `c` and the circular arc over it
/// whose tangent turns by `phi`; positive when the arc lies below the chord
/// (counter-clockwise turning).
fn segment_area(c: f64, phi: f64) -> f64 {
    if phi.abs() < 1e-3 {
        // R²(φ - sin φ)/2 with R = c / (2 sin(φ/2)), expanded
        c * c * phi / 12.0 * (1.0 + phi * phi / 30.0)
    } else {
        let r = c / (2.0 * (0.5 * phi).sin());
        0.5 * r * r * (phi - phi.sin())
    }
}

/// Region enclosed by a graph curve and the base segment.
#[derive(Debug, Clone)]
pub struct Domain {
    pub curve: GraphCurve,
    pub volume: f64,
}

impl Domain {
    pub fn new(curve: GraphCurve) -> Self {
        let volume = curve.volume();
        Domain { curve, volume }
    }

    pub fn base(&self) -> [f64; 2] {
        [-self.curve.half_width(), self.curve.half_width()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CosineBump, Gamma0, Semicircle};
    use std::f64::consts::PI;

    #[test]
    fn grids_are_mirror_symmetric() {
        for grid in [Grid::Uniform, Grid::Cosine] {
            for n in [5, 6, 33, 1025] {
                let xs = grid.nodes(1.7, n);
                assert_eq!(xs[0], -1.7);
                assert_eq!(xs[n - 1], 1.7);
                for i in 0..n {
                    assert_eq!(xs[i], -xs[n - 1 - i]);
                }
                assert!(xs.windows(2).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn gamma0_has_unit_volume() {
        let c = GraphCurve::sample(&Gamma0, 1025, Grid::Uniform).unwrap();
        assert!((c.volume() - 1.0).abs() < 1e-8);
        assert!((c.trapezoid_volume() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn semicircle_volume_and_perimeter() {
        let c = GraphCurve::sample(&Semicircle::default(), 257, Grid::Uniform).unwrap();
        assert!((c.perimeter() - PI).abs() < 1e-6);
        assert!((c.volume() - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn flat_limit_perimeter() {
        for &d in &[1e-2, 1e-3] {
            let p = CosineBump {
                amplitude: d,
                half_width: 1.0,
            };
            let c = GraphCurve::sample(&p, 513, Grid::Uniform).unwrap();
            let excess = c.perimeter() - 2.0;
            // ∫ (f'²/2) = δ² π² / 8 to leading order
            assert!(excess > 0.0);
            assert!((excess - d * d * PI * PI / 8.0).abs() < 0.01 * d * d * PI * PI / 8.0);
        }
    }

    #[test]
    fn rejects_malformed_samples() {
        let bad = GraphCurve::from_samples(vec![-1.0, 0.5, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(bad, Err(Error::MalformedCurve(_))));
        let short = GraphCurve::from_samples(vec![-1.0, 1.0], vec![0.0, 0.0]);
        assert!(matches!(short, Err(Error::MalformedCurve(_))));
        let touching =
            GraphCurve::from_samples(vec![-1.0, -0.5, 0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(touching, Err(Error::MalformedCurve(_))));
    }

    #[test]
    fn rescale_to_volume_identity_and_halving() {
        let c = GraphCurve::sample(&CosineBump::unit(), 129, Grid::Uniform).unwrap();
        let same = c.rescale_to_volume(c.volume()).unwrap();
        assert_eq!(same, c);
        let big = c.dilate(2.0 / c.volume().sqrt());
        assert!((big.volume() - 4.0).abs() < 1e-12);
        let small = big.rescale_to_volume(1.0).unwrap();
        for (a, b) in small.xs().iter().zip(big.xs()) {
            assert!((a - 0.5 * b).abs() < 1e-14);
        }
        assert!((small.perimeter() - 0.5 * big.perimeter()).abs() < 1e-12);
        assert!(matches!(c.rescale_to_volume(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn boundary_angle_rejects_interior_vertical_tangent() {
        let xs = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
        let fs = vec![0.0, 1.0, 1.0, 1.0, 0.0];
        let slopes = vec![1.0, f64::INFINITY, 0.0, 0.0, -1.0];
        let c = GraphCurve::from_samples_with_slopes(xs, fs, slopes).unwrap();
        assert!(matches!(c.boundary_angle(), Err(Error::VerticalTangent { .. })));
        let semi = GraphCurve::sample(&Semicircle::default(), 65, Grid::Uniform).unwrap();
        let t = semi.boundary_angle().unwrap();
        assert_eq!(t.curve[0], PI / 2.0);
        assert_eq!(t.curve[64], -PI / 2.0);
        assert_eq!(t.on_base(0.3), 0.0);
    }

    #[test]
    fn coarsen_keeps_every_other_sample() {
        let c = GraphCurve::sample(&CosineBump::unit(), 9, Grid::Uniform).unwrap();
        let h = c.coarsen(2).unwrap();
        assert_eq!(h.len(), 5);
        assert_eq!(h.xs()[1], c.xs()[2]);
        assert!(c.coarsen(3).is_none());
    }
}
