use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Point = [f64; 2];

/// Curve sampled at arc-length stations `t_j`, `z(t_j) = (x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricCurve {
    points: Vec<Point>,
    params: Vec<f64>,
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

impl ParametricCurve {
    /// Polyline through `points`, parameterized by cumulative chord length.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::MalformedCurve("need at least 2 points".into()));
        }
        let mut params = Vec::with_capacity(points.len());
        params.push(0.0);
        for w in points.windows(2) {
            params.push(params.last().unwrap() + dist(w[0], w[1]));
        }
        Self::from_stations(points, params)
    }

    /// Points with explicit arc-length stations (strictly increasing).
    pub fn from_stations(points: Vec<Point>, params: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.len() != params.len() {
            return Err(Error::MalformedCurve(
                "need at least 2 points with one station each".into(),
            ));
        }
        if points.iter().flatten().chain(&params).any(|v| !v.is_finite()) {
            return Err(Error::MalformedCurve("non-finite point".into()));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MalformedCurve("arc-length stations must increase".into()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedCurve("coincident consecutive points".into()));
        }
        let c = ParametricCurve { points, params };
        if let Some((i, j)) = c.first_self_intersection() {
            return Err(Error::MalformedCurve(format!(
                "segments {i} and {j} intersect"
            )));
        }
        Ok(c)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
    pub fn params(&self) -> &[f64] {
        &self.params
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `l(Γ)`: the arc length carried by the stations.
    pub fn total_length(&self) -> f64 {
        self.params[self.params.len() - 1] - self.params[0]
    }

    /// Sum of chord lengths.
    pub fn perimeter(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    /// Largest relative deviation between a chord and its station step,
    /// i.e. how far the sampling is from unit speed.
    pub fn speed_defect(&self) -> f64 {
        self.points
            .windows(2)
            .zip(self.params.windows(2))
            .map(|(p, t)| (dist(p[0], p[1]) / (t[1] - t[0]) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Checks the discretized admissibility conditions for droplet curves:
    /// endpoints on the axis at `(∓a, 0)`, `y ≥ 0`, non-decreasing `x`, and
    /// unit speed within `speed_tol`.
    pub fn check_admissible(&self, speed_tol: f64) -> Result<()> {
        let n = self.len();
        let (first, last) = (self.points[0], self.points[n - 1]);
        if first[1] != 0.0 || last[1] != 0.0 {
            return Err(Error::MalformedCurve("endpoints must lie on the axis".into()));
        }
        let a = 0.5 * (last[0] - first[0]);
        if !(a > 0.0) || (first[0] + last[0]).abs() > 1e-12 * a {
            return Err(Error::MalformedCurve("endpoints must be (-a, 0) and (a, 0)".into()));
        }
        if self.points.iter().any(|p| p[1] < 0.0) {
            return Err(Error::MalformedCurve("curve dips below the axis".into()));
        }
        if self.points.windows(2).any(|w| w[1][0] - w[0][0] < -1e-12 * a) {
            return Err(Error::MalformedCurve("x must be non-decreasing".into()));
        }
        let defect = self.speed_defect();
        if defect > speed_tol {
            return Err(Error::MalformedCurve(format!(
                "sampling deviates from unit speed by {defect:.3e}"
            )));
        }
        Ok(())
    }

    /// Apply `z → s R z + b` (rotation by `angle`).
    pub fn transformed(&self, angle: f64, scale: f64, shift: Point) -> ParametricCurve {
        let (s, c) = angle.sin_cos();
        ParametricCurve {
            points: self
                .points
                .iter()
                .map(|p| {
                    [
                        scale * (c * p[0] - s * p[1]) + shift[0],
                        scale * (s * p[0] + c * p[1]) + shift[1],
                    ]
                })
                .collect(),
            params: self.params.iter().map(|t| scale * t).collect(),
        }
    }

    /// First pair of non-adjacent segments that touch, found by a sweep over
    /// segments sorted by their left x-extent. Overlaps within 1e-12 count.
    pub fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let m = self.points.len() - 1;
        if m < 3 {
            return None;
        }
        let scale = self
            .points
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1.0);
        let tol = 1e-12 * scale;
        let seg = |k: usize| (self.points[k], self.points[k + 1]);
        let mut order: Vec<usize> = (0..m).collect();
        let lo = |k: usize| self.points[k][0].min(self.points[k + 1][0]);
        let hi = |k: usize| self.points[k][0].max(self.points[k + 1][0]);
        order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)).then(a.cmp(&b)));
        let mut active: Vec<usize> = Vec::new();
        let mut best: Option<(usize, usize)> = None;
        for &k in &order {
            let x = lo(k);
            active.retain(|&j| hi(j) >= x - tol);
            for &j in &active {
                let (i1, i2) = (j.min(k), j.max(k));
                if i2 == i1 + 1 {
                    continue;
                }
                let (p, q) = seg(i1);
                let (r, s) = seg(i2);
                if segments_touch(p, q, r, s, tol) {
                    best = match best {
                        Some(b) if b <= (i1, i2) => Some(b),
                        _ => Some((i1, i2)),
                    };
                }
            }
            active.push(k);
        }
        best
    }

    /// Point at arc-length position `s` by linear interpolation between
    /// stations.
    pub fn point_at(&self, s: f64) -> Point {
        let t = &self.params;
        let n = t.len();
        if s <= t[0] {
            return self.points[0];
        }
        if s >= t[n - 1] {
            return self.points[n - 1];
        }
        let k = t.partition_point(|&v| v <= s).saturating_sub(1).min(n - 2);
        let u = (s - t[k]) / (t[k + 1] - t[k]);
        let (p, q) = (self.points[k], self.points[k + 1]);
        [p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])]
    }
}

fn orient(p: Point, q: Point, r: Point) -> f64 {
    (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let u = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, [a[0] + u * dx, a[1] + u * dy])
}

fn segments_touch(p: Point, q: Point, r: Point, s: Point, tol: f64) -> bool {
    let d1 = orient(p, q, r);
    let d2 = orient(p, q, s);
    let d3 = orient(r, s, p);
    let d4 = orient(r, s, q);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    point_segment_distance(r, p, q) <= tol
        || point_segment_distance(s, p, q) <= tol
        || point_segment_distance(p, r, s) <= tol
        || point_segment_distance(q, r, s) <= tol
}

/// Hausdorff distance between two polylines (vertex-to-polyline distances in
/// both directions).
pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> f64 {
    fn one_sided(from: &[Point], to: &[Point]) -> f64 {
        from.iter()
            .map(|&p| {
                to.windows(2)
                    .map(|w| point_segment_distance(p, w[0], w[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    one_sided(a, b).max(one_sided(b, a))
}
