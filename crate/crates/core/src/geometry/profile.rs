use std::f64::consts::PI;

/// An analytic droplet profile `y = f(x)` on `[-a, a]` with `f(±a) = 0`.
///
/// Profiles are sampled into [`GraphCurve`](super::GraphCurve)s; the slope is
/// evaluated analytically so the boundary angle does not pick up
/// finite-difference error. An infinite slope is allowed at the endpoints.
pub trait Profile: Sync {
    fn half_width(&self) -> f64;
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
}

/// The explicit configuration `f(x) = (cos x + 1) / (2π)` on `[-π, π]`; it
/// encloses unit area.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gamma0;

impl Profile for Gamma0 {
    fn half_width(&self) -> f64 {
        PI
    }
    fn value(&self, x: f64) -> f64 {
        // 1 + cos x = 2 cos²(x/2), stable near x = ±π
        (x / 2.0).cos().powi(2) / PI
    }
    fn slope(&self, x: f64) -> f64 {
        -x.sin() / (2.0 * PI)
    }
}

/// Upper half of the circle of radius `radius` centred at the origin.
#[derive(Debug, Clone, Copy)]
pub struct Semicircle {
    pub radius: f64,
}

impl Default for Semicircle {
    fn default() -> Self {
        Semicircle { radius: 1.0 }
    }
}

impl Profile for Semicircle {
    fn half_width(&self) -> f64 {
        self.radius
    }
    fn value(&self, x: f64) -> f64 {
        let r = self.radius;
        ((r - x) * (r + x)).max(0.0).sqrt()
    }
    fn slope(&self, x: f64) -> f64 {
        let r = self.radius;
        if x <= -r {
            f64::INFINITY
        } else if x >= r {
            f64::NEG_INFINITY
        } else {
            -x / ((r - x) * (r + x)).sqrt()
        }
    }
}

/// Raised cosine `amplitude · (1 + cos(πx/a)) / 2` on `[-a, a]`.
#[derive(Debug, Clone, Copy)]
pub struct CosineBump {
    pub amplitude: f64,
    pub half_width: f64,
}

impl CosineBump {
    pub fn unit() -> Self {
        CosineBump {
            amplitude: 1.0,
            half_width: 1.0,
        }
    }

    /// Minimizer of the small-volume limit functional,
    /// `π^{-4/3} (1 + cos πx) / 2`.
    pub fn small_volume_minimizer() -> Self {
        CosineBump {
            amplitude: PI.powf(-4.0 / 3.0),
            half_width: 1.0,
        }
    }
}

impl Profile for CosineBump {
    fn half_width(&self) -> f64 {
        self.half_width
    }
    fn value(&self, x: f64) -> f64 {
        let w = PI / self.half_width;
        self.amplitude * (0.5 * w * x).cos().powi(2)
    }
    fn slope(&self, x: f64) -> f64 {
        let w = PI / self.half_width;
        -0.5 * self.amplitude * w * (w * x).sin()
    }
}

/// `amplitude · (a² - x²)`: meets the axis at a nonzero angle.
#[derive(Debug, Clone, Copy)]
pub struct Parabola {
    pub amplitude: f64,
    pub half_width: f64,
}

impl Profile for Parabola {
    fn half_width(&self) -> f64 {
        self.half_width
    }
    fn value(&self, x: f64) -> f64 {
        self.amplitude * (self.half_width - x) * (self.half_width + x)
    }
    fn slope(&self, x: f64) -> f64 {
        -2.0 * self.amplitude * x
    }
}

/// The unit semicircle with its two ends replaced by circular arcs tangent
/// to the axis, rescaled horizontally back onto `[-1, 1]`.
///
/// Before rescaling the profile is `√(1-x²)` for `|x| ≤ √(1-ε²)` and
/// `r - √(r² - (c - |x|)²)` on the end arcs, with `r = ε/(1-ε)` and
/// `c = √((1+ε)/(1-ε))`.
#[derive(Debug, Clone, Copy)]
pub struct CuspedSemicircle {
    eps: f64,
}

impl CuspedSemicircle {
    /// `eps` must lie in `(0, 1/4)`.
    pub fn new(eps: f64) -> crate::Result<Self> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(crate::Error::Domain(format!(
                "cusped semicircle needs 0 < eps < 1/4, got {eps}"
            )));
        }
        Ok(CuspedSemicircle { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn arc_radius(&self) -> f64 {
        self.eps / (1.0 - self.eps)
    }

    /// Half-width `c` of the unscaled profile.
    pub fn unscaled_half_width(&self) -> f64 {
        ((1.0 + self.eps) / (1.0 - self.eps)).sqrt()
    }

    /// Junction abscissa `√(1-ε²)` of the unscaled profile.
    pub fn junction(&self) -> f64 {
        (1.0 - self.eps * self.eps).sqrt()
    }

    /// Unscaled profile value.
    pub fn unscaled_value(&self, xb: f64) -> f64 {
        let u = xb.abs();
        if u <= self.junction() {
            ((1.0 - u) * (1.0 + u)).sqrt()
        } else {
            let r = self.arc_radius();
            let d = (self.unscaled_half_width() - u).max(0.0);
            r - ((r - d) * (r + d)).max(0.0).sqrt()
        }
    }

    /// Unscaled profile slope.
    pub fn unscaled_slope(&self, xb: f64) -> f64 {
        let u = xb.abs();
        let s = if u <= self.junction() {
            -u / ((1.0 - u) * (1.0 + u)).sqrt()
        } else {
            let r = self.arc_radius();
            let d = (self.unscaled_half_width() - u).max(0.0);
            // d/du of r - sqrt(r² - d²) with d = c - u
            -d / ((r - d) * (r + d)).max(0.0).sqrt()
        };
        if xb < 0.0 {
            -s
        } else {
            s
        }
    }
}

impl Profile for CuspedSemicircle {
    fn half_width(&self) -> f64 {
        1.0
    }
    fn value(&self, x: f64) -> f64 {
        self.unscaled_value(self.unscaled_half_width() * x)
    }
    fn slope(&self, x: f64) -> f64 {
        let c = self.unscaled_half_width();
        c * self.unscaled_slope(c * x)
    }
}

/// Profile given by a pair of closures.
pub struct FnProfile<F, D> {
    pub half_width: f64,
    pub value: F,
    pub slope: D,
}

impl<F, D> Profile for FnProfile<F, D>
where
    F: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn half_width(&self) -> f64 {
        self.half_width
    }
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn slope(&self, x: f64) -> f64 {
        (self.slope)(x)
    }
}

/// Vertical compression `(x, s·f(x))` of another profile.
pub struct Scaled<'a, P: Profile + ?Sized> {
    pub inner: &'a P,
    pub vertical: f64,
}

impl<P: Profile + ?Sized> Profile for Scaled<'_, P> {
    fn half_width(&self) -> f64 {
        self.inner.half_width()
    }
    fn value(&self, x: f64) -> f64 {
        self.vertical * self.inner.value(x)
    }
    fn slope(&self, x: f64) -> f64 {
        self.vertical * self.inner.slope(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusped_semicircle_is_continuous_at_junction() {
        for &eps in &[0.01, 0.1, 0.2, 0.24] {
            let p = CuspedSemicircle::new(eps).unwrap();
            let xj = p.junction();
            let inner = ((1.0 - xj) * (1.0 + xj)).sqrt();
            let r = p.arc_radius();
            let d = p.unscaled_half_width() - xj;
            let outer = r - (r * r - d * d).sqrt();
            assert!((inner - eps).abs() < 1e-12);
            assert!((outer - eps).abs() < 1e-12);
            // slopes agree too: the arcs are tangent to the circle
            let s_in = -xj / inner;
            let s_out = -d / (r * r - d * d).sqrt();
            assert!((s_in - s_out).abs() < 1e-8 * s_in.abs());
            assert_eq!(p.value(1.0), 0.0);
            assert_eq!(p.slope(1.0), 0.0);
        }
        assert!(CuspedSemicircle::new(0.25).is_err());
        assert!(CuspedSemicircle::new(0.0).is_err());
    }

    #[test]
    fn gamma0_matches_closed_form() {
        let p = Gamma0;
        for &x in &[-3.0f64, -1.0, 0.0, 0.7, 2.5] {
            let f: f64 = (x.cos() + 1.0) / (2.0 * PI);
            assert!((p.value(x) - f).abs() < 1e-15);
        }
    }
}
