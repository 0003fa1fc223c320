use serde::{Deserialize, Serialize};

/// Half-integer cosine series `h(x) = Σ c_k cos((k + ½)πx/a)`.
///
/// Every basis function vanishes at `x = ±a`, so `f = h²` is non-negative
/// and pinned to the axis at both ends without any constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralForm {
    pub a: f64,
    pub coefficients: Vec<f64>,
}

impl SpectralForm {
    pub fn new(a: f64, coefficients: Vec<f64>) -> Self {
        SpectralForm { a, coefficients }
    }

    pub fn frequency(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * std::f64::consts::PI / self.a
    }

    pub fn h(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * (self.frequency(k) * x).cos())
            .sum()
    }

    pub fn dh(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let w = self.frequency(k);
                -c * w * (w * x).sin()
            })
            .sum()
    }

    pub fn d2h(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let w = self.frequency(k);
                -c * w * w * (w * x).cos()
            })
            .sum()
    }

    /// `f = h²`.
    pub fn value(&self, x: f64) -> f64 {
        self.h(x).powi(2)
    }

    /// `f' = 2 h h'`.
    pub fn slope(&self, x: f64) -> f64 {
        2.0 * self.h(x) * self.dh(x)
    }

    /// `∫ f dx = a Σ c_k²` (the basis is orthogonal on `[-a, a]`).
    pub fn area(&self) -> f64 {
        self.a * self.coefficients.iter().map(|c| c * c).sum::<f64>()
    }

    /// `∫ h'² dx = a Σ c_k² ω_k²`.
    pub fn dh_energy(&self) -> f64 {
        self.a
            * self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| (c * self.frequency(k)).powi(2))
                .sum::<f64>()
    }

    /// Isotropic dilation by `s`: `h_new(x) = √s h(x/s)`.
    pub fn dilate(&self, s: f64) -> SpectralForm {
        SpectralForm {
            a: self.a * s,
            coefficients: self.coefficients.iter().map(|c| c * s.sqrt()).collect(),
        }
    }
}

impl super::Profile for SpectralForm {
    fn half_width(&self) -> f64 {
        self.a
    }
    fn value(&self, x: f64) -> f64 {
        SpectralForm::value(self, x)
    }
    fn slope(&self, x: f64) -> f64 {
        SpectralForm::slope(self, x)
    }
}
