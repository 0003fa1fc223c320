//! Numerical shape optimization for two-dimensional nematic droplets
//! (tactoids) with tangential anchoring.
//!
//! The droplet occupies the region between the base segment `[-a, a]` and a
//! positive graph `y = f(x)`; the director angle `Θ` is harmonic inside,
//! vanishes on the base and is tangent to the curve. The energy
//! `E(Γ) = ∫|∇Θ|² + l(Γ)` is minimized at fixed area.

pub mod asymptotics;
pub mod cli;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod field;
pub mod geometry;
pub mod numerics;
pub mod optimize;
pub mod plot;

pub use error::{Error, Result};
