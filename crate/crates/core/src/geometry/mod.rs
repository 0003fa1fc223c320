//! Curve representations and measure quantities.
//!
//! A droplet is described by its upper boundary `Γ`, a positive graph over
//! the base segment `[-a, a]`. [`GraphCurve`] is the sampled form used by the
//! field solver and the optimizer; [`ParametricCurve`] is the arc-length
//! sampled form consumed by the diagnostics.

mod graph;
pub mod io;
mod parametric;
mod profile;
mod spectral;

pub use graph::{BoundaryTrace, Domain, GraphCurve, Grid};
pub use parametric::{hausdorff_distance, ParametricCurve, Point};
pub use profile::{
    CosineBump, CuspedSemicircle, FnProfile, Gamma0, Parabola, Profile, Scaled, Semicircle,
};
pub use spectral::SpectralForm;
