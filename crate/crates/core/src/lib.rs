//! Classical exclusion statistics.
//!
//! Coherent-state Kähler geometry of identical lowest-Landau-level particles,
//! Monte Carlo and closed-form phase-space volumes, the resulting classical
//! thermodynamics, Haldane exclusion entropy with its classical double-scaling
//! limit, and Poisson-bracket dynamics on the constrained manifold.
//!
//! Units: `hbar = 1` and `h = 2 pi` internally. Volumes are reported in units
//! of `h^N`, areas and statistics parameters `alpha` in units of `h`, and
//! entropies are dimensionless.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exclusion;
pub mod geometry;
pub mod thermo;
pub mod volume;

pub use error::{Error, Result};

/// Reduced Planck constant.
pub const HBAR: f64 = 1.0;
/// Planck constant `h = 2 pi hbar`.
pub const PLANCK: f64 = 2.0 * std::f64::consts::PI * HBAR;

/// Library version string reported in CLI provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
