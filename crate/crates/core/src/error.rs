use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variant names are stable and double as machine-readable error names
/// (see [`Error::name`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },

    #[error("fermion Gram determinant {relative_det:e} (relative to the diagonal product) is below tolerance")]
    FermionDegenerate { relative_det: f64 },

    #[error("permanent of a {n}x{n} matrix exceeds the cap of {cap}")]
    PermanentOverCap { n: usize, cap: usize },

    #[error("finite-difference step too small: relative Hermiticity defect {residual:e} exceeds 1e-6")]
    StepTooSmall { residual: f64 },

    #[error("Liouville density is negative: det G = {det:e} at scale {scale:e}")]
    NegativeDensity { det: f64, scale: f64 },

    #[error("phase-space volume is zero")]
    ZeroVolume,

    #[error("density above maximum: alpha*rho = {alpha_rho} >= 1")]
    DensityAboveMax { alpha_rho: f64 },

    #[error("maximum density is unbounded for alpha = 0")]
    UnboundedDensity,

    #[error("entropy domain violated: {0}")]
    DomainViolation(String),

    #[error("no root bracketed for beta*(eps - mu) = {x}")]
    NoRoot { x: f64 },

    #[error("metric is singular (condition number {condition:e})")]
    SingularMetric { condition: f64 },

    #[error("integrator step failure at t = {t} (step {step:e})")]
    StepFailure { t: f64, step: f64 },

    #[error("particle {index} left the stereographic chart (|z| = {modulus:e})")]
    ChartExit { index: usize, modulus: f64 },

    #[error("fermions {i} and {j} approached to chordal distance {distance:e}")]
    CloseApproach { i: usize, j: usize, distance: f64 },
}

impl Error {
    /// The variant name, verbatim.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NonFiniteCoordinate { .. } => "NonFiniteCoordinate",
            Error::FermionDegenerate { .. } => "FermionDegenerate",
            Error::PermanentOverCap { .. } => "PermanentOverCap",
            Error::StepTooSmall { .. } => "StepTooSmall",
            Error::NegativeDensity { .. } => "NegativeDensity",
            Error::ZeroVolume => "ZeroVolume",
            Error::DensityAboveMax { .. } => "DensityAboveMax",
            Error::UnboundedDensity => "UnboundedDensity",
            Error::DomainViolation(_) => "DomainViolation",
            Error::NoRoot { .. } => "NoRoot",
            Error::SingularMetric { .. } => "SingularMetric",
            Error::StepFailure { .. } => "StepFailure",
            Error::ChartExit { .. } => "ChartExit",
            Error::CloseApproach { .. } => "CloseApproach",
        }
    }

    /// True for errors caused by bad caller input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NonFiniteCoordinate { .. }
                | Error::PermanentOverCap { .. }
                | Error::UnboundedDensity
        )
    }
}
