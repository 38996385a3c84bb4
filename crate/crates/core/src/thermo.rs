//! Classical statistical mechanics when the energy depends only on `N`.
//!
//! All areas and `alpha` are in units of `h`, so densities `rho = N / A` are
//! per `h`. Two entropy routes are provided: the thermodynamic-limit form
//! (Stirling applied, `N - 1` replaced by `N`) and the exact `ln(V_N / h^N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::ln_closed_form_volume_with_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoInput {
    pub n: u64,
    /// Single-particle phase-space area `A` in units of `h`.
    pub area: f64,
    /// Classical statistics parameter in units of `h`.
    pub alpha: f64,
    pub beta: f64,
    /// `E_N = N * energy_per_particle`.
    pub energy_per_particle: f64,
}

impl ThermoInput {
    pub fn new(n: u64, area: f64, alpha: f64, beta: f64) -> Self {
        Self {
            n,
            area,
            alpha,
            beta,
            energy_per_particle: 0.0,
        }
    }

    pub fn with_energy(mut self, energy_per_particle: f64) -> Self {
        self.energy_per_particle = energy_per_particle;
        self
    }

    /// `rho = N / A`.
    pub fn density(&self) -> f64 {
        self.n as f64 / self.area
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(Error::InvalidInput(format!("area must be positive, got {}", self.area)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidInput(format!("beta must be positive, got {}", self.beta)));
        }
        if !self.energy_per_particle.is_finite() {
            return Err(Error::InvalidInput("energy per particle must be finite".into()));
        }
        Ok(())
    }

    fn ln_volume(&self) -> Result<f64> {
        ln_closed_form_volume_with_area(self.n, self.area, self.alpha).ok_or(Error::ZeroVolume)
    }
}

/// Partition function kept in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionFunction {
    pub ln_z: f64,
}

impl PartitionFunction {
    pub fn value(&self) -> f64 {
        self.ln_z.exp()
    }
}

/// `Z_N = (V_N / h^N) exp(-beta E_N)`.
pub fn partition_function(input: &ThermoInput) -> Result<PartitionFunction> {
    input.validate()?;
    let energy = input.n as f64 * input.energy_per_particle;
    Ok(PartitionFunction {
        ln_z: input.ln_volume()? - input.beta * energy,
    })
}

/// Helmholtz free energy `F = -ln Z / beta`.
pub fn free_energy(input: &ThermoInput) -> Result<f64> {
    Ok(-partition_function(input)?.ln_z / input.beta)
}

fn check_density(alpha_rho: f64) -> Result<()> {
    if alpha_rho >= 1.0 || alpha_rho.is_nan() {
        Err(Error::DensityAboveMax { alpha_rho })
    } else {
        Ok(())
    }
}

/// `S = N ln(1 - alpha rho) + N ln A - N ln N + N`.
pub fn entropy_closed(input: &ThermoInput) -> Result<f64> {
    input.validate()?;
    let n = input.n as f64;
    let alpha_rho = input.alpha * input.density();
    check_density(alpha_rho)?;
    Ok(n * (-alpha_rho).ln_1p() + n * input.area.ln() - n * n.ln() + n)
}

/// `S = ln(V_N / h^N)` with the exact volume; no Stirling approximation.
pub fn entropy_exact(input: &ThermoInput) -> Result<f64> {
    input.validate()?;
    input.ln_volume()
}

/// `S_exact - S_closed` with the `N` versus `N - 1` difference removed,
/// which leaves `-(ln N! - N ln N + N)`. Bounded in magnitude by `1 + ln N`.
pub fn stirling_gap(input: &ThermoInput) -> Result<f64> {
    let exact = entropy_exact(input)?;
    let closed = entropy_closed(input)?;
    let n = input.n as f64;
    let shift = n * ((-input.alpha * (n - 1.0) / input.area).ln_1p() - (-input.alpha * n / input.area).ln_1p());
    Ok(exact - closed - shift)
}

/// `P = rho / (beta (1 - alpha rho))`.
pub fn equation_of_state(rho: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(rho >= 0.0 && alpha >= 0.0 && beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need rho >= 0, alpha >= 0, beta > 0 (got {rho}, {alpha}, {beta})"
        )));
    }
    let alpha_rho = alpha * rho;
    check_density(alpha_rho)?;
    Ok(rho / (beta * (1.0 - alpha_rho)))
}

/// Exact-volume pressure `-dF/dA = N / (beta (A - alpha (N - 1)))`.
pub fn pressure_exact(input: &ThermoInput) -> Result<f64> {
    input.validate()?;
    input.ln_volume()?;
    let n = input.n as f64;
    Ok(n / (input.beta * (input.area - input.alpha * (n - 1.0))))
}

/// Which free energy a finite-difference pressure differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyRoute {
    /// Thermodynamic-limit entropy (`N - 1 ~ N`, Stirling).
    Closed,
    /// Exact `ln V_N`.
    Exact,
}

/// `P = -dF/dA` at fixed `(N, beta)` by a five-point central difference.
pub fn pressure_finite_difference(input: &ThermoInput, route: EntropyRoute) -> Result<f64> {
    input.validate()?;
    let free = |area: f64| -> Result<f64> {
        let shifted = ThermoInput { area, ..*input };
        let s = match route {
            EntropyRoute::Closed => entropy_closed(&shifted)?,
            EntropyRoute::Exact => entropy_exact(&shifted)?,
        };
        Ok(input.n as f64 * input.energy_per_particle - s / input.beta)
    };
    let n = input.n as f64;
    let slack = match route {
        EntropyRoute::Closed => input.area - input.alpha * n,
        EntropyRoute::Exact => input.area - input.alpha * (n - 1.0),
    };
    if slack <= 0.0 {
        free(input.area)?;
    }
    let h = 1e-3 * input.area.min(slack);
    let a = input.area;
    let dfda = (-free(a + 2.0 * h)? + 8.0 * free(a + h)? - 8.0 * free(a - h)? + free(a - 2.0 * h)?) / (12.0 * h);
    Ok(-dfda)
}

/// Incompressible density `1 / alpha`.
pub fn max_density(alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::UnboundedDensity);
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    Ok(1.0 / alpha)
}
