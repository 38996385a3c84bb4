//! Finite-difference views of the connection and metric, computed only from
//! the Kähler potential.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{kahler_potential, FluxSector, KahlerMetric, MetricMethod, ParticleConfig, StatisticsKind};
use crate::error::{Error, Result};
use crate::HBAR;

pub const DEFAULT_METRIC_STEP: f64 = 1e-3;
pub const DEFAULT_CONNECTION_STEP: f64 = 1e-5;

/// Relative Hermiticity defect above which finite differences are rejected.
const CANCELLATION_LIMIT: f64 = 1e-6;

/// Real coordinate `2i` is `x_i`, `2i + 1` is `y_i`.
struct Potential<'a> {
    base: &'a ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    steps: Vec<f64>,
}

impl Potential<'_> {
    fn eval(&self, shifts: &[(usize, f64)]) -> Result<f64> {
        let mut z = self.base.coords().to_vec();
        for &(axis, mult) in shifts {
            let d = mult * self.steps[axis / 2];
            if axis % 2 == 0 {
                z[axis / 2].re += d;
            } else {
                z[axis / 2].im += d;
            }
        }
        kahler_potential(&ParticleConfig::new(z)?, self.flux, self.kind)
    }

    /// Four-point central stencil for `d^2 K / da db` at `m` times the step.
    fn stencil(&self, a: usize, b: usize, m: f64) -> Result<f64> {
        let ha = m * self.steps[a / 2];
        let hb = m * self.steps[b / 2];
        let pp = self.eval(&[(a, m), (b, m)])?;
        let pm = self.eval(&[(a, m), (b, -m)])?;
        let mp = self.eval(&[(a, -m), (b, m)])?;
        let mm = self.eval(&[(a, -m), (b, -m)])?;
        Ok((pp - pm - mp + mm) / (4.0 * ha * hb))
    }

    /// Second partial `d^2 K / da db`: the four-point stencil at `h` and `2h`
    /// combined by one Richardson step, so the error is `O(h^4)`.
    fn second(&self, a: usize, b: usize) -> Result<f64> {
        Ok((4.0 * self.stencil(a, b, 1.0)? - self.stencil(a, b, 2.0)?) / 3.0)
    }
}

fn steps_for(config: &ParticleConfig, step: f64) -> Vec<f64> {
    config.coords().iter().map(|z| step * z.norm().max(1.0)).collect()
}

pub(super) fn metric_fd(
    config: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    step: f64,
) -> Result<KahlerMetric> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    kind.symmetry()?;
    let n = config.len();
    let pot = Potential {
        base: config,
        flux,
        kind,
        steps: steps_for(config, step),
    };
    // G_ij = (K_{x_i x_j} + K_{y_i y_j} + i (K_{y_i x_j} - K_{x_i y_j})) / 4
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            let re = pot.second(xi, xj)? + pot.second(yi, yj)?;
            let im = pot.second(yi, xj)? - pot.second(xi, yj)?;
            g[(i, j)] = Complex64::new(0.25 * re, 0.25 * im) * HBAR;
        }
    }

    let scale = g.iter().map(|x: &Complex64| x.norm()).fold(0.0, f64::max);
    let herm = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (g[(i, j)] - g[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    let residual = if scale > 0.0 { herm / scale } else { f64::INFINITY };
    if residual > CANCELLATION_LIMIT {
        return Err(Error::StepTooSmall { residual });
    }
    Ok(KahlerMetric::from_matrix(g, MetricMethod::FiniteDifference { step }))
}

/// Berry connection `(i/2) hbar dK/dz_i` with `d/dz = (d/dx - i d/dy) / 2`
/// taken by central differences of the Kähler potential.
pub fn berry_connection_fd(
    config: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    step: f64,
) -> Result<Vec<Complex64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let pot = Potential {
        base: config,
        flux,
        kind,
        steps: steps_for(config, step),
    };
    (0..config.len())
        .map(|i| {
            let h = pot.steps[i];
            let kx = (pot.eval(&[(2 * i, 1.0)])? - pot.eval(&[(2 * i, -1.0)])?) / (2.0 * h);
            let ky = (pot.eval(&[(2 * i + 1, 1.0)])? - pot.eval(&[(2 * i + 1, -1.0)])?) / (2.0 * h);
            let dz = Complex64::new(0.5 * kx, -0.5 * ky);
            Ok(Complex64::new(0.0, 0.5) * dz)
        })
        .collect()
}
