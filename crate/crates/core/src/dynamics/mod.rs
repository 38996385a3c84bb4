//! Classical motion on the constrained manifold.
//!
//! The flow is `dz_i/dt = {z_i, V} = -i sum_j (G^{-1})_ij dV/dzbar_j` in
//! `hbar = 1` units, integrated on the real coordinates `(x_i, y_i)`.

mod rk45;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, FluxSector, KahlerMetric, MetricMethod, ParticleConfig, StatisticsKind, Symmetry};

/// Overall phase of the bracket kernel. Fixed by the single-particle
/// precession oracle: with `G = 2j/(1+|z|^2)^2` and the latitude potential
/// this gives `dz/dt = -i lambda z / 2j`, a uniform rotation at `lambda / 2j`.
pub const BRACKET_PHASE: Complex64 = Complex64::new(0.0, -1.0);

/// Brackets and flows refuse metrics at or above this condition number.
pub const MAX_CONDITION: f64 = 1e12;

/// Fermion runs abort below this chordal separation.
pub const MIN_FERMION_SEPARATION: f64 = 1e-3;

/// Particles beyond this modulus have left the useful part of the chart.
pub const CHART_LIMIT: f64 = 1e6;

/// Shape of a two-body interaction as a function of `u = d^2`, where `d` is
/// the chordal distance (`0 <= u <= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialLaw {
    /// `f = u`
    Harmonic,
    /// `f = 1 / d`
    Coulomb,
    /// `f = exp(-u / width^2)`
    Gaussian { width: f64 },
}

impl RadialLaw {
    fn value_and_slope(&self, u: f64) -> (f64, f64) {
        match *self {
            RadialLaw::Harmonic => (u, 1.0),
            RadialLaw::Coulomb => {
                let f = u.sqrt().recip();
                (f, -0.5 * f / u)
            }
            RadialLaw::Gaussian { width } => {
                let w2 = width * width;
                let f = (-u / w2).exp();
                (f, -f / w2)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PotentialSpec {
    Zero,
    /// `V = lambda sum_i |z_i|^2 / (1 + |z_i|^2)`.
    Latitude(f64),
    /// `V = strength sum_{i<j} f(d_ij^2)`.
    PairwiseRadial {
        law: RadialLaw,
        strength: f64,
    },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PotentialSpec::Zero => true,
            PotentialSpec::Latitude(l) => l.is_finite(),
            PotentialSpec::PairwiseRadial { law, strength } => {
                strength.is_finite()
                    && match law {
                        RadialLaw::Gaussian { width } => width.is_finite() && width > 0.0,
                        _ => true,
                    }
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid potential parameters: {self:?}")))
        }
    }

    pub fn energy(&self, config: &ParticleConfig) -> f64 {
        let z = config.coords();
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Latitude(lambda) => {
                lambda * z.iter().map(|w| w.norm_sqr() / (1.0 + w.norm_sqr())).sum::<f64>()
            }
            PotentialSpec::PairwiseRadial { law, strength } => {
                let mut v = 0.0;
                for i in 0..z.len() {
                    for j in 0..i {
                        v += law.value_and_slope(chordal_sq(z[i], z[j])).0;
                    }
                }
                strength * v
            }
        }
    }

    /// `dV/dzbar_i` for every particle.
    pub fn antiholomorphic_gradient(&self, config: &ParticleConfig) -> Vec<Complex64> {
        let z = config.coords();
        let n = z.len();
        match *self {
            PotentialSpec::Zero => vec![Complex64::new(0.0, 0.0); n],
            PotentialSpec::Latitude(lambda) => z.iter().map(|&w| w * (lambda / (1.0 + w.norm_sqr()).powi(2))).collect(),
            PotentialSpec::PairwiseRadial { law, strength } => {
                let mut grad = vec![Complex64::new(0.0, 0.0); n];
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let (a, b) = (z[i], z[j]);
                        let slope = law.value_and_slope(chordal_sq(a, b)).1;
                        // d u / d abar = (a - b)(1 + bbar a) / ((1 + |a|^2)^2 (1 + |b|^2))
                        let du = (a - b) * (1.0 + b.conj() * a) / ((1.0 + a.norm_sqr()).powi(2) * (1.0 + b.norm_sqr()));
                        grad[i] += du * (strength * slope);
                    }
                }
                grad
            }
        }
    }
}

fn chordal_sq(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm_sqr() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr()))
}

/// Wirtinger gradient `(dF/dz_i, dF/dzbar_i)` of a function on configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub holomorphic: Vec<Complex64>,
    pub antiholomorphic: Vec<Complex64>,
}

impl Gradient {
    /// Gradient of a real function given `dF/dzbar`; `dF/dz` is its conjugate.
    pub fn of_real(antiholomorphic: Vec<Complex64>) -> Self {
        Self {
            holomorphic: antiholomorphic.iter().map(|c| c.conj()).collect(),
            antiholomorphic,
        }
    }
}

fn checked_inverse(metric: &KahlerMetric) -> Result<DMatrix<Complex64>> {
    let condition = metric.condition_number();
    if !(condition < MAX_CONDITION) {
        return Err(Error::SingularMetric { condition });
    }
    metric.inverse().ok_or(Error::SingularMetric { condition })
}

fn kernel(ginv: &DMatrix<Complex64>, a: &[Complex64], b_bar: &[Complex64]) -> Complex64 {
    let v = ginv * DVector::from_column_slice(b_bar);
    BRACKET_PHASE * a.iter().zip(v.iter()).map(|(x, y)| x * y).sum::<Complex64>()
}

fn check_lengths(metric: &KahlerMetric, slices: &[&[Complex64]]) -> Result<()> {
    if slices.iter().any(|s| s.len() != metric.dim()) {
        return Err(Error::InvalidInput(format!(
            "gradients must have length {}",
            metric.dim()
        )));
    }
    Ok(())
}

/// Holomorphic–antiholomorphic block `-i sum_ij (G^{-1})_ij dA/dz_i dB/dzbar_j`.
pub fn poisson_bracket(grad_a: &[Complex64], grad_b_bar: &[Complex64], metric: &KahlerMetric) -> Result<Complex64> {
    check_lengths(metric, &[grad_a, grad_b_bar])?;
    Ok(kernel(&checked_inverse(metric)?, grad_a, grad_b_bar))
}

/// Full antisymmetric bracket
/// `-i sum_ij (G^{-1})_ij (dA/dz_i dB/dzbar_j - dB/dz_i dA/dzbar_j)`,
/// real whenever `A` and `B` are.
pub fn poisson_bracket_full(a: &Gradient, b: &Gradient, metric: &KahlerMetric) -> Result<Complex64> {
    check_lengths(
        metric,
        &[&a.holomorphic, &a.antiholomorphic, &b.holomorphic, &b.antiholomorphic],
    )?;
    let ginv = checked_inverse(metric)?;
    Ok(kernel(&ginv, &a.holomorphic, &b.antiholomorphic) - kernel(&ginv, &b.holomorphic, &a.antiholomorphic))
}

fn velocity(
    config: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    potential: &PotentialSpec,
) -> Result<Vec<Complex64>> {
    let g = geometry::metric(config, flux, kind, MetricMethod::Analytic)?;
    let ginv = checked_inverse(&g)?;
    let rhs = ginv * DVector::from_vec(potential.antiholomorphic_gradient(config));
    Ok(rhs.iter().map(|x| BRACKET_PHASE * x).collect())
}

/// `dz_i/dt = {z_i, V}`.
pub fn eom_rhs(
    config: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    potential: &PotentialSpec,
) -> Result<Vec<Complex64>> {
    kind.symmetry()?;
    potential.validate()?;
    velocity(config, flux, kind, potential)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ParticleConfig>,
    pub energies: Vec<f64>,
    /// `max_t |V(t) - V(0)|`.
    pub invariant_drift: f64,
    /// Allowed drift `10 tol t_end |V(0)| + 1e-12`.
    pub energy_budget: f64,
}

impl Trajectory {
    pub fn within_budget(&self) -> bool {
        self.invariant_drift <= self.energy_budget
    }
}

fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn to_complex(y: &[f64]) -> Vec<Complex64> {
    y.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn check_state(config: &ParticleConfig, symmetry: Symmetry) -> Result<()> {
    for (index, z) in config.coords().iter().enumerate() {
        let modulus = z.norm();
        if modulus > CHART_LIMIT {
            return Err(Error::ChartExit { index, modulus });
        }
    }
    if symmetry == Symmetry::Antisymmetric && config.len() > 1 {
        let (distance, i, j) = config.min_chordal_distance();
        if distance < MIN_FERMION_SEPARATION {
            return Err(Error::CloseApproach { i, j, distance });
        }
    }
    Ok(())
}

/// Integrates the flow to `t_end`, recording every accepted step.
pub fn integrate(
    config0: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    potential: &PotentialSpec,
    t_end: f64,
    tolerance: f64,
) -> Result<Trajectory> {
    integrate_sampled(config0, flux, kind, potential, t_end, tolerance, None)
}

/// As [`integrate`]; with `Some(stride)` only the states at multiples of
/// `stride` (and at `t_end`) are recorded, and the integrator lands on them exactly.
pub fn integrate_sampled(
    config0: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    potential: &PotentialSpec,
    t_end: f64,
    tolerance: f64,
    stride: Option<f64>,
) -> Result<Trajectory> {
    let symmetry = kind.symmetry()?;
    potential.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_end must be finite and >= 0, got {t_end}"
        )));
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1), got {tolerance}"
        )));
    }
    let stops: Vec<f64> = match stride {
        Some(s) if !(s > 0.0 && s.is_finite()) => {
            return Err(Error::InvalidInput(format!("stride must be positive, got {s}")));
        }
        Some(s) => {
            let count = (t_end / s).floor() as usize;
            let mut v: Vec<f64> = (1..=count).map(|k| k as f64 * s).filter(|&t| t < t_end).collect();
            v.push(t_end);
            v
        }
        None => Vec::new(),
    };
    check_state(config0, symmetry)?;

    let v0 = potential.energy(config0);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![config0.clone()],
        energies: vec![v0],
        invariant_drift: 0.0,
        energy_budget: 10.0 * tolerance * t_end * v0.abs() + 1e-12,
    };
    if t_end == 0.0 {
        return Ok(traj);
    }

    let rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let config = ParticleConfig::new(to_complex(y))?;
        Ok(to_real(&velocity(&config, flux, kind, potential)?))
    };
    let stepper = rk45::Stepper {
        rtol: tolerance,
        atol: tolerance,
    };
    stepper.run(rhs, 0.0, &to_real(config0.coords()), t_end, &stops, |step, at_stop| {
        let config = ParticleConfig::new(to_complex(step.y))?;
        check_state(&config, symmetry)?;
        let v = potential.energy(&config);
        traj.invariant_drift = traj.invariant_drift.max((v - v0).abs());
        if stride.is_none() || at_stop {
            traj.times.push(step.t);
            traj.states.push(config);
            traj.energies.push(v);
        }
        Ok(())
    })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(z: &[Complex64]) -> ParticleConfig {
        ParticleConfig::new(z.to_vec()).unwrap()
    }

    #[test]
    fn single_particle_bracket() {
        let z = c(0.7, -0.4);
        let config = cfg(&[z]);
        let g = geometry::metric(
            &config,
            FluxSector::new(3),
            StatisticsKind::Boson,
            MetricMethod::Analytic,
        )
        .unwrap();
        let expect = c(0.0, -1.0) * (1.0 + z.norm_sqr()).powi(2) / 3.0;
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let block = poisson_bracket(&[one], &[one], &g).unwrap();
        assert!((block - expect).norm() < 1e-12);
        let zz = Gradient {
            holomorphic: vec![one],
            antiholomorphic: vec![zero],
        };
        let zbar = Gradient {
            holomorphic: vec![zero],
            antiholomorphic: vec![one],
        };
        assert!((poisson_bracket_full(&zz, &zbar, &g).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn latitude_precession_rhs() {
        for &z in &[c(0.3, 0.2), c(-2.0, 1.5), c(0.0, 0.0)] {
            let v = eom_rhs(
                &cfg(&[z]),
                FluxSector::new(4),
                StatisticsKind::Boson,
                &PotentialSpec::Latitude(2.0),
            )
            .unwrap();
            let expect = c(0.0, -1.0) * z * (2.0 / 4.0);
            assert!((v[0] - expect).norm() < 1e-12 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn zero_potential_is_static() {
        let config = cfg(&[c(0.1, 0.2), c(-1.0, 0.5)]);
        let t = integrate(
            &config,
            FluxSector::new(3),
            StatisticsKind::Fermion,
            &PotentialSpec::Zero,
            5.0,
            1e-8,
        )
        .unwrap();
        assert!(t.states.iter().all(|s| s == &config));
    }

    #[test]
    fn far_bosons_precess_independently() {
        let (a, b) = (c(0.02, 0.01), c(40.0, -30.0));
        let v = eom_rhs(
            &cfg(&[a, b]),
            FluxSector::new(8),
            StatisticsKind::Boson,
            &PotentialSpec::Latitude(1.0),
        )
        .unwrap();
        for (vi, zi) in v.iter().zip([a, b]) {
            let single = c(0.0, -1.0) * zi / 8.0;
            assert!((vi - single).norm() < 0.01 * single.norm());
        }
    }

    #[test]
    fn one_period_returns() {
        let z0 = c(0.8, -0.3);
        let lambda = 1.5;
        let two_j = 2.0;
        let period = 2.0 * PI * two_j / lambda;
        let t = integrate(
            &cfg(&[z0]),
            FluxSector::new(2),
            StatisticsKind::Boson,
            &PotentialSpec::Latitude(lambda),
            period,
            1e-10,
        )
        .unwrap();
        let last = t.states.last().unwrap().coords()[0];
        assert!((last - z0).norm() < 1e-6);
        for s in &t.states {
            assert!((s.coords()[0].norm() - z0.norm()).abs() < 1e-8);
        }
        assert!(t.within_budget());
    }

    #[test]
    fn pairwise_gradient_matches_finite_difference() {
        let z = [c(0.3, -0.1), c(-0.5, 0.7), c(1.2, 0.4)];
        for law in [
            RadialLaw::Harmonic,
            RadialLaw::Coulomb,
            RadialLaw::Gaussian { width: 0.5 },
        ] {
            let pot = PotentialSpec::PairwiseRadial { law, strength: 0.7 };
            let grad = pot.antiholomorphic_gradient(&cfg(&z));
            let h = 1e-6;
            for i in 0..3 {
                let shift = |d: Complex64| {
                    let mut w = z.to_vec();
                    w[i] += d;
                    pot.energy(&cfg(&w))
                };
                let vx = (shift(c(h, 0.0)) - shift(c(-h, 0.0))) / (2.0 * h);
                let vy = (shift(c(0.0, h)) - shift(c(0.0, -h))) / (2.0 * h);
                let fd = c(0.5 * vx, 0.5 * vy);
                assert!((grad[i] - fd).norm() < 1e-7, "{law:?} {i}");
            }
        }
    }

    #[test]
    fn fermion_close_approach_aborts() {
        let config = cfg(&[c(0.1, 0.0), c(0.1 + 1e-4, 0.0)]);
        let r = integrate(
            &config,
            FluxSector::new(3),
            StatisticsKind::Fermion,
            &PotentialSpec::Latitude(1.0),
            1.0,
            1e-8,
        );
        assert!(matches!(
            r,
            Err(Error::CloseApproach { i: 1, j: 0, .. }) | Err(Error::CloseApproach { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn chart_exit() {
        let config = cfg(&[c(2e6, 0.0)]);
        let r = integrate(
            &config,
            FluxSector::new(1),
            StatisticsKind::Boson,
            &PotentialSpec::Zero,
            1.0,
            1e-8,
        );
        assert!(matches!(r, Err(Error::ChartExit { index: 0, .. })));
    }

    #[test]
    fn sampled_output_lands_on_stride() {
        let t = integrate_sampled(
            &cfg(&[c(0.5, 0.0)]),
            FluxSector::new(1),
            StatisticsKind::Boson,
            &PotentialSpec::Latitude(1.0),
            1.0,
            1e-9,
            Some(0.25),
        )
        .unwrap();
        assert_eq!(t.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        for (time, s) in t.times.iter().zip(&t.states) {
            let expect = c(0.5, 0.0) * Complex64::from_polar(1.0, -time);
            assert!((s.coords()[0] - expect).norm() < 1e-8);
        }
    }
}
