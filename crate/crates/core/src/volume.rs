//! N-particle phase-space volumes.
//!
//! Closed forms `V = (A - alpha (N - 1))^N / N!` for every statistics, and a
//! Monte Carlo estimate of the boson and fermion volumes obtained by
//! integrating the Liouville density `2^N det G` of the Kähler metric.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{metric, FluxSector, MetricMethod, ParticleConfig, StatisticsKind, Symmetry, PERMANENT_CAP};
use crate::{HBAR, PLANCK};

/// Minimum number of Monte Carlo samples accepted by [`mc_volume`].
pub const MIN_SAMPLES: u64 = 10_000;

/// Samples per deterministic RNG substream.
const CHUNK: u64 = 1 << 12;

/// Monte Carlo estimate of a phase-space volume in units of `h^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub n_workers: usize,
}

impl VolumeEstimate {
    /// `(mean - reference) / std_error`; zero when both the error and the
    /// deviation vanish.
    pub fn sigma_deviation(&self, reference: f64) -> f64 {
        let d = self.mean - reference;
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln V` in units of `h^N` for single-particle area `area` and statistics
/// parameter `alpha` (both in units of `h`); `None` when the volume vanishes.
pub fn ln_closed_form_volume_with_area(n: u64, area: f64, alpha: f64) -> Option<f64> {
    let free = area - alpha * (n as f64 - 1.0);
    if n == 0 || !(free > 0.0) {
        return None;
    }
    Some(n as f64 * free.ln() - ln_factorial(n))
}

/// `V = (A - alpha (N - 1))^N / N!` in units of `h^N`, clamped to zero once
/// the available area is exhausted.
pub fn closed_form_volume_with_area(n: u64, area: f64, alpha: f64) -> f64 {
    ln_closed_form_volume_with_area(n, area, alpha).map_or(0.0, f64::exp)
}

/// Closed-form volume of `n` particles of `kind` on the sphere, `A = h * 2j`.
pub fn closed_form_volume(n: u64, flux: FluxSector, kind: StatisticsKind) -> f64 {
    closed_form_volume_with_area(n, flux.area_in_h(), kind.alpha())
}

/// Rotation of the sphere by `theta` about the stereographic real axis:
/// `z -> (z cos(theta/2) + sin(theta/2)) / (-z sin(theta/2) + cos(theta/2))`.
pub fn mobius_rotation(z: Complex64, theta: f64) -> Complex64 {
    let (s, c) = (0.5 * theta).sin_cos();
    (z * c + s) / (-z * s + c)
}

/// Round-sphere density `1 / (pi (1 + |z|^2)^2)` with respect to `dx dy`.
pub fn sphere_density(z: Complex64) -> f64 {
    1.0 / (PI * (1.0 + z.norm_sqr()).powi(2))
}

/// Uniform point on the sphere, stereographically projected.
pub fn sample_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // cos(polar angle) uniform in [-1, 1); |z|^2 = (1 + c) / (1 - c)
    let c: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    Complex64::from_polar(((1.0 + c) / (1.0 - c)).sqrt(), phi)
}

/// Liouville density `2^N det G` with respect to `prod_i dx_i dy_i`.
///
/// Integrates over ordered tuples to `N! V`. Small negative determinants
/// from rounding are clamped to zero.
pub fn liouville_density(config: &ParticleConfig, flux: FluxSector, kind: StatisticsKind) -> Result<f64> {
    let g = metric(config, flux, kind, MetricMethod::Analytic)?;
    let det = g.determinant();
    let scale: f64 = config
        .coords()
        .iter()
        .map(|z| HBAR * flux.area_in_h() / (1.0 + z.norm_sqr()).powi(2))
        .product();
    if det < -1e-9 * scale {
        return Err(Error::NegativeDensity { det, scale });
    }
    Ok(2f64.powi(config.len() as i32) * det.max(0.0))
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn empty() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let d = b.mean - a.mean;
        let mean = a.mean + d * b.count as f64 / count as f64;
        let m2 = a.m2 + b.m2 + d * d * (a.count as f64) * (b.count as f64) / count as f64;
        Self { count, mean, m2 }
    }
}

/// Fixed-shape pairwise reduction, independent of how chunks were scheduled.
fn pairwise(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments::empty(),
        1 => parts[0],
        n => Moments::merge(pairwise(&parts[..n / 2]), pairwise(&parts[n / 2..])),
    }
}

/// Importance weight of one ordered configuration.
fn weight(config: &ParticleConfig, flux: FluxSector, kind: StatisticsKind) -> Result<f64> {
    match liouville_density(config, flux, kind) {
        Ok(d) => {
            let inv_p: f64 = config.coords().iter().map(|&z| 1.0 / sphere_density(z)).product();
            Ok(d * inv_p)
        }
        // the coincidence set has measure zero
        Err(Error::FermionDegenerate { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Configuration number `index` within `chunk`'s substream is drawn as
/// `n` consecutive sphere points.
fn draw_config<R: Rng>(rng: &mut R, n: usize, rotation: Option<f64>) -> Result<ParticleConfig> {
    let coords = (0..n)
        .map(|_| {
            let z = sample_sphere_point(rng);
            rotation.map_or(z, |t| mobius_rotation(z, t))
        })
        .collect();
    ParticleConfig::new(coords)
}

fn validate_mc(n: usize, flux: FluxSector, kind: StatisticsKind, samples: u64, n_workers: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let symmetry = kind.symmetry()?;
    if n > PERMANENT_CAP {
        return Err(Error::PermanentOverCap { n, cap: PERMANENT_CAP });
    }
    if symmetry == Symmetry::Antisymmetric && n as u32 > flux.lll_dimension() {
        return Err(Error::InvalidInput(format!(
            "{n} fermions exceed the {} available lowest-Landau-level states",
            flux.lll_dimension()
        )));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if n_workers == 0 {
        return Err(Error::InvalidInput("need at least one worker".into()));
    }
    Ok(())
}

/// Monte Carlo phase-space volume of `n` bosons or fermions, in units of `h^N`.
///
/// Each particle is drawn independently from the round-sphere density and
/// the estimator is `2^N det G / prod p(z_i)`, divided by `N! h^N`. Samples
/// are split into fixed-size chunks, each with its own ChaCha substream of
/// `seed`; per-chunk moments are merged by a fixed pairwise tree, so the
/// result is bit-identical for any `n_workers`.
pub fn mc_volume(
    n: usize,
    flux: FluxSector,
    kind: StatisticsKind,
    samples: u64,
    seed: u64,
    n_workers: usize,
) -> Result<VolumeEstimate> {
    mc_volume_inner(n, flux, kind, samples, seed, n_workers, None)
}

/// As [`mc_volume`] but every sampled point is first moved by
/// [`mobius_rotation`] with angle `theta`. The sampling density is
/// rotation invariant, so the estimate must be statistically unchanged.
pub fn mc_volume_rotated(
    n: usize,
    flux: FluxSector,
    kind: StatisticsKind,
    samples: u64,
    seed: u64,
    n_workers: usize,
    theta: f64,
) -> Result<VolumeEstimate> {
    mc_volume_inner(n, flux, kind, samples, seed, n_workers, Some(theta))
}

fn mc_volume_inner(
    n: usize,
    flux: FluxSector,
    kind: StatisticsKind,
    samples: u64,
    seed: u64,
    n_workers: usize,
    rotation: Option<f64>,
) -> Result<VolumeEstimate> {
    validate_mc(n, flux, kind, samples, n_workers)?;
    let n_chunks = samples.div_ceil(CHUNK) as usize;
    let next = AtomicUsize::new(0);

    let run_chunk = |c: usize| -> Result<Moments> {
        let mut rng = chunk_rng(seed, c as u64);
        let len = CHUNK.min(samples - c as u64 * CHUNK);
        let mut m = Moments::empty();
        for _ in 0..len {
            let config = draw_config(&mut rng, n, rotation)?;
            m.push(weight(&config, flux, kind)?);
        }
        Ok(m)
    };

    let workers = n_workers.min(n_chunks).max(1);
    let mut results: Vec<Option<Result<Moments>>> = vec![None; n_chunks];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let c = next.fetch_add(1, Ordering::Relaxed);
                        if c >= n_chunks {
                            break;
                        }
                        done.push((c, run_chunk(c)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (c, r) in h.join().expect("Monte Carlo worker panicked") {
                results[c] = Some(r);
            }
        }
    });

    let parts = results
        .into_iter()
        .map(|r| r.expect("every chunk is processed"))
        .collect::<Result<Vec<_>>>()?;
    let total = pairwise(&parts);
    let norm = (ln_factorial(n as u64) + n as f64 * PLANCK.ln()).exp();
    let variance = if total.count > 1 {
        total.m2 / (total.count - 1) as f64
    } else {
        0.0
    };
    Ok(VolumeEstimate {
        mean: total.mean / norm,
        std_error: (variance / total.count as f64).sqrt() / norm,
        samples,
        seed,
        n_workers,
    })
}

/// Number of random configurations examined by [`filled_level_check`].
pub const FILLED_LEVEL_CONFIGS: usize = 100;

/// Largest `|det G|` over random configurations of `2j + 1` fermions, which
/// fill the lowest Landau level. The phase space is a single point there, so
/// the result should vanish up to rounding.
pub fn filled_level_check(flux: FluxSector) -> f64 {
    filled_level_check_seeded(flux, FILLED_LEVEL_CONFIGS, 0)
}

pub fn filled_level_check_seeded(flux: FluxSector, configs: usize, seed: u64) -> f64 {
    max_abs_metric_det(flux, flux.lll_dimension() as usize, configs, seed)
}

/// Largest `|det G|` over `configs` random fermion configurations of `n`
/// particles. Degenerate draws are redrawn.
pub fn max_abs_metric_det(flux: FluxSector, n: usize, configs: usize, seed: u64) -> f64 {
    let mut rng = chunk_rng(seed, u64::MAX);
    let mut best: f64 = 0.0;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < configs && attempts < 100 * configs.max(1) {
        attempts += 1;
        let Ok(config) = draw_config(&mut rng, n, None) else {
            continue;
        };
        match metric(&config, flux, StatisticsKind::Fermion, MetricMethod::Analytic) {
            Ok(g) => {
                best = best.max(g.determinant().abs());
                accepted += 1;
            }
            Err(_) => continue,
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_forms() {
        let f2 = FluxSector::new(2);
        assert!((closed_form_volume(2, f2, StatisticsKind::Boson) - 2.0).abs() < 1e-14);
        assert!((closed_form_volume(2, f2, StatisticsKind::Fermion) - 0.5).abs() < 1e-14);
        assert_eq!(closed_form_volume(3, f2, StatisticsKind::Fermion), 0.0);
        assert!((closed_form_volume(2, f2, StatisticsKind::Anyon(1.0 / 3.0)) - 25.0 / 18.0).abs() < 1e-14);
        assert!((closed_form_volume(3, FluxSector::new(4), StatisticsKind::Fermion) - 8.0 / 6.0).abs() < 1e-13);
        assert_eq!(closed_form_volume_with_area(4, 2.0, 1.0), 0.0);
        assert_eq!(ln_closed_form_volume_with_area(2, 2.0, 2.0), None);
    }

    #[test]
    fn anyon_endpoints_match_boson_and_fermion() {
        for two_j in 1..6 {
            let f = FluxSector::new(two_j);
            for n in 1..4 {
                assert_eq!(
                    closed_form_volume(n, f, StatisticsKind::Anyon(0.0)),
                    closed_form_volume(n, f, StatisticsKind::Boson)
                );
                assert_eq!(
                    closed_form_volume(n, f, StatisticsKind::Anyon(1.0)),
                    closed_form_volume(n, f, StatisticsKind::Fermion)
                );
            }
        }
    }

    #[test]
    fn single_particle_density() {
        let z = c(0.4, -1.5);
        let d = liouville_density(
            &ParticleConfig::new(vec![z]).unwrap(),
            FluxSector::new(2),
            StatisticsKind::Boson,
        )
        .unwrap();
        assert!((d - 2.0 * 2.0 / (1.0 + z.norm_sqr()).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn fermion_density_vanishes_at_coincidence() {
        let flux = FluxSector::new(3);
        let z = c(0.3, 0.2);
        let mut last = f64::INFINITY;
        for k in 1..6 {
            let eps = 10f64.powi(-k);
            let cfg = ParticleConfig::new(vec![z, z + c(eps, 0.0)]).unwrap();
            let d = liouville_density(&cfg, flux, StatisticsKind::Fermion).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn far_bosons_factorize() {
        let flux = FluxSector::new(8);
        let (a, b) = (c(0.0, 0.0), c(30.0, 10.0));
        let pair = liouville_density(&ParticleConfig::new(vec![a, b]).unwrap(), flux, StatisticsKind::Boson).unwrap();
        let one = |z| liouville_density(&ParticleConfig::new(vec![z]).unwrap(), flux, StatisticsKind::Boson).unwrap();
        let prod = one(a) * one(b);
        assert!((pair / prod - 1.0).abs() < 0.01, "{pair} vs {prod}");
    }

    #[test]
    fn sphere_sampler_covers_hemispheres_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inside = (0..20000)
            .filter(|_| sample_sphere_point(&mut rng).norm() < 1.0)
            .count();
        assert!((inside as f64 / 20000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn rotation_is_an_isometry_of_the_sphere_density() {
        // |dz'/dz|^2 p(z') = p(z)
        let theta = 0.9;
        let z = c(0.7, -0.2);
        let h = 1e-6;
        let dz = (mobius_rotation(z + h, theta) - mobius_rotation(z - h, theta)) / (2.0 * h);
        let lhs = dz.norm_sqr() * sphere_density(mobius_rotation(z, theta));
        assert!((lhs / sphere_density(z) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mc_rejects_bad_parameters() {
        let f = FluxSector::new(2);
        assert!(mc_volume(2, f, StatisticsKind::Boson, 10, 0, 1).is_err());
        assert!(mc_volume(4, f, StatisticsKind::Fermion, 20_000, 0, 1).is_err());
        assert!(mc_volume(2, f, StatisticsKind::Anyon(0.5), 20_000, 0, 1).is_err());
        assert!(mc_volume(2, f, StatisticsKind::Boson, 20_000, 0, 0).is_err());
        assert!(matches!(
            mc_volume(15, FluxSector::new(20), StatisticsKind::Boson, 20_000, 0, 1),
            Err(Error::PermanentOverCap { .. })
        ));
    }

    #[test]
    fn mc_is_worker_count_independent() {
        let f = FluxSector::new(2);
        let a = mc_volume(2, f, StatisticsKind::Fermion, 20_000, 7, 1).unwrap();
        let b = mc_volume(2, f, StatisticsKind::Fermion, 20_000, 7, 3).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_volume(2, f, StatisticsKind::Fermion, 20_000, 8, 3).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn filled_level_is_flat() {
        assert!(filled_level_check(FluxSector::new(1)) <= 1e-8);
        assert!(filled_level_check(FluxSector::new(2)) <= 1e-8 * 8.0);
        assert!(max_abs_metric_det(FluxSector::new(2), 2, 100, 0) > 1e-3);
    }
}
