//! Coherent-state overlap matrix `M_kl = (1 + conj(z_k) z_l)^(2j)` in log form.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FluxSector, ParticleConfig};

/// Gram matrix of the coherent states `|z_1>, ..., |z_N>` stored entrywise as
/// `(ln|M_kl|, arg M_kl)`.
///
/// The phase of every entry is `2j * arg(1 + conj(z_k) z_l)` wrapped into
/// `(-pi, pi]`. Because `2j` is an integer the power is single-valued and no
/// complex logarithm of the final power is ever taken.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    log_magnitude: Vec<f64>,
    phase: Vec<f64>,
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn log_magnitude(&self, k: usize, l: usize) -> f64 {
        self.log_magnitude[k * self.n + l]
    }

    pub fn phase(&self, k: usize, l: usize) -> f64 {
        self.phase[k * self.n + l]
    }

    /// `M_kl` as an ordinary complex number. May overflow for large `2j`.
    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        Complex64::from_polar(self.log_magnitude(k, l).exp(), self.phase(k, l))
    }

    /// `sum_k ln M_kk`.
    pub fn log_diagonal_sum(&self) -> f64 {
        (0..self.n).map(|k| self.log_magnitude(k, k)).sum()
    }

    /// `D^{-1/2} M D^{-1/2}` with `D = diag(M)`: unit diagonal, off-diagonal
    /// moduli at most one.
    pub fn normalized(&self) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |k, l| {
            let lm = self.log_magnitude(k, l) - 0.5 * (self.log_magnitude(k, k) + self.log_magnitude(l, l));
            Complex64::from_polar(lm.exp(), self.phase(k, l))
        })
    }
}

fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Builds the log-domain Gram matrix for `config` on the sphere with `flux`.
pub fn gram_matrix(config: &ParticleConfig, flux: FluxSector) -> GramMatrix {
    let z = config.coords();
    let n = z.len();
    let p = f64::from(flux.two_j);
    let mut log_magnitude = Vec::with_capacity(n * n);
    let mut phase = Vec::with_capacity(n * n);
    for zk in z {
        for zl in z {
            if flux.two_j == 0 {
                log_magnitude.push(0.0);
                phase.push(0.0);
                continue;
            }
            let w = Complex64::new(1.0, 0.0) + zk.conj() * zl;
            log_magnitude.push(p * w.norm().ln());
            phase.push(wrap_phase(p * w.arg()));
        }
    }
    GramMatrix {
        n,
        log_magnitude,
        phase,
    }
}

/// `w^p / s` evaluated through logarithms; `s` is passed as `ln s`.
fn scaled_power(w: Complex64, p: i64, ln_scale: f64) -> Complex64 {
    if p == 0 {
        return Complex64::from_polar((-ln_scale).exp(), 0.0);
    }
    let r = w.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let pf = p as f64;
    Complex64::from_polar((pf * r.ln() - ln_scale).exp(), pf * w.arg())
}

/// Normalized Gram entries together with their Wirtinger derivatives.
///
/// With `S_kl = sqrt(M_kk M_ll)` held fixed:
/// * `m[(k,l)]  = M_kl / S_kl`
/// * `du[(k,l)] = d/dz_l M_kl / S_kl` (the only holomorphic dependence of entry `(k,l)`)
/// * `dv[(k,l)] = d/dzbar_k M_kl / S_kl`
/// * `dw[(k,l)] = d/dzbar_k d/dz_l M_kl / S_kl`
///
/// Ratios such as `dF/F` for `F = perm` or `det` are invariant under this
/// diagonal rescaling, so derivatives of `ln F(M)` can be computed from these
/// bounded quantities.
#[derive(Debug, Clone)]
pub(crate) struct GramJet {
    pub m: DMatrix<Complex64>,
    pub du: DMatrix<Complex64>,
    pub dv: DMatrix<Complex64>,
    pub dw: DMatrix<Complex64>,
}

pub(crate) fn gram_jet(config: &ParticleConfig, flux: FluxSector) -> GramJet {
    let z = config.coords();
    let n = z.len();
    let p = i64::from(flux.two_j);
    let pf = p as f64;
    let ln_diag: Vec<f64> = z.iter().map(|zk| pf * zk.norm_sqr().ln_1p()).collect();
    let one = Complex64::new(1.0, 0.0);

    let mut m = DMatrix::zeros(n, n);
    let mut du = DMatrix::zeros(n, n);
    let mut dv = DMatrix::zeros(n, n);
    let mut dw = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let ln_s = 0.5 * (ln_diag[k] + ln_diag[l]);
            let w = one + z[k].conj() * z[l];
            m[(k, l)] = scaled_power(w, p, ln_s);
            if p == 0 {
                continue;
            }
            let w1 = scaled_power(w, p - 1, ln_s);
            du[(k, l)] = pf * z[k].conj() * w1;
            dv[(k, l)] = pf * z[l] * w1;
            let mut mixed = pf * w1;
            if p >= 2 {
                let w2 = scaled_power(w, p - 2, ln_s);
                mixed += pf * (pf - 1.0) * z[k].conj() * z[l] * w2;
            }
            dw[(k, l)] = mixed;
        }
    }
    GramJet { m, du, dv, dw }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn config(z: &[(f64, f64)]) -> ParticleConfig {
        ParticleConfig::new(z.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn single_particle_at_origin() {
        let g = gram_matrix(&config(&[(0.0, 0.0)]), FluxSector::new(2));
        assert_eq!(g.entry(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_particles_real_axis() {
        let g = gram_matrix(&config(&[(0.0, 0.0), (1.0, 0.0)]), FluxSector::new(2));
        let expect = [[1.0, 1.0], [1.0, 4.0]];
        for k in 0..2 {
            for l in 0..2 {
                assert!((g.entry(k, l) - Complex64::new(expect[k][l], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn two_particles_imaginary_axis() {
        let g = gram_matrix(&config(&[(0.0, 0.0), (0.0, 1.0)]), FluxSector::new(1));
        let expect = [[1.0, 1.0], [1.0, 2.0]];
        for k in 0..2 {
            for l in 0..2 {
                assert!((g.entry(k, l) - Complex64::new(expect[k][l], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn phase_is_integer_multiple_of_principal_argument() {
        let g = gram_matrix(&config(&[(0.3, -0.2), (-1.1, 0.7)]), FluxSector::new(7));
        let w = Complex64::new(1.0, 0.0) + Complex64::new(0.3, -0.2).conj() * Complex64::new(-1.1, 0.7);
        let direct = w.powi(7);
        assert!((g.entry(0, 1) - direct).norm() < 1e-12 * direct.norm());
        assert!(g.phase(0, 1) > -std::f64::consts::PI && g.phase(0, 1) <= std::f64::consts::PI);
    }

    #[test]
    fn huge_flux_stays_finite_in_log_form() {
        let g = gram_matrix(&config(&[(1e3, 0.0), (0.0, 1e3)]), FluxSector::new(400));
        assert!(g.log_magnitude(0, 0).is_finite());
        let m = g.normalized();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(m[(0, 1)].norm() <= 1.0);
    }

    #[test]
    fn zero_flux_is_all_ones() {
        let g = gram_matrix(&config(&[(0.5, 0.0), (-2.0, 1.0)]), FluxSector::new(0));
        for k in 0..2 {
            for l in 0..2 {
                assert_eq!(g.entry(k, l), Complex64::new(1.0, 0.0));
            }
        }
    }
}
