//! Kähler geometry of N identical lowest-Landau-level particles on the sphere.
//!
//! A configuration is a list of stereographic coordinates `z_i`. The
//! symmetrized (bosons) or antisymmetrized (fermions) product of spin
//! coherent states has squared inverse normalization equal to the permanent
//! or determinant of the Gram matrix `M_kl = (1 + conj(z_k) z_l)^(2j)`. Its
//! logarithm is the Kähler potential `K`; the Berry connection and the metric
//! `G_ij = d/dzbar_i d/dz_j K` follow from derivatives of `ln perm M` or
//! `ln det M`.
//!
//! Conventions: `hbar = 1`, `h = 2 pi`. The field strength is `f = i G`.

mod finite_diff;
mod gram;
mod newton;
mod permanent;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{HBAR, PLANCK};
use newton::NewtonFrame;

pub use finite_diff::{berry_connection_fd, DEFAULT_CONNECTION_STEP, DEFAULT_METRIC_STEP};
pub use gram::{gram_matrix, GramMatrix};
pub use permanent::{ryser, Dual, HyperDual, RingElement, PERMANENT_CAP};

pub(crate) use gram::{gram_jet, GramJet};

/// Relative threshold on `det M / prod M_kk` below which fermions are degenerate.
pub const FERMION_DET_TOLERANCE: f64 = 1e-12;

/// Number of flux quanta `2j` through the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FluxSector {
    pub two_j: u32,
}

impl FluxSector {
    pub const fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn j(&self) -> f64 {
        0.5 * f64::from(self.two_j)
    }

    /// Dimension `2j + 1` of the lowest Landau level.
    pub fn lll_dimension(&self) -> u32 {
        self.two_j + 1
    }

    pub fn hbar(&self) -> f64 {
        HBAR
    }

    /// Single-particle phase-space area in units of `h`, i.e. `2j`.
    pub fn area_in_h(&self) -> f64 {
        f64::from(self.two_j)
    }
}

/// Single-particle phase-space area `A = h * 2j` (absolute units, `hbar = 1`).
///
/// Equal to the integral of the one-particle Liouville density
/// `2 G(z) = 2 * 2j / (1 + |z|^2)^2` over the plane.
pub fn single_particle_area(flux: FluxSector) -> f64 {
    PLANCK * flux.area_in_h()
}

/// Ordered list of stereographic coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfig {
    coords: Vec<Complex64>,
}

impl ParticleConfig {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput(
                "a configuration needs at least one particle".into(),
            ));
        }
        if let Some(index) = coords.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteCoordinate { index });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    /// Applies `f` to every coordinate.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.coords.iter().map(|&z| f(z)).collect())
    }

    /// Smallest chordal distance between two particles on the unit-diameter
    /// sphere, `|z_i - z_j| / sqrt((1 + |z_i|^2)(1 + |z_j|^2))`. Infinite for
    /// a single particle.
    pub fn min_chordal_distance(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..self.coords.len() {
            for j in i + 1..self.coords.len() {
                let d = chordal_distance(self.coords[i], self.coords[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }
}

pub fn chordal_distance(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
}

/// Statistics of the particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StatisticsKind {
    Boson,
    Fermion,
    /// Exchange phase `nu * pi`.
    Anyon(f64),
    /// Classical exclusion parameter `g` (vortices have `g = 4 pi mu`).
    ExclusionG(f64),
}

/// Exchange symmetry of an explicitly normalizable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl StatisticsKind {
    /// Classical statistics parameter in units of `h`.
    pub fn alpha(&self) -> f64 {
        match *self {
            StatisticsKind::Boson => 0.0,
            StatisticsKind::Fermion => 1.0,
            StatisticsKind::Anyon(nu) => nu,
            StatisticsKind::ExclusionG(g) => g,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StatisticsKind::Anyon(x) | StatisticsKind::ExclusionG(x) if !(x >= 0.0 && x.is_finite()) => Err(
                Error::InvalidInput(format!("statistics parameter must be finite and >= 0, got {x}")),
            ),
            _ => Ok(()),
        }
    }

    /// Bosons and fermions (and the anyon endpoints `nu = 0, 1`) have a
    /// known normalization; everything else does not.
    pub fn symmetry(&self) -> Result<Symmetry> {
        match *self {
            StatisticsKind::Boson | StatisticsKind::Anyon(0.0) => Ok(Symmetry::Symmetric),
            StatisticsKind::Fermion | StatisticsKind::Anyon(1.0) => Ok(Symmetry::Antisymmetric),
            other => Err(Error::InvalidInput(format!(
                "no explicit normalization is available for {other:?}; only bosons and fermions"
            ))),
        }
    }
}

/// Which route produced a [`KahlerMetric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MetricMethod {
    Analytic,
    /// Central differences of the Kähler potential; `step` is relative to
    /// `max(1, |z_i|)`.
    FiniteDifference {
        step: f64,
    },
}

impl MetricMethod {
    pub fn finite_difference() -> Self {
        MetricMethod::FiniteDifference {
            step: DEFAULT_METRIC_STEP,
        }
    }
}

/// Hermitian matrix `G_ij = d/dzbar_i d/dz_j K` in units of `hbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerMetric {
    matrix: DMatrix<Complex64>,
    method: MetricMethod,
}

impl KahlerMetric {
    /// Wraps `matrix` after forcing exact Hermiticity.
    pub fn from_matrix(matrix: DMatrix<Complex64>, method: MetricMethod) -> Self {
        let herm = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Self { matrix: herm, method }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn method(&self) -> MetricMethod {
        self.method
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real determinant (imaginary part is roundoff for a Hermitian matrix).
    pub fn determinant(&self) -> f64 {
        self.matrix.clone().lu().determinant().re
    }

    /// Ascending real eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `lambda_max / lambda_min`, infinite if the smallest eigenvalue is not positive.
    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    pub fn inverse(&self) -> Option<DMatrix<Complex64>> {
        self.matrix.clone().try_inverse()
    }

    /// Two-form components `omega = -f_{zbar_i z_j} dzbar_i ^ dz_j = -i G_ij dzbar_i ^ dz_j`.
    pub fn symplectic_components(&self) -> DMatrix<Complex64> {
        self.matrix.map(|g| Complex64::new(0.0, -1.0) * g)
    }

    /// Field strength `f_{zbar_i z_j} = i G_ij`.
    pub fn field_strength(&self) -> DMatrix<Complex64> {
        self.matrix.map(|g| Complex64::new(0.0, 1.0) * g)
    }
}

fn check_permanent_size(n: usize) -> Result<()> {
    if n > PERMANENT_CAP {
        Err(Error::PermanentOverCap { n, cap: PERMANENT_CAP })
    } else {
        Ok(())
    }
}

fn fermion_determinant(m: &DMatrix<Complex64>) -> Result<f64> {
    // m has unit diagonal, so the tolerance is relative to prod M_kk.
    let det = m.clone().lu().determinant().re;
    if det.is_nan() || det <= FERMION_DET_TOLERANCE {
        return Err(Error::FermionDegenerate { relative_det: det });
    }
    Ok(det)
}

fn boson_permanent(m: &DMatrix<Complex64>) -> f64 {
    ryser::<Complex64, _>(m.nrows(), |r, c| m[(r, c)]).re
}

/// `ln |N|^{-2}`: log permanent (bosons) or log determinant (fermions) of the Gram matrix.
pub fn log_norm(gram: &GramMatrix, kind: StatisticsKind) -> Result<f64> {
    let m = gram.normalized();
    let scaled = match kind.symmetry()? {
        Symmetry::Symmetric => {
            check_permanent_size(gram.len())?;
            boson_permanent(&m)
        }
        Symmetry::Antisymmetric => fermion_determinant(&m)?,
    };
    Ok(gram.log_diagonal_sum() + scaled.ln())
}

/// Kähler potential `K = hbar ln |N|^{-2}`.
///
/// Fermion potentials are evaluated as `ln |Delta|^2 + ln det(W^+ W)` in the
/// divided-difference basis whenever it is representable; that form keeps full
/// relative precision when `det M` is small, which finite differences need.
pub fn kahler_potential(config: &ParticleConfig, flux: FluxSector, kind: StatisticsKind) -> Result<f64> {
    let gram = gram_matrix(config, flux);
    if kind.symmetry()? == Symmetry::Antisymmetric {
        fermion_determinant(&gram.normalized())?;
        if let Some(frame) = NewtonFrame::new(config, flux.two_j) {
            let z = config.coords();
            let vandermonde: f64 = (0..z.len())
                .flat_map(|a| (0..a).map(move |b| (a, b)))
                .map(|(a, b)| 2.0 * (z[a] - z[b]).norm().ln())
                .sum();
            return Ok(HBAR * (vandermonde + frame.log_det_gram()));
        }
    }
    Ok(HBAR * log_norm(&gram, kind)?)
}

/// `d/dz_i ln |N|^{-2}` for every `i`.
pub(crate) fn holomorphic_gradient(
    config: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
) -> Result<Vec<Complex64>> {
    let n = config.len();
    let jet = gram_jet(config, flux);
    match kind.symmetry()? {
        Symmetry::Antisymmetric => {
            fermion_determinant(&jet.m)?;
            if let Some(grad) = NewtonFrame::new(config, flux.two_j).and_then(|f| f.log_det_gradient()) {
                let z = config.coords();
                // d/dz_j ln |Delta|^2 = sum_{k != j} 1 / (z_j - z_k)
                return Ok(grad
                    .into_iter()
                    .enumerate()
                    .map(|(j, g)| {
                        g + (0..n)
                            .filter(|&k| k != j)
                            .map(|k| (z[j] - z[k]).inv())
                            .sum::<Complex64>()
                    })
                    .collect());
            }
            let b = inverse_or_degenerate(&jet.m)?;
            // Jacobi: d ln det M = tr(M^{-1} dM); d/dz_j only touches column j.
            Ok((0..n)
                .map(|j| (0..n).map(|k| b[(j, k)] * jet.du[(k, j)]).sum())
                .collect())
        }
        Symmetry::Symmetric => {
            check_permanent_size(n)?;
            Ok((0..n)
                .map(|j| {
                    let p: Dual = ryser(n, |r, c| {
                        let eps = if c == j {
                            jet.du[(r, c)]
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        Dual::new(jet.m[(r, c)], eps)
                    });
                    p.eps / p.re
                })
                .collect())
        }
    }
}

fn inverse_or_degenerate(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    m.clone()
        .try_inverse()
        .ok_or(Error::FermionDegenerate { relative_det: 0.0 })
}

/// Berry connection `A_{z_i} = (i/2) hbar d/dz_i ln |N|^{-2}`.
///
/// Fermions use the Jacobi identity for `d ln det`; bosons use the
/// permanent-minor expansion, evaluated in one Ryser pass over dual numbers.
pub fn berry_connection(config: &ParticleConfig, flux: FluxSector, kind: StatisticsKind) -> Result<Vec<Complex64>> {
    let half_i = Complex64::new(0.0, 0.5 * HBAR);
    Ok(holomorphic_gradient(config, flux, kind)?
        .into_iter()
        .map(|d| half_i * d)
        .collect())
}

/// Fermion metric from the Jacobi identity applied directly to the Gram
/// matrix. Loses accuracy like `cond(M)^2` near coincidences; used when the
/// Newton-basis route overflows.
fn gram_jacobi_metric(jet: &GramJet) -> Result<DMatrix<Complex64>> {
    let n = jet.m.nrows();
    let b = inverse_or_degenerate(&jet.m)?;
    // G_ij = B_ji (W_ij - (V B U)_ij) from
    // d_i' d_j ln det M = tr(B d_i'd_j M) - tr(B d_i' M B d_j M).
    let vbu = &jet.dv * &b * &jet.du;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        b[(j, i)] * (jet.dw[(i, j)] - vbu[(i, j)])
    }))
}

fn analytic_metric(
    config: &ParticleConfig,
    flux: FluxSector,
    jet: &GramJet,
    symmetry: Symmetry,
) -> Result<DMatrix<Complex64>> {
    let n = jet.m.nrows();
    match symmetry {
        Symmetry::Antisymmetric => {
            fermion_determinant(&jet.m)?;
            if let Some(g) = NewtonFrame::new(config, flux.two_j).and_then(|f| f.metric()) {
                return Ok(g);
            }
            gram_jacobi_metric(jet)
        }
        Symmetry::Symmetric => {
            check_permanent_size(n)?;
            let zero = Complex64::new(0.0, 0.0);
            let mut g = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let p: HyperDual = ryser(n, |r, c| {
                        HyperDual::new(
                            jet.m[(r, c)],
                            if c == j { jet.du[(r, c)] } else { zero },
                            if r == i { jet.dv[(r, c)] } else { zero },
                            if r == i && c == j { jet.dw[(r, c)] } else { zero },
                        )
                    });
                    // e1 <-> d/dz_j, e2 <-> d/dzbar_i
                    g[(i, j)] = p.e12 / p.re - p.e1 * p.e2 / (p.re * p.re);
                }
            }
            Ok(g)
        }
    }
}

/// Kähler metric by the requested method.
pub fn metric(
    config: &ParticleConfig,
    flux: FluxSector,
    kind: StatisticsKind,
    method: MetricMethod,
) -> Result<KahlerMetric> {
    let symmetry = kind.symmetry()?;
    match method {
        MetricMethod::Analytic => {
            let jet = gram_jet(config, flux);
            let g = analytic_metric(config, flux, &jet, symmetry)?;
            Ok(KahlerMetric::from_matrix(g * Complex64::new(HBAR, 0.0), method))
        }
        MetricMethod::FiniteDifference { step } => finite_diff::metric_fd(config, flux, kind, step),
    }
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
    fn rejects_empty_and_non_finite() {
        assert!(matches!(ParticleConfig::new(vec![]), Err(Error::InvalidInput(_))));
        assert_eq!(
            ParticleConfig::new(vec![c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFiniteCoordinate { index: 1 })
        );
        assert_eq!(
            ParticleConfig::new(vec![c(f64::INFINITY, 0.0)]),
            Err(Error::NonFiniteCoordinate { index: 0 })
        );
    }

    #[test]
    fn area_is_h_times_flux() {
        assert_eq!(single_particle_area(FluxSector::new(2)), 2.0 * PLANCK);
        assert_eq!(single_particle_area(FluxSector::new(0)), 0.0);
        assert_eq!(single_particle_area(FluxSector::new(4)), 4.0 * 2.0 * PI);
    }

    #[test]
    fn alpha_per_kind() {
        assert_eq!(StatisticsKind::Boson.alpha(), 0.0);
        assert_eq!(StatisticsKind::Fermion.alpha(), 1.0);
        assert_eq!(StatisticsKind::Anyon(1.0 / 3.0).alpha(), 1.0 / 3.0);
        assert_eq!(StatisticsKind::ExclusionG(0.5).alpha(), 0.5);
        assert_eq!(StatisticsKind::Anyon(0.0).symmetry(), Ok(Symmetry::Symmetric));
        assert_eq!(StatisticsKind::Anyon(1.0).symmetry(), Ok(Symmetry::Antisymmetric));
        assert!(StatisticsKind::Anyon(0.5).symmetry().is_err());
        assert!(StatisticsKind::ExclusionG(-1.0).validate().is_err());
    }

    #[test]
    fn coinciding_bosons_log_norm() {
        let z = c(0.7, -0.4);
        let flux = FluxSector::new(3);
        let g = gram_matrix(&cfg(&[z, z]), flux);
        let expect = 2f64.ln() + 2.0 * 3.0 * z.norm_sqr().ln_1p();
        assert!((log_norm(&g, StatisticsKind::Boson).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn coinciding_fermions_are_degenerate() {
        let z = c(0.7, -0.4);
        let g = gram_matrix(&cfg(&[z, z]), FluxSector::new(3));
        assert!(matches!(
            log_norm(&g, StatisticsKind::Fermion),
            Err(Error::FermionDegenerate { .. })
        ));
    }

    #[test]
    fn too_many_fermions_are_degenerate() {
        // 2j + 2 particles in a (2j + 1)-dimensional level.
        let z = [c(0.1, 0.0), c(-0.5, 0.3), c(1.2, 1.0), c(0.0, -2.0)];
        let g = gram_matrix(&cfg(&z), FluxSector::new(2));
        assert!(matches!(
            log_norm(&g, StatisticsKind::Fermion),
            Err(Error::FermionDegenerate { .. })
        ));
    }

    #[test]
    fn permanent_cap_enforced() {
        let z: Vec<Complex64> = (0..15).map(|k| c(0.1 * k as f64, 0.0)).collect();
        let g = gram_matrix(&cfg(&z), FluxSector::new(20));
        assert_eq!(
            log_norm(&g, StatisticsKind::Boson),
            Err(Error::PermanentOverCap {
                n: 15,
                cap: PERMANENT_CAP
            })
        );
    }

    #[test]
    fn kahler_potential_examples() {
        let flux = FluxSector::new(2);
        let k = kahler_potential(&cfg(&[c(0.0, 0.0), c(1.0, 0.0)]), flux, StatisticsKind::Fermion).unwrap();
        assert!((k - 3f64.ln()).abs() < 1e-13);

        let z = c(-0.3, 0.9);
        let k1 = kahler_potential(&cfg(&[z]), FluxSector::new(5), StatisticsKind::Boson).unwrap();
        assert!((k1 - 5.0 * z.norm_sqr().ln_1p()).abs() < 1e-13);

        // N coinciding bosons: ln N! + N 2j ln(1 + |z|^2)
        let k4 = kahler_potential(&cfg(&[z; 4]), FluxSector::new(3), StatisticsKind::Boson).unwrap();
        let expect = 24f64.ln() + 4.0 * 3.0 * z.norm_sqr().ln_1p();
        assert!((k4 - expect).abs() < 1e-11, "{k4} vs {expect}");
    }

    #[test]
    fn single_particle_connection() {
        let flux = FluxSector::new(4);
        let z = c(0.6, 0.2);
        let a = berry_connection(&cfg(&[z]), flux, StatisticsKind::Boson).unwrap();
        let expect = c(0.0, 1.0) * flux.j() * z.conj() / (1.0 + z.norm_sqr());
        assert!((a[0] - expect).norm() < 1e-14);
        let a0 = berry_connection(&cfg(&[c(0.0, 0.0)]), flux, StatisticsKind::Fermion).unwrap();
        assert_eq!(a0[0], c(0.0, 0.0));
    }

    #[test]
    fn single_particle_metric() {
        for two_j in [1, 2, 5] {
            let z = c(-1.3, 0.4);
            for kind in [StatisticsKind::Boson, StatisticsKind::Fermion] {
                let g = metric(&cfg(&[z]), FluxSector::new(two_j), kind, MetricMethod::Analytic).unwrap();
                let expect = f64::from(two_j) / (1.0 + z.norm_sqr()).powi(2);
                assert!((g.get(0, 0) - c(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn coinciding_bosons_pull_back_to_n_spheres() {
        let z = c(0.3, 0.5);
        let flux = FluxSector::new(2);
        let n = 3;
        let g = metric(&cfg(&vec![z; n]), flux, StatisticsKind::Boson, MetricMethod::Analytic).unwrap();
        let total: Complex64 = g.matrix().iter().sum();
        let expect = n as f64 * 2.0 / (1.0 + z.norm_sqr()).powi(2);
        assert!((total - c(expect, 0.0)).norm() < 1e-12, "{total} vs {expect}");
    }

    #[test]
    fn fermion_pair_metric_cross_method() {
        let config = cfg(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let flux = FluxSector::new(2);
        let a = metric(&config, flux, StatisticsKind::Fermion, MetricMethod::Analytic).unwrap();
        let f = metric(
            &config,
            flux,
            StatisticsKind::Fermion,
            MetricMethod::finite_difference(),
        )
        .unwrap();
        let scale = a.matrix().iter().map(|x| x.norm()).fold(0.0, f64::max);
        for (x, y) in a.matrix().iter().zip(f.matrix().iter()) {
            assert!((x - y).norm() <= 1e-6 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn newton_route_matches_gram_jacobi_when_well_separated() {
        let config = cfg(&[c(0.1, 0.2), c(-0.8, 0.5), c(1.1, -0.9)]);
        let flux = FluxSector::new(4);
        let jet = gram_jet(&config, flux);
        let direct = gram_jacobi_metric(&jet).unwrap();
        let g = metric(&config, flux, StatisticsKind::Fermion, MetricMethod::Analytic).unwrap();
        let scale = direct.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for (x, y) in direct.iter().zip(g.matrix().iter()) {
            assert!((x - y).norm() < 1e-12 * scale, "{x} vs {y}");
        }
        // connection: Newton + Vandermonde versus Jacobi on M
        let b = jet.m.clone().try_inverse().unwrap();
        let grad = holomorphic_gradient(&config, flux, StatisticsKind::Fermion).unwrap();
        for j in 0..3 {
            let expect: Complex64 = (0..3).map(|k| b[(j, k)] * jet.du[(k, j)]).sum();
            assert!((grad[j] - expect).norm() < 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn metric_views() {
        let g = metric(
            &cfg(&[c(0.2, 0.1)]),
            FluxSector::new(2),
            StatisticsKind::Boson,
            MetricMethod::Analytic,
        )
        .unwrap();
        assert_eq!(g.field_strength()[(0, 0)], c(0.0, 1.0) * g.get(0, 0));
        assert_eq!(g.symplectic_components()[(0, 0)], c(0.0, -1.0) * g.get(0, 0));
        assert!((g.determinant() - g.get(0, 0).re).abs() < 1e-15);
        assert!(g.condition_number() == 1.0);
    }
}
