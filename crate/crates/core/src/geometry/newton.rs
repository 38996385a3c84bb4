//! Fermion derivatives in the divided-difference (Newton) basis.
//!
//! The unnormalized coherent state `|z>` has components
//! `sqrt(C(2j, m)) z^m`, `m = 0..=2j`. Replacing the kets by their Newton
//! divided differences `w_k = v[z_0, ..., z_k]` changes the Slater wedge
//! only by the Vandermonde factor: `det M = |Delta(z)|^2 det(W^+ W)`. The
//! factor `ln |Delta|^2` is pluriharmonic, so the metric is
//! `G_ij = d_i' d_j ln det H` with `H = W^+ W` smooth and well conditioned
//! through particle coincidences. By the Jacobi identity
//!
//! `G_ij = tr(H^{-1} (d_i W)^+ P_perp d_j W) = <X_i, X_j>_F`,
//! `X_j = P_perp (d_j W) R^{-1}`, with `W = Q R` and `P_perp = 1 - Q Q^+`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ParticleConfig;

/// Complete homogeneous symmetric polynomials `h_0..=h_max` of `vars`.
fn complete_homogeneous(vars: &[Complex64], max: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); max + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &x in vars {
        for r in 1..=max {
            let prev = h[r - 1];
            h[r] += x * prev;
        }
    }
    h
}

fn binomial_sqrt(n: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; n + 1];
    for m in 1..=n {
        row[m] = row[m - 1] * (n - m + 1) as f64 / m as f64;
    }
    row.iter().map(|c| c.sqrt()).collect()
}

pub(super) struct NewtonFrame {
    /// `Q` of the thin QR of the column-scaled `W`.
    q: DMatrix<Complex64>,
    r: DMatrix<Complex64>,
    /// `sum_k ln |w_k|` of the unscaled columns.
    log_scale: f64,
    /// `d_j W` for every particle `j`, scaled like `W`.
    dw: Vec<DMatrix<Complex64>>,
}

impl NewtonFrame {
    /// `None` when entries overflow or `N > 2j + 1`.
    pub(super) fn new(config: &ParticleConfig, two_j: u32) -> Option<Self> {
        let z = config.coords();
        let n = z.len();
        let p = two_j as usize;
        let d = p + 1;
        if n > d {
            return None;
        }
        let coef = binomial_sqrt(p);
        let mut w = DMatrix::zeros(d, n);
        let mut dw = vec![DMatrix::zeros(d, n); n];
        for k in 0..n {
            let h = complete_homogeneous(&z[..=k], p);
            for m in k..d {
                w[(m, k)] = coef[m] * h[m - k];
            }
            for (j, dwj) in dw.iter_mut().enumerate().take(k + 1) {
                // d h_r(x_0..x_k) / d x_j = h_{r-1}(x_0..x_k, x_j)
                let mut vars = z[..=k].to_vec();
                vars.push(z[j]);
                let hd = complete_homogeneous(&vars, p);
                for m in (k + 1)..d {
                    dwj[(m, k)] = coef[m] * hd[m - k - 1];
                }
            }
        }
        // constant column scaling leaves d d' ln det H unchanged
        let mut log_scale = 0.0;
        for k in 0..n {
            let norm = w.column(k).norm();
            if !(norm.is_finite() && norm > 0.0) {
                return None;
            }
            log_scale += norm.ln();
            let s = Complex64::new(1.0 / norm, 0.0);
            w.column_mut(k).scale_mut(1.0 / norm);
            for dwj in &mut dw {
                for m in 0..d {
                    dwj[(m, k)] *= s;
                }
            }
        }
        if dw
            .iter()
            .any(|m| m.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())))
        {
            return None;
        }
        let qr = w.qr();
        Some(Self {
            q: qr.q(),
            r: qr.r(),
            log_scale,
            dw,
        })
    }

    /// `ln det(W^+ W)`, i.e. `ln det M - ln |Delta|^2`.
    pub(super) fn log_det_gram(&self) -> f64 {
        2.0 * self.log_scale + 2.0 * self.r.diagonal().iter().map(|x| x.norm().ln()).sum::<f64>()
    }

    /// `d/dz_j ln det H = tr(R^{-1} Q^+ d_j W)`.
    pub(super) fn log_det_gradient(&self) -> Option<Vec<Complex64>> {
        let rt = self.r.transpose();
        self.dw
            .iter()
            .map(|dwj| {
                let a = self.q.adjoint() * dwj;
                // tr(R^{-1} A) = tr(A R^{-1}); solve X R = A
                let x = rt.solve_lower_triangular(&a.transpose())?.transpose();
                Some(x.trace())
            })
            .collect()
    }

    pub(super) fn metric(&self) -> Option<DMatrix<Complex64>> {
        let n = self.dw.len();
        let rt = self.r.transpose();
        let mut xs = Vec::with_capacity(n);
        for dwj in &self.dw {
            let mut y = dwj - &self.q * (self.q.adjoint() * dwj);
            y -= &self.q * (self.q.adjoint() * &y);
            let x = rt.solve_lower_triangular(&y.transpose())?.transpose();
            xs.push(x);
        }
        Some(DMatrix::from_fn(n, n, |i, j| xs[i].dotc(&xs[j])))
    }
}
