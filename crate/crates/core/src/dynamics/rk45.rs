//! Dormand–Prince 5(4) with standard step-size control on a real state vector.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (equal to the last row of `A`, FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
pub const MAX_STEPS: usize = 1_000_000;

pub struct Stepper {
    pub rtol: f64,
    pub atol: f64,
}

pub struct Accepted<'a> {
    pub t: f64,
    pub y: &'a [f64],
}

impl Stepper {
    /// Integrates `y' = f(t, y)` from `t0` to `t_end`, landing exactly on every
    /// time in `stops` (sorted, inside `(t0, t_end]`). `on_step` sees every
    /// accepted state and may abort.
    pub fn run<F, S>(&self, mut f: F, t0: f64, y0: &[f64], t_end: f64, stops: &[f64], mut on_step: S) -> Result<()>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
        S: FnMut(Accepted<'_>, bool) -> Result<()>,
    {
        let dim = y0.len();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
        k[0] = f(t, &y)?;
        let mut h = self.initial_step(&y, &k[0], t_end - t0);
        let mut stop_idx = 0;
        let mut tmp = vec![0.0; dim];

        for _ in 0..MAX_STEPS {
            if t >= t_end {
                return Ok(());
            }
            let target = stops.get(stop_idx).copied().unwrap_or(t_end).min(t_end);
            let mut landing = false;
            if t + h >= target || target - (t + h) < 1e-12 * h {
                h = target - t;
                landing = true;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepFailure { t, step: h });
            }

            for s in 1..7 {
                for d in 0..dim {
                    let mut acc = 0.0;
                    for (r, kr) in k.iter().enumerate().take(s) {
                        acc += A[s][r] * kr[d];
                    }
                    tmp[d] = y[d] + h * acc;
                }
                k[s] = f(t + C[s] * h, &tmp)?;
            }
            // tmp now holds the fifth-order solution (FSAL)
            let mut err_sq = 0.0;
            for d in 0..dim {
                let mut e = 0.0;
                for s in 0..7 {
                    e += (B5[s] - B4[s]) * k[s][d];
                }
                let scale = self.atol + self.rtol * y[d].abs().max(tmp[d].abs());
                err_sq += (h * e / scale).powi(2);
            }
            let err = (err_sq / dim.max(1) as f64).sqrt();
            if !err.is_finite() {
                h *= MIN_FACTOR;
                continue;
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err <= 1.0 {
                t = if landing { target } else { t + h };
                std::mem::swap(&mut y, &mut tmp);
                k.swap(0, 6);
                let at_stop = landing && stop_idx < stops.len() && target == stops[stop_idx];
                if at_stop {
                    stop_idx += 1;
                }
                on_step(Accepted { t, y: &y }, at_stop)?;
                h *= factor;
            } else {
                h *= factor.min(1.0);
            }
        }
        Err(Error::StepFailure { t, step: h })
    }

    fn initial_step(&self, y: &[f64], f0: &[f64], span: f64) -> f64 {
        let norm = |v: &[f64]| {
            (v.iter()
                .zip(y)
                .map(|(a, b)| (a / (self.atol + self.rtol * b.abs())).powi(2))
                .sum::<f64>()
                / v.len().max(1) as f64)
                .sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span.abs())
    }
}
