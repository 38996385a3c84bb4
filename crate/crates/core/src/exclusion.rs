//! Haldane exclusion statistics, level by level, and its classical
//! double-scaling limit `h -> 0`, `g -> inf` with `g h^D -> alpha`.
//!
//! Per level of degeneracy `D_k` and occupation `n_k` the entropy is
//!
//! `s = [1 + (1-g) n] ln[1 + (1-g) n] - (1 - g n) ln(1 - g n) - n ln n`,
//!
//! which reduces to the Bose entropy at `g = 0` and the Fermi entropy at
//! `g = 1`. With `n = rho h^D` fixed `g n = alpha rho` the limit is
//! `h^D [rho ln(1 - alpha rho) - rho ln(rho h^D) + rho]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub degeneracy: u64,
    pub energy: f64,
    pub occupation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub levels: Vec<Level>,
    pub g: f64,
    /// Half the single-particle phase-space dimension.
    pub space_dim: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLevel {
    /// Number of single-particle states, e.g. `A / h` for a flat band; need
    /// not be an integer in the classical limit.
    pub degeneracy: f64,
    pub energy: f64,
    /// Phase-space density `rho_k`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLevelSpec {
    pub levels: Vec<ClassicalLevel>,
    pub alpha: f64,
    pub h_value: f64,
    pub space_dim: u32,
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy of a single state with mean occupation `n`.
pub fn level_entropy(n: f64, g: f64) -> Result<f64> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::DomainViolation(format!(
            "occupation must be finite and >= 0, got {n}"
        )));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::DomainViolation(format!("g must be finite and >= 0, got {g}")));
    }
    let gn = g * n;
    if gn > 1.0 {
        return Err(Error::DomainViolation(format!("g*n = {gn} exceeds 1")));
    }
    let blocked = 1.0 - gn;
    let free = blocked + n; // 1 + (1 - g) n
    if free < 0.0 {
        return Err(Error::DomainViolation(format!("1 + (1-g)n = {free} is negative")));
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    if blocked == 0.0 {
        return Ok(x_ln_x(n) - x_ln_x(n));
    }
    // (b + n) ln(b + n) - b ln b = n ln b + (b + n) ln(1 + n / b)
    Ok(n * blocked.ln() + free * (n / blocked).ln_1p() - x_ln_x(n))
}

/// `S = sum_k D_k s(n_k)`.
pub fn entropy_exclusion(spec: &LevelSpec) -> Result<f64> {
    if spec.space_dim == 0 || spec.levels.iter().any(|l| l.degeneracy == 0) {
        return Err(Error::InvalidInput(
            "degeneracies and space dimension must be positive".into(),
        ));
    }
    spec.levels
        .iter()
        .map(|l| Ok(l.degeneracy as f64 * level_entropy(l.occupation, spec.g)?))
        .sum()
}

/// `h^D [rho ln(1 - alpha rho) - rho ln(rho h^D) + rho]`, the classical limit of
/// one state's entropy; `cell = h^D`.
fn classical_level(rho: f64, alpha: f64, cell: f64) -> Result<f64> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::DomainViolation(format!(
            "density must be finite and >= 0, got {rho}"
        )));
    }
    let alpha_rho = alpha * rho;
    if alpha_rho >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "alpha*rho = {alpha_rho} must be below 1"
        )));
    }
    if rho * cell >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "rho*h^D = {} must be below 1",
            rho * cell
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    Ok(cell * (rho * (-alpha_rho).ln_1p() - rho * (rho * cell).ln() + rho))
}

/// `S = sum_k D_k h^D [rho_k ln(1 - alpha rho_k) - rho_k ln(rho_k h^D) + rho_k]`.
pub fn entropy_classical_limit(spec: &ClassicalLevelSpec) -> Result<f64> {
    if !(spec.h_value > 0.0) || !(spec.alpha >= 0.0) || spec.space_dim == 0 {
        return Err(Error::DomainViolation("need h > 0, alpha >= 0 and D >= 1".into()));
    }
    let cell = spec.h_value.powi(spec.space_dim as i32);
    spec.levels
        .iter()
        .map(|l| Ok(l.degeneracy * classical_level(l.density, spec.alpha, cell)?))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub h: f64,
    /// `n = rho h^D`
    pub occupation: f64,
    /// `g = alpha / h^D`
    pub g: f64,
    pub exclusion_entropy: f64,
    pub classical_entropy: f64,
    pub relative_gap: f64,
}

/// Per-state exclusion entropy at `n = rho h^D`, `g = alpha / h^D` against
/// its classical limit, for every `h` in `h_sequence`.
pub fn limit_convergence_study(rho: f64, alpha: f64, h_sequence: &[f64], space_dim: u32) -> Result<Vec<LimitPoint>> {
    if space_dim == 0 {
        return Err(Error::InvalidInput("space dimension must be at least 1".into()));
    }
    h_sequence
        .iter()
        .map(|&h| {
            if !(h > 0.0) {
                return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
            }
            let cell = h.powi(space_dim as i32);
            let n = rho * cell;
            let g = alpha / cell;
            let exclusion_entropy = level_entropy(n, g)?;
            let classical_entropy = classical_level(rho, alpha, cell)?;
            Ok(LimitPoint {
                h,
                occupation: n,
                g,
                exclusion_entropy,
                classical_entropy,
                relative_gap: ((exclusion_entropy - classical_entropy) / classical_entropy).abs(),
            })
        })
        .collect()
}

/// `ds/dn - x` for the stationarity condition `ds/dn = beta (eps - mu)`.
fn stationarity(n: f64, g: f64, x: f64) -> f64 {
    let blocked = 1.0 - g * n;
    (1.0 - g) * (blocked + n).ln() + g * blocked.ln() - n.ln() - x
}

fn bisect(mut lo: f64, mut hi: f64, g: f64, x: f64) -> f64 {
    for _ in 0..4000 {
        let mid = if hi > 2.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
        if stationarity(mid, g, x) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Occupation maximizing `s(n) - x n` on `(0, 1/g)` (or `(0, inf)` for `g = 0`).
pub fn occupation_for(g: f64, x: f64) -> Result<f64> {
    if !(g >= 0.0 && g.is_finite()) || !x.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need finite g >= 0 and finite x (got {g}, {x})"
        )));
    }
    let no_root = Error::NoRoot { x };
    let upper = if g > 0.0 { 1.0 / g } else { f64::INFINITY };

    let mut lo = if g > 0.0 { 0.5 * upper } else { 1.0 };
    while stationarity(lo, g, x) <= 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(no_root);
        }
    }
    let hi = if g > 0.0 {
        let mut gap = 0.5;
        loop {
            let hi = upper * (1.0 - gap);
            if hi > lo && stationarity(hi, g, x) < 0.0 {
                break hi;
            }
            gap *= 0.5;
            if gap < f64::EPSILON {
                return Err(no_root);
            }
        }
    } else {
        let mut hi = 2.0 * lo;
        while stationarity(hi, g, x) >= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 {
                return Err(no_root);
            }
        }
        hi
    };
    Ok(bisect(lo, hi, g, x))
}

/// Equilibrium occupation of every level `(D_k, eps_k)` at `(g, beta, mu)`.
pub fn equilibrium_occupation(g: f64, beta: f64, mu: f64, levels: &[(u64, f64)]) -> Result<Vec<f64>> {
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    levels
        .iter()
        .map(|&(_, eps)| occupation_for(g, beta * (eps - mu)))
        .collect()
}

/// Flat-band pressure from the classical exclusion entropy.
///
/// One level holding `N = rho A` particles in `A / h` states; the pressure is
/// `(1/beta) dS/dA` at fixed `N`, taken by a five-point central difference.
pub fn eos_exclusion_flat(rho: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(rho >= 0.0 && alpha >= 0.0 && beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need rho >= 0, alpha >= 0, beta > 0 (got {rho}, {alpha}, {beta})"
        )));
    }
    let alpha_rho = alpha * rho;
    if alpha_rho >= 1.0 {
        return Err(Error::DensityAboveMax { alpha_rho });
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let area = 1.0;
    let particles = rho * area;
    // any h with rho h < 1 gives the same derivative
    let h_value = 0.01 / rho;
    let entropy = |a: f64| {
        entropy_classical_limit(&ClassicalLevelSpec {
            levels: vec![ClassicalLevel {
                degeneracy: a / h_value,
                energy: 0.0,
                density: particles / a,
            }],
            alpha,
            h_value,
            space_dim: 1,
        })
    };
    let d = area * 1e-3_f64.min(0.1 * (1.0 - alpha_rho));
    let ds = (-entropy(area + 2.0 * d)? + 8.0 * entropy(area + d)? - 8.0 * entropy(area - d)?
        + entropy(area - 2.0 * d)?)
        / (12.0 * d);
    Ok(ds / beta)
}
