use exstat::exclusion::*;
use exstat::thermo::{entropy_closed, equation_of_state, ThermoInput};
use exstat::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// The entropy exactly as printed per level, with the sign that makes the
/// g = 1 case the Fermi entropy.
fn textbook(n: f64, g: f64) -> f64 {
    x_ln_x(1.0 + (1.0 - g) * n) - x_ln_x(1.0 - g * n) - x_ln_x(n)
}

#[test]
fn reductions_at_random_occupations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n: f64 = rng.random_range(0.0..1.0);
        let bose = x_ln_x(1.0 + n) - x_ln_x(n);
        let fermi = -x_ln_x(1.0 - n) - x_ln_x(n);
        assert!((level_entropy(n, 0.0).unwrap() - bose).abs() < 1e-12);
        assert!((level_entropy(n, 1.0).unwrap() - fermi).abs() < 1e-12);
    }
}

#[test]
fn single_level_is_closed_entropy() {
    for n in [1u64, 2, 5, 10, 40] {
        for area in [50.0, 100.0, 200.0, 400.0, 1000.0] {
            for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let spec = ClassicalLevelSpec {
                    levels: vec![ClassicalLevel {
                        degeneracy: area,
                        energy: 0.0,
                        density: n as f64 / area,
                    }],
                    alpha,
                    h_value: 1.0,
                    space_dim: 1,
                };
                let s = entropy_classical_limit(&spec).unwrap();
                let closed = entropy_closed(&ThermoInput::new(n, area, alpha, 1.0)).unwrap();
                assert!(
                    (s - closed).abs() <= 1e-12 * closed.abs().max(1.0),
                    "{n} {area} {alpha}"
                );
            }
        }
    }
}

#[test]
fn boltzmann_limit_entropy() {
    let spec = ClassicalLevelSpec {
        levels: vec![ClassicalLevel {
            degeneracy: 7.0,
            energy: 1.0,
            density: 0.3,
        }],
        alpha: 0.0,
        h_value: 0.2,
        space_dim: 1,
    };
    let expect = 7.0 * 0.2 * 0.3 * (1.0 - (0.3f64 * 0.2).ln());
    assert!((entropy_classical_limit(&spec).unwrap() - expect).abs() < 1e-14);
}

fn halvings(rho: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| 0.1 / rho / 2f64.powi(k as i32)).collect()
}

#[test]
fn gaps_shrink_monotonically() {
    for &(rho, alpha) in &[(1.0, 0.5), (0.5, 1.0), (2.0, 0.0), (4.0, 0.1)] {
        let study = limit_convergence_study(rho, alpha, &halvings(rho, 10), 1).unwrap();
        for w in study.windows(2) {
            assert!(w[1].relative_gap < w[0].relative_gap, "{rho} {alpha}: {w:?}");
        }
        assert!(study.last().unwrap().relative_gap < study[0].relative_gap / 100.0);
    }
}

#[test]
fn near_incompressible_gap_still_shrinks() {
    // At alpha rho = 0.99 the classical entropy changes sign near rho h = 0.027,
    // so relative gaps are only meaningful below that; absolute gaps shrink throughout.
    let (rho, alpha) = (1.0, 0.99);
    let coarse = limit_convergence_study(rho, alpha, &halvings(rho, 10), 1).unwrap();
    for w in coarse.windows(2) {
        let gap = |p: &LimitPoint| (p.exclusion_entropy - p.classical_entropy).abs();
        assert!(gap(&w[1]) < gap(&w[0]));
    }
    let fine: Vec<f64> = (0..=10).map(|k| 0.01 / rho / 2f64.powi(k)).collect();
    let study = limit_convergence_study(rho, alpha, &fine, 1).unwrap();
    for w in study.windows(2) {
        assert!(w[1].relative_gap < w[0].relative_gap, "{w:?}");
    }
    assert!(study.last().unwrap().relative_gap < study[0].relative_gap / 100.0);
}

#[test]
fn gap_follows_series_expansion() {
    // S_ex - S_cl = n^2 / (2b) - n^3 / (6 b^2) + ... with b = 1 - alpha rho
    let (rho, alpha) = (1.0, 0.5);
    let b = 1.0 - alpha * rho;
    for p in study_points(rho, alpha) {
        let n = p.occupation;
        let series = n * n / (2.0 * b) - n.powi(3) / (6.0 * b * b);
        let gap = p.exclusion_entropy - p.classical_entropy;
        assert!((gap - series).abs() < 0.02 * series, "{p:?}");
    }
}

fn study_points(rho: f64, alpha: f64) -> Vec<LimitPoint> {
    limit_convergence_study(rho, alpha, &halvings(rho, 10), 1).unwrap()
}

#[test]
fn limit_points_match_direct_evaluation() {
    for p in study_points(1.0, 0.5) {
        assert!((p.exclusion_entropy - textbook(p.occupation, p.g)).abs() < 1e-12);
    }
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn half_exclusion_occupation_maximizes_free_entropy() {
    for x in [0.0, -1.0, 2.5] {
        let n = equilibrium_occupation(0.5, 1.0, 0.0, &[(1, x)]).unwrap()[0];
        // a flat maximum limits any comparison-based search to ~sqrt(eps)
        let oracle = golden_section_max(|m| textbook(m, 0.5) - x * m, 1e-12, 2.0 - 1e-12);
        assert!((n - oracle).abs() < 3e-8, "x = {x}: {n} vs {oracle}");
        // closed form at g = 1/2: n = 1 / (w + 1/2) with w (1 + w) = e^{2x}
        let w = 0.5 * ((1.0 + 4.0 * (2.0 * x).exp()).sqrt() - 1.0);
        assert!((n - 1.0 / (w + 0.5)).abs() < 1e-12 * n);
    }
}

#[test]
fn flat_band_pressure_grid() {
    for rho in [0.1, 0.5, 1.0, 2.0, 4.0] {
        for alpha in [0.0, 0.05, 0.1, 0.15, 0.2] {
            let p = eos_exclusion_flat(rho, alpha, 1.3).unwrap();
            let reference = equation_of_state(rho, alpha, 1.3).unwrap();
            assert!((p / reference - 1.0).abs() < 1e-8, "{rho} {alpha}");
        }
    }
    assert!(matches!(
        eos_exclusion_flat(5.0, 0.2, 1.0),
        Err(Error::DensityAboveMax { .. })
    ));
}

proptest! {
    #[test]
    fn entropy_is_concave(g_idx in 0usize..5, t in 0.02f64..0.98) {
        let g = [0.0, 1.0 / 3.0, 0.5, 1.0, 2.0][g_idx];
        let top = if g > 0.0 { 1.0 / g } else { 10.0 };
        let n = t * top;
        let h = 1e-3 * top;
        let second = level_entropy(n + h, g).unwrap() - 2.0 * level_entropy(n, g).unwrap() + level_entropy(n - h, g).unwrap();
        prop_assert!(second < 0.0);
    }

    #[test]
    fn occupation_monotone_and_bounded(g in 0.0f64..3.0, beta in 0.1f64..5.0, mu in -2.0f64..2.0, e in 0.0f64..2.0, de in 0.01f64..1.0) {
        let mu = if g == 0.0 { -1.0 } else { mu };
        let levels = [(1, e), (1, e + de)];
        let n = equilibrium_occupation(g, beta, mu, &levels);
        prop_assume!(n.is_ok());
        let n = n.unwrap();
        prop_assert!(n[1] < n[0]);
        if g > 0.0 {
            prop_assert!(n.iter().all(|&v| v < 1.0 / g));
        }
        let up = equilibrium_occupation(g, beta, mu + 0.1, &levels);
        if let Ok(up) = up {
            prop_assert!(up[0] > n[0]);
        }
    }
}
