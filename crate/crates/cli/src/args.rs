use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Classical exclusion statistics: geometry, phase-space volumes,
/// thermodynamics, exclusion entropy and dynamics.
///
/// Volumes are in units of h^N, areas and alpha in units of h, entropies
/// in units of k_B. Column names and units are listed in docs/formats.md.
#[derive(Debug, Parser)]
#[command(name = "exstat", version, args_override_self = true)]
pub struct Cli {
    /// Plain-text `key = value` file; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Monte Carlo worker threads [default: available cores].
    #[arg(long, global = true, env = "EXSTAT_THREADS")]
    pub workers: Option<usize>,

    /// Output format [default: json for geometry, csv otherwise].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistics {
    Boson,
    Fermion,
    Anyon,
    Exclusion,
}

/// Statistics with an explicit normalization, for geometry and dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exchange {
    Boson,
    Fermion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Potential {
    Zero,
    Latitude,
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Harmonic,
    Coulomb,
    Gaussian,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kähler potential, Berry connection and metric (analytic and finite
    /// difference) at one configuration.
    ///
    /// Columns: quantity, i, j, method, re_hbar, im_hbar (indices from 1).
    Geometry(GeometryArgs),
    /// Closed-form volumes for N = 1..n-max, optionally with a Monte Carlo estimate.
    ///
    /// Columns: n_particles, two_j_flux_quanta, statistics, alpha_h, area_h,
    /// closed_form_volume_h_pow_N, mc_mean_h_pow_N, mc_std_error_h_pow_N,
    /// mc_sigma_deviation_std_errors, mc_samples.
    Volume(VolumeArgs),
    /// Partition function, entropies and pressure over a grid of (N, A, alpha, beta).
    ///
    /// Columns: n_particles, area_h, alpha_h, beta_inv_energy_units,
    /// density_per_h, ln_partition_function_dimensionless, entropy_closed_kB,
    /// entropy_exact_kB, stirling_gap_kB, free_energy_energy_units,
    /// pressure_energy_units_per_h, pressure_exact_energy_units_per_h,
    /// beta_pressure_area_over_n_dimensionless, status.
    Thermo(ThermoArgs),
    /// Exclusion entropy against its classical limit as h is halved.
    ///
    /// Columns: step, h_phase_space_units, occupation_per_state,
    /// g_dimensionless, entropy_exclusion_kB_per_state,
    /// entropy_classical_kB_per_state, relative_gap_dimensionless.
    ExclusionLimit(ExclusionLimitArgs),
    /// Equilibrium occupations of an evenly spaced spectrum.
    ///
    /// Columns: level, degeneracy_states, energy_energy_units,
    /// reduced_energy_dimensionless, occupation_per_state,
    /// occupation_level_total, status.
    Occupation(OccupationArgs),
    /// Trajectory of the constrained flow, sampled at a fixed stride.
    ///
    /// Columns: t_hbar_per_energy_units, x_<i>_stereographic,
    /// y_<i>_stereographic (i from 1), potential_energy_units.
    Dynamics(DynamicsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Geometry(_) => "geometry",
            Command::Volume(_) => "volume",
            Command::Thermo(_) => "thermo",
            Command::ExclusionLimit(_) => "exclusion-limit",
            Command::Occupation(_) => "occupation",
            Command::Dynamics(_) => "dynamics",
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GeometryArgs {
    #[arg(long, value_enum, default_value_t = Exchange::Boson)]
    pub statistics: Exchange,
    #[arg(long, default_value_t = 2)]
    pub two_j: u32,
    /// Stereographic coordinates as `re,im;re,im;...`.
    #[arg(long, default_value = "0,0;1,0")]
    pub coords: String,
    /// Relative finite-difference step for the metric.
    #[arg(long, default_value_t = exstat::geometry::DEFAULT_METRIC_STEP)]
    pub metric_step: f64,
    /// Relative finite-difference step for the connection.
    #[arg(long, default_value_t = exstat::geometry::DEFAULT_CONNECTION_STEP)]
    pub connection_step: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VolumeArgs {
    #[arg(long, value_enum, default_value_t = Statistics::Boson)]
    pub statistics: Statistics,
    #[arg(long, default_value_t = 2)]
    pub two_j: u32,
    /// Single particle number; overrides --n-max.
    #[arg(long)]
    pub n: Option<u64>,
    /// Tabulate N = 1..=n-max.
    #[arg(long, default_value_t = 3)]
    pub n_max: u64,
    /// Anyon statistics parameter (alpha = nu h).
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    /// Exclusion parameter (alpha = g h).
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,
    /// Single-particle area in units of h [default: 2j].
    #[arg(long)]
    pub area: Option<f64>,
    /// Monte Carlo samples per row; 0 skips the estimate.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThermoArgs {
    /// Comma-separated particle numbers.
    #[arg(long, default_value = "5")]
    pub n: String,
    /// Comma-separated areas in units of h.
    #[arg(long, default_value = "20")]
    pub area: String,
    /// Comma-separated statistics parameters in units of h.
    #[arg(long, default_value = "0")]
    pub alpha: String,
    /// Comma-separated inverse temperatures.
    #[arg(long, default_value = "1")]
    pub beta: String,
    /// Energy per particle, in energy units.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub energy: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExclusionLimitArgs {
    /// Product rho * alpha, held fixed.
    #[arg(long, default_value_t = 0.5)]
    pub rho_alpha: f64,
    /// Phase-space density.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Starting h [default: 0.1 / rho].
    #[arg(long)]
    pub h0: Option<f64>,
    /// Number of halvings of h.
    #[arg(long, default_value_t = 10)]
    pub steps: u32,
    /// Half the single-particle phase-space dimension.
    #[arg(long, default_value_t = 1)]
    pub space_dim: u32,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OccupationArgs {
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub e_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub e_max: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// States per level.
    #[arg(long, default_value_t = 1)]
    pub degeneracy: u64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DynamicsArgs {
    #[arg(long, value_enum, default_value_t = Exchange::Boson)]
    pub statistics: Exchange,
    #[arg(long, default_value_t = 2)]
    pub two_j: u32,
    /// Initial coordinates as `re,im;re,im;...`.
    #[arg(long, default_value = "0.5,0")]
    pub coords: String,
    #[arg(long, value_enum, default_value_t = Potential::Latitude)]
    pub potential: Potential,
    /// Latitude coupling.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Pairwise interaction shape.
    #[arg(long, value_enum, default_value_t = Law::Coulomb)]
    pub law: Law,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub strength: f64,
    /// Gaussian width in chordal distance.
    #[arg(long, default_value_t = 0.5)]
    pub width: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Output stride [default: t-end / 100].
    #[arg(long)]
    pub stride: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}
