use std::str::FromStr;

use exstat::dynamics::{integrate_sampled, PotentialSpec, RadialLaw};
use exstat::exclusion::{equilibrium_occupation, limit_convergence_study};
use exstat::geometry::{
    berry_connection, berry_connection_fd, kahler_potential, metric, FluxSector, MetricMethod, ParticleConfig,
    StatisticsKind, Symmetry,
};
use exstat::thermo::{
    entropy_closed, entropy_exact, equation_of_state, free_energy, partition_function, pressure_exact, stirling_gap,
    ThermoInput,
};
use exstat::volume::{closed_form_volume_with_area, mc_volume};
use exstat::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::*;
use crate::output::{num, opt, Table};

pub struct Context {
    pub seed: u64,
    pub workers: usize,
}

pub fn run(command: &Command, config: &mut Map<String, Value>, ctx: &Context) -> Result<Table> {
    match command {
        Command::Geometry(a) => geometry(a, config),
        Command::Volume(a) => volume(a, config, ctx),
        Command::Thermo(a) => thermo(a, config),
        Command::ExclusionLimit(a) => exclusion_limit(a, config),
        Command::Occupation(a) => occupation(a, config),
        Command::Dynamics(a) => dynamics(a, config),
    }
}

fn echo(config: &mut Map<String, Value>, args: &impl Serialize) {
    if let Ok(Value::Object(m)) = serde_json::to_value(args) {
        config.extend(m);
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_coords(s: &str) -> Result<ParticleConfig> {
    let z = s
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (re, im) = p
                .split_once(',')
                .ok_or_else(|| invalid(format!("coordinate `{p}` is not `re,im`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("cannot parse `{t}` in `{p}`")))
            };
            Ok(Complex64::new(parse(re)?, parse(im)?))
        })
        .collect::<Result<Vec<_>>>()?;
    if z.is_empty() {
        return Err(invalid("no coordinates given"));
    }
    ParticleConfig::new(z)
}

fn parse_list<T: FromStr>(name: &str, s: &str) -> Result<Vec<T>> {
    let v = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| invalid(format!("--{name}: cannot parse `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(invalid(format!("--{name}: empty list")));
    }
    Ok(v)
}

fn exchange_kind(e: Exchange) -> StatisticsKind {
    match e {
        Exchange::Boson => StatisticsKind::Boson,
        Exchange::Fermion => StatisticsKind::Fermion,
    }
}

fn geometry(args: &GeometryArgs, config: &mut Map<String, Value>) -> Result<Table> {
    echo(config, args);
    let z = parse_coords(&args.coords)?;
    let flux = FluxSector::new(args.two_j);
    let kind = exchange_kind(args.statistics);
    let fd_metric = MetricMethod::FiniteDifference { step: args.metric_step };

    let mut t = Table::new(["quantity", "i", "j", "method", "re_hbar", "im_hbar"]);
    let idx = |k: Option<usize>| k.map_or(Value::Null, |k| Value::from(k + 1));
    let row = |q: &str, i: Option<usize>, j: Option<usize>, m: &str, v: Complex64| {
        vec![q.into(), idx(i), idx(j), m.into(), num(v.re), num(v.im)]
    };
    t.push(row(
        "kahler_potential",
        None,
        None,
        "analytic",
        kahler_potential(&z, flux, kind)?.into(),
    ));
    let analytic = berry_connection(&z, flux, kind)?;
    let fd = berry_connection_fd(&z, flux, kind, args.connection_step)?;
    for (m, a) in [("analytic", &analytic), ("finite_difference", &fd)] {
        for (i, v) in a.iter().enumerate() {
            t.push(row("berry_connection", Some(i), None, m, *v));
        }
    }
    let analytic = metric(&z, flux, kind, MetricMethod::Analytic)?;
    let fd = metric(&z, flux, kind, fd_metric)?;
    for (m, g) in [("analytic", &analytic), ("finite_difference", &fd)] {
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                t.push(row("metric", Some(i), Some(j), m, g.get(i, j)));
            }
        }
    }
    Ok(t)
}

fn volume(args: &VolumeArgs, config: &mut Map<String, Value>, ctx: &Context) -> Result<Table> {
    let flux = FluxSector::new(args.two_j);
    let sphere = flux.area_in_h();
    let area = args.area.unwrap_or(sphere);
    echo(config, args);
    config.insert("area".into(), num(area));

    if args.nu != 0.0 && args.statistics != Statistics::Anyon {
        return Err(invalid("--nu applies only to anyon statistics"));
    }
    if args.g != 0.0 && args.statistics != Statistics::Exclusion {
        return Err(invalid("--g applies only to exclusion statistics"));
    }
    let kind = match args.statistics {
        Statistics::Boson => StatisticsKind::Boson,
        Statistics::Fermion => StatisticsKind::Fermion,
        Statistics::Anyon => StatisticsKind::Anyon(args.nu),
        Statistics::Exclusion => StatisticsKind::ExclusionG(args.g),
    };
    kind.validate()?;
    if !(area > 0.0 && area.is_finite()) {
        return Err(invalid(format!("area must be positive, got {area}")));
    }
    let ns: Vec<u64> = match args.n {
        Some(n) => vec![n],
        None => (1..=args.n_max).collect(),
    };
    if ns.is_empty() || ns[0] == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let mc = args.samples > 0;
    if mc && area != sphere {
        return Err(invalid(format!(
            "Monte Carlo runs on the sphere, where the area is 2j = {sphere}; got area {area}"
        )));
    }

    let mut t = Table::new([
        "n_particles",
        "two_j_flux_quanta",
        "statistics",
        "alpha_h",
        "area_h",
        "closed_form_volume_h_pow_N",
        "mc_mean_h_pow_N",
        "mc_std_error_h_pow_N",
        "mc_sigma_deviation_std_errors",
        "mc_samples",
    ]);
    let stat = config.get("statistics").cloned().unwrap_or(Value::Null);
    for n in ns {
        let closed = closed_form_volume_with_area(n, area, kind.alpha());
        // a fermion level holds at most 2j + 1 particles; the volume is exactly zero beyond
        let sampled = match kind.symmetry() {
            Ok(Symmetry::Antisymmetric) => n <= u64::from(flux.lll_dimension()),
            Ok(Symmetry::Symmetric) => true,
            // no sampler without an explicit normalization
            Err(_) => false,
        };
        let est = if mc && sampled {
            let n_usize = usize::try_from(n).map_err(|_| invalid("N too large"))?;
            Some(mc_volume(n_usize, flux, kind, args.samples, ctx.seed, ctx.workers)?)
        } else {
            None
        };
        t.push(vec![
            n.into(),
            args.two_j.into(),
            stat.clone(),
            num(kind.alpha()),
            num(area),
            num(closed),
            opt(est.map(|e| e.mean)),
            opt(est.map(|e| e.std_error)),
            opt(est.map(|e| e.sigma_deviation(closed))),
            est.map_or(Value::Null, |e| e.samples.into()),
        ]);
    }
    Ok(t)
}

/// Value or the error that replaced it; validation errors abort the run,
/// numerical ones become a blank cell and a row status.
fn cell(r: Result<f64>, status: &mut Option<&'static str>) -> Result<Value> {
    match r {
        Ok(v) => Ok(num(v)),
        Err(e) if e.is_validation() => Err(e),
        Err(e) => {
            status.get_or_insert(e.name());
            Ok(Value::Null)
        }
    }
}

fn thermo(args: &ThermoArgs, config: &mut Map<String, Value>) -> Result<Table> {
    echo(config, args);
    let ns: Vec<u64> = parse_list("n", &args.n)?;
    let areas: Vec<f64> = parse_list("area", &args.area)?;
    let alphas: Vec<f64> = parse_list("alpha", &args.alpha)?;
    let betas: Vec<f64> = parse_list("beta", &args.beta)?;

    let mut t = Table::new([
        "n_particles",
        "area_h",
        "alpha_h",
        "beta_inv_energy_units",
        "density_per_h",
        "ln_partition_function_dimensionless",
        "entropy_closed_kB",
        "entropy_exact_kB",
        "stirling_gap_kB",
        "free_energy_energy_units",
        "pressure_energy_units_per_h",
        "pressure_exact_energy_units_per_h",
        "beta_pressure_area_over_n_dimensionless",
        "status",
    ]);
    for &n in &ns {
        for &area in &areas {
            for &alpha in &alphas {
                for &beta in &betas {
                    let input = ThermoInput::new(n, area, alpha, beta).with_energy(args.energy);
                    input.validate()?;
                    let rho = input.density();
                    let mut status = None;
                    let eos = equation_of_state(rho, alpha, beta);
                    let scaled = eos.clone().map(|p| beta * p * area / n as f64);
                    t.push(vec![
                        n.into(),
                        num(area),
                        num(alpha),
                        num(beta),
                        num(rho),
                        cell(partition_function(&input).map(|z| z.ln_z), &mut status)?,
                        cell(entropy_closed(&input), &mut status)?,
                        cell(entropy_exact(&input), &mut status)?,
                        cell(stirling_gap(&input), &mut status)?,
                        cell(free_energy(&input), &mut status)?,
                        cell(eos, &mut status)?,
                        cell(pressure_exact(&input), &mut status)?,
                        cell(scaled, &mut status)?,
                        status.unwrap_or("ok").into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

fn exclusion_limit(args: &ExclusionLimitArgs, config: &mut Map<String, Value>) -> Result<Table> {
    if !(args.rho > 0.0 && args.rho.is_finite()) {
        return Err(invalid(format!("rho must be positive, got {}", args.rho)));
    }
    if !(args.rho_alpha >= 0.0 && args.rho_alpha.is_finite()) {
        return Err(invalid(format!("rho-alpha must be >= 0, got {}", args.rho_alpha)));
    }
    let h0 = args.h0.unwrap_or(0.1 / args.rho);
    echo(config, args);
    config.insert("h0".into(), num(h0));
    let hs: Vec<f64> = (0..=args.steps).map(|k| h0 * 0.5f64.powi(k as i32)).collect();
    let study = limit_convergence_study(args.rho, args.rho_alpha / args.rho, &hs, args.space_dim)?;

    let mut t = Table::new([
        "step",
        "h_phase_space_units",
        "occupation_per_state",
        "g_dimensionless",
        "entropy_exclusion_kB_per_state",
        "entropy_classical_kB_per_state",
        "relative_gap_dimensionless",
    ]);
    for (k, p) in study.iter().enumerate() {
        t.push(vec![
            k.into(),
            num(p.h),
            num(p.occupation),
            num(p.g),
            num(p.exclusion_entropy),
            num(p.classical_entropy),
            num(p.relative_gap),
        ]);
    }
    Ok(t)
}

fn occupation(args: &OccupationArgs, config: &mut Map<String, Value>) -> Result<Table> {
    echo(config, args);
    if !(args.e_min.is_finite() && args.e_max.is_finite() && args.e_min <= args.e_max) {
        return Err(invalid(format!(
            "need finite e-min <= e-max, got {} and {}",
            args.e_min, args.e_max
        )));
    }
    if args.points == 0 {
        return Err(invalid("points must be at least 1"));
    }
    if args.degeneracy == 0 {
        return Err(invalid("degeneracy must be at least 1"));
    }
    if !args.mu.is_finite() {
        return Err(invalid("mu must be finite"));
    }

    let mut t = Table::new([
        "level",
        "degeneracy_states",
        "energy_energy_units",
        "reduced_energy_dimensionless",
        "occupation_per_state",
        "occupation_level_total",
        "status",
    ]);
    let span = args.e_max - args.e_min;
    for k in 0..args.points {
        let e = if args.points == 1 {
            args.e_min
        } else {
            args.e_min + span * k as f64 / (args.points - 1) as f64
        };
        let mut status = None;
        let n = cell(
            equilibrium_occupation(args.g, args.beta, args.mu, &[(args.degeneracy, e)]).map(|v| v[0]),
            &mut status,
        )?;
        let total = n.as_f64().map_or(Value::Null, |n| num(n * args.degeneracy as f64));
        t.push(vec![
            (k + 1).into(),
            args.degeneracy.into(),
            num(e),
            num(args.beta * (e - args.mu)),
            n,
            total,
            status.unwrap_or("ok").into(),
        ]);
    }
    Ok(t)
}

fn dynamics(args: &DynamicsArgs, config: &mut Map<String, Value>) -> Result<Table> {
    let stride = args.stride.or((args.t_end > 0.0).then_some(args.t_end / 100.0));
    echo(config, args);
    config.insert("stride".into(), opt(stride));
    let z = parse_coords(&args.coords)?;
    let potential = match args.potential {
        Potential::Zero => PotentialSpec::Zero,
        Potential::Latitude => PotentialSpec::Latitude(args.lambda),
        Potential::Pairwise => PotentialSpec::PairwiseRadial {
            law: match args.law {
                Law::Harmonic => RadialLaw::Harmonic,
                Law::Coulomb => RadialLaw::Coulomb,
                Law::Gaussian => RadialLaw::Gaussian { width: args.width },
            },
            strength: args.strength,
        },
    };
    let traj = integrate_sampled(
        &z,
        FluxSector::new(args.two_j),
        exchange_kind(args.statistics),
        &potential,
        args.t_end,
        args.tolerance,
        stride,
    )?;

    let mut columns = vec!["t_hbar_per_energy_units".to_string()];
    for i in 1..=z.len() {
        columns.push(format!("x_{i}_stereographic"));
        columns.push(format!("y_{i}_stereographic"));
    }
    columns.push("potential_energy_units".into());
    let mut t = Table::new(columns);
    for ((time, state), v) in traj.times.iter().zip(&traj.states).zip(&traj.energies) {
        let mut row = vec![num(*time)];
        for w in state.coords() {
            row.push(num(w.re));
            row.push(num(w.im));
        }
        row.push(num(*v));
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_lists() {
        let z = parse_coords(" 0,0 ; 1.5,-2;").unwrap();
        assert_eq!(z.coords(), &[Complex64::new(0.0, 0.0), Complex64::new(1.5, -2.0)]);
        assert!(parse_coords("1").is_err());
        assert!(parse_coords("").is_err());
        assert!(parse_coords("a,0").is_err());
    }

    #[test]
    fn numeric_lists() {
        assert_eq!(parse_list::<f64>("area", "1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_list::<u64>("n", "3,-1").is_err());
        assert!(parse_list::<u64>("n", " ").is_err());
    }
}
