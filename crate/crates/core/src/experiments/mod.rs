//! The three canonical experiments and their CSV/plot artifacts.
//!
//! Every runner is deterministic: randomness flows from the configured seed,
//! parallel work is merged by index, and no timestamps or host details reach
//! the output.

pub mod config;
pub mod plot;
pub mod profiles;
pub mod table;

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::bourgain::estimates::{probe_estimate, EstimateId, EstimateParams};
use crate::bourgain::sampler::SamplerConfig;
use crate::diagnostics::{self, FitConfig};
use crate::error::{Error, Result};
use crate::solver::{self, DiagnosticsConfig, Method, PicardParams};
use crate::spectral::{gevrey_sobolev_norm, GevreyParams};

use config::{ExperimentConfig, ExperimentKind, MethodKind};
use table::{Cell, ResultTable};

/// Version string written into every table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Points of `D(sigma)` at or below this are left out of the slope fit.
pub const DRIFT_FIT_FLOOR: f64 = 1e-13;

/// Number of steps the conservation run takes at least across `[0, delta]`.
pub const CONSERVATION_MIN_STEPS: f64 = 200.0;

pub const RADIUS_COLUMNS: [&str; 8] = [
    "t",
    "mass",
    "energy",
    "A_sigma0",
    "sigma_est",
    "sigma_fit_residual",
    "sigma_schedule",
    "saturated_flag",
];
pub const CONSERVATION_COLUMNS: [&str; 5] = ["sigma", "delta", "sup_drift_A", "mass_drift", "energy_drift"];
pub const ESTIMATE_COLUMNS: [&str; 6] = ["estimate_id", "n", "samples", "excluded_zero_rhs", "max_ratio", "median_ratio"];

fn base_table(name: &str, columns: &[&str], cfg: &ExperimentConfig) -> ResultTable {
    let mut t = ResultTable::new(name, columns);
    t.meta("version", VERSION);
    t.meta("seed", cfg.seed);
    // The output location is left out so that the same run written to two
    // directories gives identical bytes.
    let canonical = cfg.to_canonical();
    let echo: Vec<&str> = canonical.lines().filter(|l| !l.starts_with("out_dir =")).collect();
    t.meta("config", echo.join("\n"));
    t
}

fn method(cfg: &ExperimentConfig) -> Method {
    match cfg.method {
        MethodKind::SplitStep => Method::SplitStep,
        MethodKind::Picard => Method::Picard(PicardParams {
            eps: cfg.eps,
            ..PicardParams::default()
        }),
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two
/// distinct abscissae.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

#[derive(Clone, Debug)]
pub struct RadiusDecayOutcome {
    pub table: ResultTable,
    /// Lifespan used for the schedule, from `||u0||_{G^{sigma0,1}}`.
    pub delta: f64,
    pub a0: f64,
    /// `c` of the theoretical `c/t` column.
    pub schedule_constant: f64,
    /// `sigma_est(t1) t1` at the first sample after `t = 0`.
    pub calibrated_constant: Option<f64>,
    /// Samples with `sigma_est(t)` below `calibrated_constant / t`.
    pub schedule_violations: Vec<f64>,
    /// Decay exponent fitted over `[T/10, T]`; zero when nothing decays.
    pub alpha: f64,
    pub induction_sigma: f64,
    /// Samples where `A_{sigma_sched(T)}(t) > 2 A_{sigma0}(0)`.
    pub induction_violations: Vec<f64>,
    pub max_boundary_fraction: f64,
}

/// Evolves the configured data to `T`, tracking the measured strip width
/// alongside the `c/t` schedule.
pub fn run_radius_decay(cfg: &ExperimentConfig) -> Result<RadiusDecayOutcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let nls = cfg.nls()?;
    let sp = cfg.schedule()?;
    let u0 = cfg.data_profile.build(&grid)?;

    let a0 = diagnostics::almost_conserved_quantity(&u0, cfg.sigma0, nls)?;
    let norm = gevrey_sobolev_norm(&u0, GevreyParams::new(cfg.sigma0, 1.0)?)?;
    let delta = diagnostics::lifespan(norm, nls, &sp)?;
    let c = diagnostics::schedule_constant(delta, a0, nls, &sp)?;
    let induction_sigma = c / cfg.t_final;

    let mut sigmas = vec![cfg.sigma0, induction_sigma];
    sigmas.extend(cfg.sigma_list.iter().copied());
    let dcfg = DiagnosticsConfig {
        sigmas,
        radius: Some(FitConfig::default()),
        stride: cfg.stride,
    };
    let traj = solver::evolve(&u0, cfg.t_final, cfg.dt, nls, method(cfg), &dcfg)?;

    let mut table = base_table("radius_decay", &RADIUS_COLUMNS, cfg);
    let mut fit_t = Vec::new();
    let mut fit_s = Vec::new();
    let mut calibrated = None;
    let mut schedule_violations = Vec::new();
    let mut induction_violations = Vec::new();
    let mut list_max = vec![f64::NEG_INFINITY; cfg.sigma_list.len()];
    for s in &traj.samples {
        let d = &s.diagnostics;
        let fit = d.radius;
        let saturated = fit.as_ref().is_none_or(|f| f.saturated);
        let (est, residual) = fit.as_ref().map_or((Cell::Saturated, Cell::Saturated), |f| {
            (Cell::Float(f.sigma_est), Cell::Float(f.residual))
        });
        let schedule = if s.t > 0.0 { Cell::Float(c / s.t) } else { Cell::Saturated };
        table.push(vec![
            Cell::Float(s.t),
            Cell::Float(d.mass),
            Cell::Float(d.energy),
            Cell::Float(d.a_sigma[0]),
            est,
            residual,
            schedule,
            Cell::Int(saturated as i64),
        ]);

        if d.a_sigma[1] > 2.0 * a0 {
            induction_violations.push(s.t);
        }
        for (m, a) in list_max.iter_mut().zip(&d.a_sigma[2..]) {
            *m = m.max(*a);
        }
        if s.t > 0.0 {
            if let Some(f) = fit.as_ref() {
                let cal = *calibrated.get_or_insert(f.sigma_est * s.t);
                if !f.saturated && f.sigma_est < cal / s.t * (1.0 - 1e-12) {
                    schedule_violations.push(s.t);
                }
                if !f.saturated && s.t >= cfg.t_final / 10.0 * (1.0 - 1e-12) {
                    fit_t.push(s.t.ln());
                    fit_s.push(f.sigma_est.ln());
                }
            }
        }
    }
    let alpha = fit_slope(&fit_t, &fit_s).map_or(0.0, |s| (-s).max(0.0));

    table.meta("delta", fmt_f(delta));
    table.meta("A_sigma0_initial", fmt_f(a0));
    table.meta("schedule_constant", fmt_f(c));
    table.meta("calibrated_constant", calibrated.map_or("none".into(), fmt_f));
    table.meta("alpha", fmt_f(alpha));
    table.meta("schedule_violations", schedule_violations.len());
    table.meta("induction_sigma", fmt_f(induction_sigma));
    table.meta("induction_violations", induction_violations.len());
    for (s, m) in cfg.sigma_list.iter().zip(&list_max) {
        table.meta("sup_A_sigma", format!("sigma={} max={}", fmt_f(*s), fmt_f(*m)));
    }
    table.meta("max_boundary_fraction", fmt_f(traj.max_boundary_fraction));
    Ok(RadiusDecayOutcome {
        table,
        delta,
        a0,
        schedule_constant: c,
        calibrated_constant: calibrated,
        schedule_violations,
        alpha,
        induction_sigma,
        induction_violations,
        max_boundary_fraction: traj.max_boundary_fraction,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationRow {
    pub sigma: f64,
    pub delta: f64,
    pub dt: f64,
    /// `sup_{[0, delta]} A_sigma - A_sigma(0)`.
    pub sup_drift: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
    /// `max_t |A_0(t) - M(t) - E(t)|`.
    pub identity_defect: f64,
}

#[derive(Clone, Debug)]
pub struct ConservationOutcome {
    pub table: ResultTable,
    /// First row is `sigma = 0`, then `sigma_list` in order.
    pub rows: Vec<ConservationRow>,
    /// Slope of `log D` against `log sigma` over points above the floor.
    pub slope: Option<f64>,
}

fn relative_drift(values: impl Iterator<Item = f64>, initial: f64) -> f64 {
    let spread = values.map(|v| (v - initial).abs()).fold(0.0, f64::max);
    if initial == 0.0 {
        spread
    } else {
        spread / initial.abs()
    }
}

fn conservation_row(cfg: &ExperimentConfig, u0: &crate::spectral::Field, sigma: f64) -> Result<ConservationRow> {
    let nls = cfg.nls()?;
    let sp = cfg.schedule()?;
    let norm = gevrey_sobolev_norm(u0, GevreyParams::new(sigma, 1.0)?)?;
    let delta = diagnostics::lifespan(norm, nls, &sp)?;
    let dt = cfg.dt.min(delta / CONSERVATION_MIN_STEPS);
    let dcfg = DiagnosticsConfig {
        sigmas: vec![sigma, 0.0],
        radius: None,
        stride: 1,
    };
    let traj = solver::evolve(u0, delta, dt, nls, method(cfg), &dcfg)?;
    let first = &traj.samples[0].diagnostics;
    let a_init = first.a_sigma[0];
    let sup = traj.samples.iter().map(|s| s.diagnostics.a_sigma[0]).fold(a_init, f64::max);
    let identity_defect = traj
        .samples
        .iter()
        .map(|s| {
            let d = &s.diagnostics;
            (d.a_sigma[1] - d.mass - d.energy).abs()
        })
        .fold(0.0, f64::max);
    Ok(ConservationRow {
        sigma,
        delta,
        dt,
        sup_drift: sup - a_init,
        mass_drift: relative_drift(traj.samples.iter().map(|s| s.diagnostics.mass), first.mass),
        energy_drift: relative_drift(traj.samples.iter().map(|s| s.diagnostics.energy), first.energy),
        identity_defect,
    })
}

/// For `sigma = 0` and each configured `sigma`, evolves over one lifespan and
/// records the growth of `A_sigma`.
pub fn run_conservation(cfg: &ExperimentConfig) -> Result<ConservationOutcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = cfg.data_profile.build(&grid)?;
    let mut sigmas = vec![0.0];
    sigmas.extend(cfg.sigma_list.iter().copied());

    let rows = pool(cfg.workers)?.install(|| {
        sigmas
            .par_iter()
            .map(|&s| conservation_row(cfg, &u0, s))
            .collect::<Vec<_>>()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.sigma > 0.0 && r.sup_drift > DRIFT_FIT_FLOOR)
        .map(|r| (r.sigma.ln(), r.sup_drift.ln()))
        .unzip();
    let slope = fit_slope(&xs, &ys);

    let mut table = base_table("conservation", &CONSERVATION_COLUMNS, cfg);
    for r in &rows {
        table.push(vec![
            Cell::Float(r.sigma),
            Cell::Float(r.delta),
            Cell::Float(r.sup_drift),
            Cell::Float(r.mass_drift),
            Cell::Float(r.energy_drift),
        ]);
    }
    table.meta("slope", slope.map_or("undefined".into(), fmt_f));
    table.meta("fit_floor", fmt_f(DRIFT_FIT_FLOOR));
    table.meta("fit_points", xs.len());
    let defect = rows.iter().map(|r| r.identity_defect).fold(0.0, f64::max);
    table.meta("A0_identity_defect", fmt_f(defect));
    Ok(ConservationOutcome { table, rows, slope })
}

/// Probes every estimate at resolutions `n` and `2n`.
pub fn run_estimate_suite(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let nls = cfg.nls()?;
    let params = EstimateParams {
        sigma: cfg.sigma0,
        samples: cfg.samples,
        seed: cfg.seed,
        conj_pattern: cfg.conj_pattern(),
        sampler: SamplerConfig {
            box_len: cfg.box_len,
            ..SamplerConfig::default()
        },
        ..EstimateParams::new(nls)
    };
    params.validate()?;
    let ladder = [cfg.n, 2 * cfg.n];
    let pool = pool(cfg.workers)?;
    let mut table = base_table("estimate_suite", &ESTIMATE_COLUMNS, cfg);
    for id in EstimateId::ALL {
        log::info!("probing {id}");
        let report = pool.install(|| probe_estimate(id, &params, &ladder))?;
        for r in &report.per_resolution {
            table.push(vec![
                Cell::Text(id.as_str().to_string()),
                Cell::Int(r.n as i64),
                Cell::Int(r.samples as i64),
                Cell::Int(r.excluded_zero_rhs as i64),
                Cell::Float(r.max_ratio),
                Cell::Float(r.median_ratio),
            ]);
        }
        table.meta(&format!("growth_{id}"), fmt_f(report.growth()));
    }
    table.meta("b", fmt_f(params.b));
    Ok(table)
}

/// Runs the configured experiment and returns its table.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    match cfg.experiment {
        ExperimentKind::RadiusDecay => Ok(run_radius_decay(cfg)?.table),
        ExperimentKind::Conservation => Ok(run_conservation(cfg)?.table),
        ExperimentKind::EstimateSuite => run_estimate_suite(cfg),
    }
}

/// Runs the experiment and writes `<experiment>.csv` and `<experiment>.gp`
/// into `cfg.out_dir`; returns the CSV path.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let table = run(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let csv_name = format!("{}.csv", table.name);
    let csv = cfg.out_dir.join(&csv_name);
    table.write_csv(&csv)?;
    plot::emit_plot_script(&table, &csv_name, &cfg.out_dir.join(format!("{}.gp", table.name)))?;
    Ok(csv)
}
