//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gevrey_nls::bourgain::estimates::EstimateId;
use gevrey_nls::diagnostics::{
    commutator_sigma_slope, estimate_radius, gevrey_commutator, lifespan, sigma_schedule, FitConfig, ScheduleParams,
};
use gevrey_nls::experiments::config::{ExperimentConfig, ExperimentKind};
use gevrey_nls::experiments::profiles::DataProfile;
use gevrey_nls::experiments::{run_conservation, run_estimate_suite, run_radius_decay};
use gevrey_nls::solver::{evolve, DiagnosticsConfig, Method, NlsParams, PicardParams};
use gevrey_nls::spectral::make_grid;
use gevrey_nls::{Complex64, Field, Result};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn nls5() -> NlsParams {
    NlsParams::new(5).unwrap()
}

fn plane_wave() -> Result<Verdict> {
    let grid = make_grid(1, 64, 2.0 * PI)?;
    let u0 = DataProfile::PlaneWave.build(&grid)?;
    let exact = Field::from_fn(grid, |x| Complex64::from_polar(1.0, x[0] - 2.0)).unwrap();
    let cfg = DiagnosticsConfig { stride: usize::MAX, ..DiagnosticsConfig::default() };
    let split = evolve(&u0, 1.0, 1e-3, nls5(), Method::SplitStep, &cfg)?;
    let picard = evolve(&u0, 1.0, 1e-3, nls5(), Method::Picard(PicardParams::default()), &cfg)?;
    let rel = |f: &Field| f.l2_distance(&exact).map(|d| d / exact.l2_norm());
    let (es, ep) = (rel(&split.last().field)?, rel(&picard.last().field)?);
    Ok(verdict(
        es <= 1e-8 && ep <= 1e-8,
        format!("split-step rel err {es:.3e}, Picard rel err {ep:.3e} (<= 1e-8)"),
    ))
}

fn conservation_drift() -> Result<Verdict> {
    let grid = make_grid(1, 512, 40.0)?;
    let u0 = DataProfile::Sech.build(&grid)?;
    let cfg = DiagnosticsConfig { sigmas: vec![0.0], stride: 10, ..DiagnosticsConfig::default() };
    let traj = evolve(&u0, 5.0, 1e-3, nls5(), Method::SplitStep, &cfg)?;
    let d0 = &traj.samples[0].diagnostics;
    let (mut dm, mut de, mut identity) = (0.0f64, 0.0f64, 0.0f64);
    for s in &traj.samples {
        let d = &s.diagnostics;
        dm = dm.max((d.mass - d0.mass).abs() / d0.mass);
        de = de.max((d.energy - d0.energy).abs() / d0.energy.abs());
        let da = d.a_sigma[0] - d0.a_sigma[0];
        identity = identity.max((da - (d.mass - d0.mass) - (d.energy - d0.energy)).abs());
    }
    Ok(verdict(
        dm <= 1e-10 && de <= 1e-6 && identity <= 1e-12,
        format!("mass drift {dm:.3e} (<= 1e-10), energy drift {de:.3e} (<= 1e-6), A0 vs M+E drift {identity:.3e} (<= 1e-12)"),
    ))
}

fn commutator_linearity() -> Result<Verdict> {
    let sigmas = [1e-4, 1e-3, 1e-2];
    let grid = make_grid(1, 512, 40.0)?;
    let sech = DataProfile::Sech.build(&grid)?;
    let slope_sech = commutator_sigma_slope(&sech, nls5(), &sigmas)?;

    let g = make_grid(1, 64, 2.0 * PI)?;
    let k = 1.0;
    let mode = Field::from_fn(g, |x| Complex64::from_polar(0.8, k * x[0])).unwrap();
    let slope_mode = commutator_sigma_slope(&mode, nls5(), &sigmas)?;
    let mut closed = 0.0f64;
    for &s in &sigmas {
        let measured = gevrey_commutator(&mode, s, nls5())?.l2_norm();
        let expected = 0.8f64.powi(4) * (1.0 - (-4.0 * s * k).exp()) * mode.l2_norm();
        closed = closed.max((measured / expected - 1.0).abs());
    }
    Ok(verdict(
        (0.9..=1.1).contains(&slope_sech) && (slope_mode - 1.0).abs() <= 0.01 && closed <= 1e-10,
        format!("sech slope {slope_sech:.4} in [0.9, 1.1], single-mode slope {slope_mode:.4} (1 +- 0.01), closed-form rel err {closed:.2e}"),
    ))
}

fn almost_conservation() -> Result<Verdict> {
    let cfg = ExperimentConfig {
        experiment: ExperimentKind::Conservation,
        n: 512,
        box_len: 40.0,
        data_profile: DataProfile::Sech,
        sigma_list: vec![1e-4, 1e-3, 1e-2],
        c0: 200.0,
        dt: 1e-4,
        ..ExperimentConfig::default()
    };
    let out = run_conservation(&cfg)?;
    let d0 = out.rows[0].sup_drift;
    let slope = out.slope.unwrap_or(f64::NAN);
    Ok(verdict(
        (0.8..=1.2).contains(&slope) && d0 <= 1e-8,
        format!("D(sigma) slope {slope:.4} in [0.8, 1.2], D(0) = {d0:.3e} (<= 1e-8)"),
    ))
}

fn radius_estimator() -> Result<Verdict> {
    let grid = make_grid(1, 1024, 80.0)?;
    let fit = FitConfig::default();

    let spectrum = grid
        .wavevectors()
        .into_iter()
        .map(|k| Complex64::from((-0.3 * grid.xi(k[0]).abs()).exp()))
        .collect();
    let constructed = Field::from_spectrum(grid, spectrum)?;
    let s_con = estimate_radius(&constructed, &fit)?.sigma_est;

    let sech = DataProfile::Sech.build(&grid)?;
    let mut oracle = 0.0f64;
    for k in 1..40 {
        let xi = grid.xi(k);
        let expected = PI / (FRAC_PI_2 * xi).cosh() / grid.box_len();
        let got = sech.coefficient([k, 0]);
        oracle = oracle.max((got - Complex64::from(expected)).norm() / expected);
    }
    let s_sech = estimate_radius(&sech, &fit)?.sigma_est;

    let gauss = estimate_radius(&DataProfile::Gaussian.build(&grid)?, &fit)?;
    Ok(verdict(
        (s_con - 0.3).abs() <= 1e-3 && (s_sech / FRAC_PI_2 - 1.0).abs() <= 0.05 && oracle <= 1e-6 && gauss.saturated,
        format!(
            "constructed {s_con:.6} (0.3 +- 1e-3), sech {s_sech:.4} (pi/2 +- 5%, transform oracle rel err {oracle:.1e}), gaussian saturated = {}",
            gauss.saturated
        ),
    ))
}

fn schedule_formulas() -> Result<Verdict> {
    let sp = ScheduleParams::new(1.0, 1.0, 0.0)?;
    let delta = lifespan(1.0, nls5(), &sp)?;
    let sigma = sigma_schedule(1.0, 1.0, 1.0, nls5(), &sp)?;
    let products: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&t| sigma_schedule(t, 0.3, 2.5, nls5(), &sp).map(|s| s * t))
        .collect::<Result<_>>()?;
    let spread = products.iter().map(|p| (p / products[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok(verdict(
        delta == 2f64.powi(-8) && sigma == 2f64.powi(-7) && spread <= 1e-12,
        format!("lifespan {delta:e} (2^-8), sigma_schedule {sigma:e} (2^-7), sigma*T spread {spread:.1e}"),
    ))
}

fn estimate_cfg() -> ExperimentConfig {
    ExperimentConfig {
        experiment: ExperimentKind::EstimateSuite,
        n: 64,
        box_len: 2.0 * PI,
        p: 5,
        sigma0: 0.1,
        samples: 100,
        seed: 11,
        workers: 2,
        ..ExperimentConfig::default()
    }
}

fn estimate_suite(csv: &mut Option<String>) -> Result<Verdict> {
    let table = run_estimate_suite(&estimate_cfg())?;
    let id_col = table.column_index("estimate_id").unwrap();
    let max_col = table.column_index("max_ratio").unwrap();
    let mut worst = (String::new(), 0.0f64);
    let mut ok = true;
    for id in EstimateId::ALL {
        let maxes: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r[id_col] == gevrey_nls::experiments::table::Cell::Text(id.as_str().into()))
            .filter_map(|r| r[max_col].as_f64())
            .collect();
        let finite = maxes.len() == 2 && maxes.iter().all(|m| m.is_finite() && *m > 0.0);
        let growth = if finite { maxes[1] / maxes[0] } else { f64::INFINITY };
        ok &= finite && growth < 2.0;
        if growth > worst.1 {
            worst = (id.as_str().to_string(), growth);
        }
    }
    *csv = Some(table.to_csv());
    Ok(verdict(
        ok,
        format!("{} estimates finite, largest growth 64 -> 128 is {:.4} ({}) (< 2)", EstimateId::ALL.len(), worst.1, worst.0),
    ))
}

fn radius_decay() -> Result<Verdict> {
    let cfg = ExperimentConfig {
        experiment: ExperimentKind::RadiusDecay,
        n: 1024,
        box_len: 80.0,
        p: 5,
        data_profile: DataProfile::Sech,
        t_final: 10.0,
        dt: 1e-3,
        stride: 100,
        ..ExperimentConfig::default()
    };
    let out = run_radius_decay(&cfg)?;
    Ok(verdict(
        out.calibrated_constant.is_some() && out.schedule_violations.is_empty() && out.alpha <= 1.2,
        format!(
            "calibrated c = {:.4}, samples below c/t: {}, alpha = {:.4} (<= 1.2)",
            out.calibrated_constant.unwrap_or(f64::NAN),
            out.schedule_violations.len(),
            out.alpha
        ),
    ))
}

fn determinism(first: Option<&str>) -> Result<Verdict> {
    let first = match first {
        Some(s) => s.to_string(),
        None => run_estimate_suite(&estimate_cfg())?.to_csv(),
    };
    let second = run_estimate_suite(&estimate_cfg())?.to_csv();
    Ok(verdict(
        first == second,
        format!("two runs with seed 11 and 2 workers: {} bytes, identical = {}", first.len(), first == second),
    ))
}

fn report(name: &str, limit: Duration, f: impl FnOnce() -> Result<Verdict>) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(v) => (v.pass && elapsed <= limit, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} {name}: {detail}; {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs_f64());
    pass
}

fn main() -> ExitCode {
    let s = Duration::from_secs_f64;
    let mut csv = None;
    let results = [
        report("1 plane-wave exactness", s(1.0), plane_wave),
        report("2 conservation", s(30.0), conservation_drift),
        report("3 commutator sigma-linearity", s(5.0), commutator_linearity),
        report("4 almost conservation", s(120.0), almost_conservation),
        report("5 radius estimator", s(1.0), radius_estimator),
        report("6 schedule formulas", s(0.1), schedule_formulas),
        report("7 estimate suite", s(300.0), || estimate_suite(&mut csv)),
        report("8 radius-decay consistency", s(300.0), radius_decay),
        report("9 determinism", s(600.0), || determinism(csv.as_deref())),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
