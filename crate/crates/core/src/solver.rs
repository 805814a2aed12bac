//! Time integration of `i u_t + Δu = |u|^{p-1} u`.
//!
//! Two integrators are provided: Strang split-step Fourier (exact nonlinear
//! phase flow composed with the exact free flow) and a Duhamel fixed-point
//! stepper that iterates
//! `u(s) = e^{isΔ}u0 - i ∫_0^s e^{i(s-r)Δ} |u|^{p-1}u(r) dr`
//! on a set of quadrature nodes in `[0, dt]`.

use log::warn;
use num_complex::Complex64;
use rustfft::FftDirection;

use crate::diagnostics::{self, FitConfig, RadiusFit};
use crate::error::{Error, Result};
use crate::fft;
use crate::spectral::{self, Field, GevreyParams, GridSpec, BOUNDARY_LEAK_TOL};

/// Power of the defocusing nonlinearity; always an odd integer `>= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NlsParams {
    p: u32,
}

impl NlsParams {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "nonlinearity power must be an odd integer >= 3, got {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Zero-padding factor per axis that removes all aliasing from the
    /// degree-`p` product: `ceil((p+1)/2)`.
    pub fn dealias_factor(&self) -> usize {
        (self.p as usize + 2) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardParams {
    pub max_iter: usize,
    /// Absolute tolerance on the `G^{0,1}` distance between iterates.
    pub tol: f64,
    /// Trapezoid nodes on `[0, dt]`, endpoints included.
    pub quad_points: usize,
    pub b: f64,
    pub b_prime: f64,
    /// When set, steps above `c0 (1 + ||u0||_{G^{0,1}})^{-(2(p-1) - eps)}` are refused.
    pub c0: Option<f64>,
    pub eps: f64,
}

impl Default for PicardParams {
    fn default() -> Self {
        Self {
            max_iter: 60,
            tol: 1e-12,
            quad_points: 9,
            b: 0.6,
            b_prime: 0.8,
            c0: None,
            eps: 0.0,
        }
    }
}

impl PicardParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.quad_points < 2 {
            return Err(Error::InvalidParameter("quad_points must be >= 2".into()));
        }
        if !(0.5 < self.b && self.b < self.b_prime && self.b_prime < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 1/2 < b < b' < 1, got b = {}, b' = {}",
                self.b, self.b_prime
            )));
        }
        if let Some(c0) = self.c0 {
            if !(c0 > 0.0) {
                return Err(Error::InvalidParameter(format!("c0 must be > 0, got {c0}")));
            }
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be >= 0, got {}", self.eps)));
        }
        Ok(())
    }
}

/// `c0 (1 + ||u0||_{G^{0,1}})^{-(2(p-1) - eps)}`.
pub fn contraction_threshold(field: &Field, nls: NlsParams, c0: f64, eps: f64) -> f64 {
    let norm = spectral::gevrey_sobolev_norm(field, GevreyParams { sigma: 0.0, s: 1.0 })
        .expect("sigma = 0 never trips the overflow guard");
    c0 * (1.0 + norm).powf(-(2.0 * (nls.p as f64 - 1.0) - eps))
}

#[inline]
fn power_term(u: Complex64, half: i32) -> Complex64 {
    u * u.norm_sqr().powi(half)
}

/// Dealiased `|u|^{p-1} u` on raw DFT coefficients: pad to
/// `ceil((p+1)/2) n` points per axis, multiply pointwise, truncate.
pub(crate) fn dealiased_power_raw(raw: &[Complex64], grid: &GridSpec, nls: NlsParams) -> Vec<Complex64> {
    let shape = grid.shape();
    let fine: Vec<usize> = shape.iter().map(|n| n * nls.dealias_factor()).collect();
    let mut values = fft::resample(raw, &shape, &fine);
    fft::transform(&mut values, &fine, FftDirection::Inverse);
    let half = (nls.p as i32 - 1) / 2;
    for v in &mut values {
        *v = power_term(*v, half);
    }
    let coarse = fft::analyze(&values, &fine);
    fft::resample(&coarse, &fine, &shape)
}

/// `|u|^{p-1} u`, dealiased.
pub fn nonlinearity(field: &Field, nls: NlsParams) -> Field {
    let raw = dealiased_power_raw(&field.raw_coefficients(), field.grid(), nls);
    Field::from_raw(*field.grid(), raw)
}

/// `M(u) = ||u||_{L^2}^2` from the spectrum.
pub fn mass(field: &Field) -> f64 {
    let n = field.l2_norm();
    n * n
}

/// `||∇u||_{L^2}^2` from the spectrum.
pub fn gradient_norm_sq(field: &Field) -> f64 {
    let freqs = field.grid().frequencies();
    let sum: f64 = field
        .spectrum()
        .iter()
        .zip(&freqs)
        .map(|(c, xi)| spectral::norm_sq(*xi) * c.norm_sqr())
        .sum();
    field.grid().volume() * sum
}

/// Riemann sum of `|u|^{p+1}`.
pub(crate) fn potential_integral(values: &[Complex64], grid: &GridSpec, nls: NlsParams) -> f64 {
    let cell = grid.dx().powi(grid.dim() as i32);
    cell * spectral::lebesgue_sum(values, nls.p as f64 + 1.0)
}

/// `E(u) = ||∇u||^2 + 2/(p+1) ||u||_{p+1}^{p+1}`.
pub fn energy(field: &Field, nls: NlsParams) -> f64 {
    let pot = potential_integral(field.values(), field.grid(), nls);
    gradient_norm_sq(field) + 2.0 / (nls.p as f64 + 1.0) * pot
}

/// Precomputed split-step propagator for a fixed `dt`.
struct SplitStepper {
    shape: Vec<usize>,
    half: i32,
    dt: f64,
    /// `e^{-i dt |xi|^2} / N` in FFT order.
    propagator: Vec<Complex64>,
}

impl SplitStepper {
    fn new(grid: &GridSpec, nls: NlsParams, dt: f64) -> Self {
        let scale = 1.0 / grid.len() as f64;
        let propagator = grid
            .frequencies()
            .iter()
            .map(|xi| Complex64::from_polar(scale, -dt * spectral::norm_sq(*xi)))
            .collect();
        Self {
            shape: grid.shape(),
            half: (nls.p as i32 - 1) / 2,
            dt,
            propagator,
        }
    }

    fn phase(&self, values: &mut [Complex64], tau: f64) {
        for v in values.iter_mut() {
            let rot = -tau * v.norm_sqr().powi(self.half);
            *v *= Complex64::from_polar(1.0, rot);
        }
    }

    fn step(&self, values: &mut [Complex64]) {
        self.phase(values, 0.5 * self.dt);
        fft::transform(values, &self.shape, FftDirection::Forward);
        for (v, e) in values.iter_mut().zip(&self.propagator) {
            *v *= e;
        }
        fft::transform(values, &self.shape, FftDirection::Inverse);
        self.phase(values, 0.5 * self.dt);
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    Ok(())
}

/// One Strang step: half nonlinear phase, free flow over `dt`, half phase.
pub fn step_splitstep(field: &Field, dt: f64, nls: NlsParams) -> Result<Field> {
    check_dt(dt)?;
    let stepper = SplitStepper::new(field.grid(), nls, dt);
    let mut values = field.values().to_vec();
    stepper.step(&mut values);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 1 });
    }
    Field::from_values(*field.grid(), values)
}

/// Result of one Duhamel/Picard step.
#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub field: Field,
    /// Number of iterates computed after the free evolution `u^{(0)}`.
    pub iterations: usize,
    /// `max_nodes ||u^{(n)} - u^{(n-1)}||_{G^{0,1}}` for `n = 1, 2, ...`.
    pub residuals: Vec<f64>,
}

struct PicardStepper {
    grid: GridSpec,
    nls: NlsParams,
    nodes: Vec<f64>,
    /// `|xi|^2` per spectrum index.
    omega: Vec<f64>,
    /// `<xi>^2` per spectrum index.
    weight_h1: Vec<f64>,
    params: PicardParams,
}

impl PicardStepper {
    fn new(grid: &GridSpec, nls: NlsParams, dt: f64, params: PicardParams) -> Self {
        let q = params.quad_points;
        let h = dt / (q - 1) as f64;
        let freqs = grid.frequencies();
        let omega: Vec<f64> = freqs.iter().map(|xi| spectral::norm_sq(*xi)).collect();
        Self {
            grid: *grid,
            nls,
            nodes: (0..q).map(|j| j as f64 * h).collect(),
            weight_h1: omega.iter().map(|w| 1.0 + w).collect(),
            omega,
            params,
        }
    }

    fn h1_distance(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let sum: f64 = a
            .iter()
            .zip(b)
            .zip(&self.weight_h1)
            .map(|((x, y), w)| w * (x - y).norm_sqr())
            .sum();
        (self.grid.volume() * sum).sqrt()
    }

    /// Iterates to the fixed point; returns raw coefficients at every node.
    fn solve(&self, raw0: &[Complex64]) -> Result<(Vec<Vec<Complex64>>, usize, Vec<f64>)> {
        let free = |s: f64| -> Vec<Complex64> {
            raw0.iter()
                .zip(&self.omega)
                .map(|(a, w)| a * Complex64::from_polar(1.0, -s * w))
                .collect()
        };
        let mut current: Vec<Vec<Complex64>> = self.nodes.iter().map(|&s| free(s)).collect();
        let h = if self.nodes.len() > 1 { self.nodes[1] } else { 0.0 };
        let mut residuals = Vec::new();

        for iteration in 1..=self.params.max_iter {
            // interaction picture: e^{-isΔ} N(u(s)), accumulated by the trapezoid rule
            let pulled: Vec<Vec<Complex64>> = current
                .iter()
                .zip(&self.nodes)
                .map(|(u, &s)| {
                    dealiased_power_raw(u, &self.grid, self.nls)
                        .into_iter()
                        .zip(&self.omega)
                        .map(|(nl, w)| nl * Complex64::from_polar(1.0, s * w))
                        .collect()
                })
                .collect();

            let mut next = Vec::with_capacity(self.nodes.len());
            let mut integral = vec![Complex64::default(); raw0.len()];
            for (j, &s) in self.nodes.iter().enumerate() {
                if j > 0 {
                    for ((acc, a), b) in integral.iter_mut().zip(&pulled[j - 1]).zip(&pulled[j]) {
                        *acc += 0.5 * h * (a + b);
                    }
                }
                let u: Vec<Complex64> = raw0
                    .iter()
                    .zip(&integral)
                    .zip(&self.omega)
                    .map(|((a, i), w)| (a - Complex64::i() * i) * Complex64::from_polar(1.0, -s * w))
                    .collect();
                next.push(u);
            }

            let residual = next
                .iter()
                .zip(&current)
                .map(|(a, b)| self.h1_distance(a, b))
                .fold(0.0, f64::max);
            residuals.push(residual);
            current = next;
            if !residual.is_finite() {
                break;
            }
            if residual <= self.params.tol {
                return Ok((current, iteration, residuals));
            }
        }
        Err(Error::NoConvergence {
            iterations: residuals.len(),
            residual: residuals.last().copied().unwrap_or(f64::NAN),
        })
    }
}

/// One Duhamel step of length `dt`, converged by Picard iteration.
pub fn step_duhamel_picard(field: &Field, dt: f64, nls: NlsParams, pp: PicardParams) -> Result<Field> {
    step_duhamel_picard_detailed(field, dt, nls, pp).map(|o| o.field)
}

/// As [`step_duhamel_picard`], also reporting the iterate residuals.
pub fn step_duhamel_picard_detailed(
    field: &Field,
    dt: f64,
    nls: NlsParams,
    pp: PicardParams,
) -> Result<PicardOutcome> {
    check_dt(dt)?;
    pp.validate()?;
    if let Some(c0) = pp.c0 {
        let dt_max = contraction_threshold(field, nls, c0, pp.eps);
        if dt > dt_max {
            return Err(Error::AboveContractionThreshold { dt, dt_max });
        }
    }
    let stepper = PicardStepper::new(field.grid(), nls, dt, pp);
    let (nodes, iterations, residuals) = stepper.solve(&field.raw_coefficients())?;
    let last = nodes.into_iter().last().expect("at least two nodes");
    Ok(PicardOutcome {
        field: Field::from_raw(*field.grid(), last),
        iterations,
        residuals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    SplitStep,
    Picard(PicardParams),
}

/// What to record at each trajectory sample.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsConfig {
    /// Strip widths at which `A_sigma` is evaluated.
    pub sigmas: Vec<f64>,
    /// Radius estimation settings; `None` skips the fit.
    pub radius: Option<FitConfig>,
    /// Steps between samples; the final time is always sampled.
    pub stride: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            sigmas: Vec::new(),
            radius: None,
            stride: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiagnosticsRow {
    pub mass: f64,
    pub energy: f64,
    /// One entry per configured sigma, same order.
    pub a_sigma: Vec<f64>,
    pub radius: Option<RadiusFit>,
}

#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub t: f64,
    pub field: Field,
    pub diagnostics: DiagnosticsRow,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Largest share of mass found within `L/4` of the box boundary.
    pub max_boundary_fraction: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("a trajectory always holds the initial sample")
    }
}

fn diagnose(field: &Field, nls: NlsParams, cfg: &DiagnosticsConfig) -> Result<DiagnosticsRow> {
    let a_sigma = cfg
        .sigmas
        .iter()
        .map(|&s| diagnostics::almost_conserved_quantity(field, s, nls))
        .collect::<Result<Vec<_>>>()?;
    let radius = match &cfg.radius {
        Some(fit) if !field.is_zero() => Some(diagnostics::estimate_radius(field, fit)?),
        _ => None,
    };
    Ok(DiagnosticsRow {
        mass: mass(field),
        energy: energy(field, nls),
        a_sigma,
        radius,
    })
}

enum Stepper {
    Split { full: SplitStepper },
    Picard(PicardParams),
}

/// Evolves `field` to time `t_final` with steps of `dt` (the last step is
/// shortened to land on `t_final`), sampling diagnostics every `stride` steps.
pub fn evolve(
    field: &Field,
    t_final: f64,
    dt: f64,
    nls: NlsParams,
    method: Method,
    cfg: &DiagnosticsConfig,
) -> Result<Trajectory> {
    check_dt(dt)?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("T must be >= 0, got {t_final}")));
    }
    if cfg.stride == 0 {
        return Err(Error::InvalidParameter("stride must be positive".into()));
    }
    if let Method::Picard(pp) = method {
        pp.validate()?;
    }
    let grid = *field.grid();

    let mut samples = vec![TrajectorySample {
        t: 0.0,
        field: field.clone(),
        diagnostics: diagnose(field, nls, cfg)?,
    }];
    let mut max_boundary_fraction = field.boundary_mass_fraction();
    if t_final == 0.0 {
        return Ok(Trajectory {
            samples,
            max_boundary_fraction,
        });
    }

    let steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let last_dt = t_final - (steps - 1) as f64 * dt;
    let stepper = match method {
        Method::SplitStep => Stepper::Split {
            full: SplitStepper::new(&grid, nls, dt),
        },
        Method::Picard(pp) => Stepper::Picard(pp),
    };

    let mut values = field.values().to_vec();
    let mut current = field.clone();
    let mut warned = false;
    for step in 1..=steps {
        let h = if step == steps { last_dt } else { dt };
        match &stepper {
            Stepper::Split { full } => {
                if step == steps && (h - dt).abs() > 1e-15 * dt {
                    SplitStepper::new(&grid, nls, h).step(&mut values);
                } else {
                    full.step(&mut values);
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { step });
                }
            }
            Stepper::Picard(pp) => {
                current = step_duhamel_picard(&current, h, nls, *pp)?;
            }
        }

        let t = if step == steps { t_final } else { step as f64 * dt };
        if step % cfg.stride == 0 || step == steps {
            if let Stepper::Split { .. } = stepper {
                current = Field::from_values(grid, values.clone())?;
            }
            let leak = current.boundary_mass_fraction();
            max_boundary_fraction = max_boundary_fraction.max(leak);
            if leak > BOUNDARY_LEAK_TOL && !warned {
                warn!("boundary leak: {leak:.3e} of the mass lies within L/4 of the box edge at t = {t}");
                warned = true;
            }
            samples.push(TrajectorySample {
                t,
                diagnostics: diagnose(&current, nls, cfg)?,
                field: current.clone(),
            });
        }
    }

    Ok(Trajectory {
        samples,
        max_boundary_fraction,
    })
}
