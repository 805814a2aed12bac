//! Analyticity diagnostics: the almost-conserved functional `A_sigma`, the
//! Gevrey commutator, a radius estimator reading `e^{-sigma ||xi||}` decay off
//! the spectrum, and the closed-form lifespan and sigma-schedule formulas.

use crate::error::{Error, Result};
use crate::solver::{self, NlsParams};
use crate::spectral::{self, apply_multiplier, Field, GevreyParams, MultiplierSpec, Sign};

/// Critical Sobolev indices `(s0, s1)` of the multilinear estimates.
pub fn critical_indices(p: u32, d: usize) -> Result<(f64, f64)> {
    NlsParams::new(p)?;
    let p = p as f64;
    let (s0, s1) = match d {
        1 => ((p - 3.0) / (2.0 * (p - 1.0)), (p - 5.0) / (2.0 * (p - 2.0))),
        2 => ((p - 2.0) / (p - 1.0), (p - 3.0) / (p - 2.0)),
        _ => return Err(Error::InvalidDimension(d)),
    };
    assert!(s1 <= s0 && s0 <= 1.0, "index ordering violated: s0 = {s0}, s1 = {s1}");
    Ok((s0, s1))
}

/// `A_sigma = ||u||^2_{G^{sigma,1}} + 2/(p+1) ||e^{sigma||D||} u||^{p+1}_{L^{p+1}}`.
pub fn almost_conserved_quantity(field: &Field, sigma: f64, nls: NlsParams) -> Result<f64> {
    let g = spectral::gevrey_sobolev_norm_sq(field, GevreyParams::new(sigma, 1.0)?)?;
    let pot = if sigma == 0.0 {
        solver::potential_integral(field.values(), field.grid(), nls)
    } else {
        let v = apply_multiplier(field, MultiplierSpec::GevreyExp { sigma, sign: Sign::Plus })?;
        solver::potential_integral(v.values(), v.grid(), nls)
    };
    Ok(g + 2.0 / (nls.p() as f64 + 1.0) * pot)
}

/// `f(v) = -( N(v) - e^{sigma||D||} N(e^{-sigma||D||} v) )` with `N(u) = |u|^{p-1}u`.
pub fn gevrey_commutator(v: &Field, sigma: f64, nls: NlsParams) -> Result<Field> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(Field::zeros(*v.grid()));
    }
    spectral::check_exp_guard(sigma, v.grid().max_l1_frequency())?;
    let damped = apply_multiplier(v, MultiplierSpec::GevreyExp { sigma, sign: Sign::Minus })?;
    let inner = apply_multiplier(
        &solver::nonlinearity(&damped, nls),
        MultiplierSpec::GevreyExp { sigma, sign: Sign::Plus },
    )?;
    inner.sub(&solver::nonlinearity(v, nls))
}

/// Least-squares `(slope, intercept)` of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log ||f(v)||_{L^2}` against `log sigma`.
pub fn commutator_sigma_slope(v: &Field, nls: NlsParams, sigmas: &[f64]) -> Result<f64> {
    if sigmas.len() < 3 {
        return Err(Error::InvalidParameter("need at least three sigma values".into()));
    }
    if sigmas.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidParameter("sigma values must be positive".into()));
    }
    let lo = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sigmas.iter().copied().fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "sigma values must span two decades, got [{lo}, {hi}]"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &s in sigmas {
        let norm = gevrey_commutator(v, s, nls)?.l2_norm();
        if norm > 0.0 {
            xs.push(s.ln());
            ys.push(norm.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateInput("commutator vanishes for every sigma".into()));
    }
    Ok(linear_fit(&xs, &ys).0)
}

/// Settings for [`estimate_radius`].
#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    /// Coefficients below `noise_floor * max|c_k|` are ignored.
    pub noise_floor: f64,
    /// Smallest `|k|` used; `None` means `n/16`.
    pub k_min: Option<usize>,
    /// Cap reported for saturated fits; `None` means `L/4`.
    pub sigma_max: Option<f64>,
    pub min_points: usize,
    /// A side whose local decay rate grows by more than this factor across
    /// the band, with a linear-fit RMS above `curvature_rms` nats that a
    /// quadratic fit mostly removes, decays faster than any exponential and
    /// is flagged saturated.
    pub curvature_ratio: f64,
    pub curvature_rms: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            noise_floor: 1e-12,
            k_min: None,
            sigma_max: None,
            min_points: 4,
            curvature_ratio: 1.3,
            curvature_rms: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusFit {
    pub sigma_est: f64,
    /// `(k_min, k_max)` wavenumber magnitudes of the fitted band.
    pub band: (usize, usize),
    /// RMS residual of the linear fit, in nats.
    pub residual: f64,
    pub saturated: bool,
}

enum SideFit {
    Fitted { sigma: f64, band: (usize, usize), residual: f64 },
    Saturated,
}

/// Local decay rates at both band ends and the RMS residual of a quadratic fit.
fn quadratic_rates(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    // normal equations on centred abscissae
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut s2, mut s3, mut s4, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let u = a - mx;
        let w = b - my;
        s2 += u * u;
        s3 += u * u * u;
        s4 += u * u * u * u;
        t1 += u * w;
        t2 += u * u * w;
    }
    // y - my = b1 u + b2 (u^2 - s2/n)
    let m22 = s4 - s2 * s2 / n;
    let det = s2 * m22 - s3 * s3;
    if det.abs() < 1e-300 {
        return (0.0, 0.0, f64::INFINITY);
    }
    let b1 = (t1 * m22 - s3 * t2) / det;
    let b2 = (s2 * t2 - s3 * t1) / det;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let u = a - mx;
            (b - my - b1 * u - b2 * (u * u - s2 / n)).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min) - mx;
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max) - mx;
    (-(b1 + 2.0 * b2 * lo), -(b1 + 2.0 * b2 * hi), rms)
}

fn fit_side(points: &[(usize, f64, f64)], cfg: &FitConfig, cap: f64) -> SideFit {
    if points.len() < cfg.min_points {
        return SideFit::Saturated;
    }
    let x: Vec<f64> = points.iter().map(|p| p.1).collect();
    let y: Vec<f64> = points.iter().map(|p| p.2).collect();
    let (slope, intercept) = linear_fit(&x, &y);
    let residual = (x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - (intercept + slope * a)).powi(2))
        .sum::<f64>()
        / x.len() as f64)
        .sqrt();
    if points.len() >= 5 && residual > cfg.curvature_rms {
        // curvature must also explain most of the misfit, so noisy spectra pass
        let (r_lo, r_hi, quad_rms) = quadratic_rates(&x, &y);
        if r_hi > cfg.curvature_ratio * r_lo.max(0.0) && quad_rms < 0.5 * residual {
            return SideFit::Saturated;
        }
    }
    let sigma = (-slope).max(0.0);
    if sigma > cap {
        return SideFit::Saturated;
    }
    let k_lo = points.iter().map(|p| p.0).min().unwrap_or(0);
    let k_hi = points.iter().map(|p| p.0).max().unwrap_or(0);
    SideFit::Fitted { sigma, band: (k_lo, k_hi), residual }
}

/// Reads the strip half-width off the exponential decay of the spectrum.
///
/// Each half-axis (`+-k_1`, and `+-k_2` in two dimensions) is fitted
/// separately over `k_min <= |k| < n/2` and the smallest rate is returned.
pub fn estimate_radius(field: &Field, cfg: &FitConfig) -> Result<RadiusFit> {
    let grid = field.grid();
    let n = grid.n();
    let cap = cfg.sigma_max.unwrap_or(grid.box_len() / 4.0);
    let k_min = cfg.k_min.unwrap_or(n / 16).max(1);
    let max = field.spectrum().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::ZeroField);
    }
    let floor = cfg.noise_floor * max;
    let half = (n / 2) as i64;

    let mut sides = Vec::new();
    for axis in 0..grid.dim() {
        for dir in [1i64, -1] {
            let mut pts = Vec::new();
            for m in k_min as i64..=half {
                let k = dir * m;
                let mut wv = [0i64; 2];
                wv[axis] = k;
                let Some(idx) = grid.spectrum_index(wv) else { continue };
                let c = field.spectrum()[idx].norm();
                if c > floor {
                    pts.push((m as usize, grid.xi(m), c.ln()));
                }
            }
            sides.push(fit_side(&pts, cfg, cap));
        }
    }

    let best = sides
        .into_iter()
        .filter_map(|s| match s {
            SideFit::Fitted { sigma, band, residual } => Some((sigma, band, residual)),
            SideFit::Saturated => None,
        })
        .min_by(|a, b| a.0.total_cmp(&b.0));
    Ok(match best {
        Some((sigma_est, band, residual)) => RadiusFit { sigma_est, band, residual, saturated: false },
        None => RadiusFit {
            sigma_est: cap,
            band: (k_min, n / 2),
            residual: 0.0,
            saturated: true,
        },
    })
}

/// Constants of the local theory and the almost-conservation bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleParams {
    pub c0: f64,
    pub c_p: f64,
    pub eps: f64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self { c0: 1.0, c_p: 1.0, eps: 0.0 }
    }
}

impl ScheduleParams {
    pub fn new(c0: f64, c_p: f64, eps: f64) -> Result<Self> {
        let sp = Self { c0, c_p, eps };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0) || !(self.c_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c0 and C_p must be > 0, got c0 = {}, C_p = {}",
                self.c0, self.c_p
            )));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be >= 0, got {}", self.eps)));
        }
        Ok(())
    }
}

/// `delta = c0 (1 + ||u0||)^{-(2(p-1) - eps)}`.
pub fn lifespan(norm_u0: f64, nls: NlsParams, sp: &ScheduleParams) -> Result<f64> {
    sp.validate()?;
    if !(norm_u0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("norm must be >= 0, got {norm_u0}")));
    }
    let exponent = 2.0 * (nls.p() as f64 - 1.0) - sp.eps;
    Ok(sp.c0 * (1.0 + norm_u0).powf(-exponent))
}

fn schedule_factor(a0: f64, nls: NlsParams, sp: &ScheduleParams) -> f64 {
    let h = a0.powf((nls.p() as f64 - 1.0) / 2.0);
    2f64.powi(nls.p() as i32 + 1) * sp.c_p * h * (1.0 + h)
}

/// The constant `c` in `sigma(T) = c / T`.
pub fn schedule_constant(delta: f64, a0: f64, nls: NlsParams, sp: &ScheduleParams) -> Result<f64> {
    sp.validate()?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be > 0, got {delta}")));
    }
    if !(a0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("A0 must be >= 0, got {a0}")));
    }
    if a0 == 0.0 {
        return Err(Error::DegenerateInput(
            "A0 = 0: zero data is globally analytic and the schedule is undefined".into(),
        ));
    }
    Ok(delta / schedule_factor(a0, nls, sp))
}

/// `sigma(T) = delta / (2^{p+1} C_p A0^{(p-1)/2} (1 + A0^{(p-1)/2})) / T`.
pub fn sigma_schedule(t: f64, delta: f64, a0: f64, nls: NlsParams, sp: &ScheduleParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("T must be > 0, got {t}")));
    }
    Ok(schedule_constant(delta, a0, nls, sp)? / t)
}

/// Left side of the schedule constraint
/// `2^{p+1} (T/delta) C_p sigma A0^{(p-1)/2} (1 + A0^{(p-1)/2}) <= 1`.
pub fn schedule_constraint_lhs(t: f64, delta: f64, sigma: f64, a0: f64, nls: NlsParams, sp: &ScheduleParams) -> f64 {
    t / delta * sigma * schedule_factor(a0, nls, sp)
}

/// Interpolation exponent `alpha = d(p-1) / (2(p+1))`.
pub fn gn_alpha(d: usize, nls: NlsParams) -> f64 {
    let p = nls.p() as f64;
    d as f64 * (p - 1.0) / (2.0 * (p + 1.0))
}

/// Pieces of the interpolation bound on `A_{sigma0}(0)` for `v = e^{sigma0||D||} u0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnTerms {
    /// `A_{sigma0}(u0)` computed directly.
    pub a: f64,
    /// `||u0||^2_{G^{sigma0,1}}`.
    pub gevrey_sq: f64,
    /// `2/(p+1) ||v||^{p+1}_{L^{p+1}}`.
    pub potential: f64,
    /// `||grad v||^{alpha(p+1)} ||v||^{(1-alpha)(p+1)}`.
    pub interpolation: f64,
}

impl GnTerms {
    pub fn new(u0: &Field, sigma0: f64, nls: NlsParams) -> Result<Self> {
        let v = apply_multiplier(u0, MultiplierSpec::GevreyExp { sigma: sigma0, sign: Sign::Plus })?;
        let alpha = gn_alpha(u0.grid().dim(), nls);
        let q = nls.p() as f64 + 1.0;
        let grad = solver::gradient_norm_sq(&v).sqrt();
        let l2 = v.l2_norm();
        let gevrey_sq = spectral::gevrey_sobolev_norm_sq(u0, GevreyParams::new(sigma0, 1.0)?)?;
        let potential = 2.0 / q * solver::potential_integral(v.values(), v.grid(), nls);
        Ok(Self {
            a: gevrey_sq + potential,
            gevrey_sq,
            potential,
            interpolation: grad.powf(alpha * q) * l2.powf((1.0 - alpha) * q),
        })
    }

    /// Smallest constant for which the bound holds on this field.
    pub fn constant(&self) -> f64 {
        if self.potential == 0.0 {
            0.0
        } else {
            self.potential / self.interpolation
        }
    }

    /// `||u0||^2_{G^{sigma0,1}} + c ||grad v||^{alpha(p+1)} ||v||^{(1-alpha)(p+1)}`.
    pub fn bound(&self, c: f64) -> f64 {
        self.gevrey_sq + c * self.interpolation
    }
}
