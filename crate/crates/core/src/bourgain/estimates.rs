//! Monte-Carlo probes of the Strichartz, multilinear, commutator and trace
//! inequalities: each sample yields `LHS / RHS`, and the largest ratio is
//! tracked across a spatial resolution ladder.
//!
//! Products are formed on a grid padded to hold the full product band, so
//! every left-hand side is evaluated without aliasing or truncation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use super::sampler::SamplerConfig;
use super::{drop_roundoff, interpolate, mixed_lebesgue_norm, sup_gevrey_norm, xsb_norm, BourgainParams, SpaceTimeField};
use crate::diagnostics::critical_indices;
use crate::error::{Error, Result};
use crate::fft;
use crate::solver::NlsParams;
use crate::spectral::{self, GevreyParams, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimateId {
    /// `||f||_{L^8_t L^4_x} <= C ||f||_{X^{0,b}}`, d = 1.
    Strichartz84,
    /// `||f||_{L^4_{t,x}} <= C ||f||_{X^{0,b}}`, d = 2.
    Strichartz44,
    /// `||prod U_j||_{L^2} <= C prod_{j<p} ||u_j||_{X^{s0,b}} ||u_p||_{X^{0,b}}`.
    MultilinearL2,
    /// `||prod U_j||_{X^{0,-b}} <= C prod_{j<p-1} ||u_j||_{X^{s1,b}} ||u_{p-1}||_{X^{0,b}} ||u_p||_{X^{0,b}}`.
    MultilinearDual,
    /// `||prod U_j||_{X^{sigma,1,0}} <= C prod ||u_j||_{X^{sigma,1,b}}`.
    MultilinearGevrey,
    /// `||conj f(v)||_{L^2} <= C sigma ||v||^{p-1}_{X^{s0,b}} ||v||_{X^{1,b}}`.
    CommutatorL2,
    /// `||conj grad f(v)||_{X^{0,-b}} <= C sigma ||v||^{p-2}_{X^{s1,b}} ||v||^2_{X^{1,b}}`.
    CommutatorGradient,
    /// `sup_t ||f(t)||_{G^{sigma,1}} <= C ||f||_{X^{sigma,1,b}}`.
    TraceEmbedding,
}

impl EstimateId {
    pub const ALL: [EstimateId; 8] = [
        EstimateId::Strichartz84,
        EstimateId::Strichartz44,
        EstimateId::MultilinearL2,
        EstimateId::MultilinearDual,
        EstimateId::MultilinearGevrey,
        EstimateId::CommutatorL2,
        EstimateId::CommutatorGradient,
        EstimateId::TraceEmbedding,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimateId::Strichartz84 => "strichartz_8_4",
            EstimateId::Strichartz44 => "strichartz_4_4",
            EstimateId::MultilinearL2 => "multilinear_l2",
            EstimateId::MultilinearDual => "multilinear_dual",
            EstimateId::MultilinearGevrey => "multilinear_gevrey",
            EstimateId::CommutatorL2 => "commutator_l2",
            EstimateId::CommutatorGradient => "commutator_gradient",
            EstimateId::TraceEmbedding => "trace_embedding",
        }
    }

    /// Number of input fields per sample.
    pub fn arity(self, p: u32) -> usize {
        match self {
            EstimateId::MultilinearL2 | EstimateId::MultilinearDual | EstimateId::MultilinearGevrey => p as usize,
            _ => 1,
        }
    }

    /// Spatial dimension the estimate is probed in.
    pub fn dim(self) -> usize {
        match self {
            EstimateId::Strichartz44 => 2,
            _ => 1,
        }
    }

    fn uses_conjugation(self) -> bool {
        matches!(
            self,
            EstimateId::MultilinearL2 | EstimateId::MultilinearDual | EstimateId::MultilinearGevrey
        )
    }
}

impl fmt::Display for EstimateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimateId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimate id `{s}`")))
    }
}

/// `j` odd (0-based) conjugated: `u_1 conj(u_2) u_3 ...`.
pub fn default_conj_pattern(p: u32) -> Vec<bool> {
    (0..p as usize).map(|j| j % 2 == 1).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateParams {
    pub nls: NlsParams,
    pub b: f64,
    /// Strip width for the Gevrey-weighted estimates.
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
    pub conj_pattern: Vec<bool>,
    pub sampler: SamplerConfig,
}

impl EstimateParams {
    pub fn new(nls: NlsParams) -> Self {
        Self {
            nls,
            b: 0.6,
            sigma: 0.1,
            samples: 100,
            seed: 0,
            conj_pattern: default_conj_pattern(nls.p()),
            sampler: SamplerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.5 < self.b && self.b < 1.0) {
            return Err(Error::InvalidParameter(format!("need 1/2 < b < 1, got {}", self.b)));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("need at least one sample".into()));
        }
        if self.conj_pattern.len() != self.nls.p() as usize {
            return Err(Error::ArityMismatch {
                id: "conj_pattern".into(),
                expected: self.nls.p() as usize,
                got: self.conj_pattern.len(),
            });
        }
        Ok(())
    }
}

/// Ratio statistics at one spatial resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionStats {
    pub n: usize,
    pub samples: usize,
    pub excluded_zero_rhs: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate_id: EstimateId,
    pub sample_count: usize,
    pub excluded_zero_rhs: usize,
    /// Ratios of every non-excluded sample, all resolutions, in sample order.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub per_resolution: Vec<ResolutionStats>,
    pub params: EstimateParams,
}

impl EstimateReport {
    /// `max_ratio` at the finest resolution over the coarsest.
    pub fn growth(&self) -> f64 {
        match (self.per_resolution.first(), self.per_resolution.last()) {
            (Some(a), Some(b)) => b.max_ratio / a.max_ratio,
            _ => f64::NAN,
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn padded_shape(f: &SpaceTimeField, degree: usize) -> Vec<usize> {
    f.shape().iter().map(|&s| (degree * s).next_power_of_two()).collect()
}

/// `prod U_j` with `U_j = conj(u_j)` where `conj[j]`, on the padded grid.
pub fn multilinear_product(inputs: &[SpaceTimeField], conj: &[bool]) -> Result<SpaceTimeField> {
    let first = inputs.first().ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
    if inputs.iter().any(|f| f.grid() != first.grid() || f.m() != first.m() || f.t_len() != first.t_len()) {
        return Err(Error::GridMismatch);
    }
    let shape = padded_shape(first, inputs.len());
    let mut acc = vec![Complex64::new(1.0, 0.0); shape.iter().product()];
    for (f, &c) in inputs.iter().zip(conj) {
        let v = interpolate(f, &shape);
        for (a, x) in acc.iter_mut().zip(&v) {
            *a *= if c { x.conj() } else { *x };
        }
    }
    let mut raw = fft::analyze(&acc, &shape);
    drop_roundoff(&mut raw);
    let grid = GridSpec::new(first.grid().dim(), shape[1], first.grid().box_len())?;
    Ok(SpaceTimeField::from_raw(grid, shape[0], first.t_len(), raw))
}

/// `f(v) = -( N(v) - e^{sigma||D||} N(e^{-sigma||D||} v) )` on the padded grid.
pub fn gevrey_commutator_st(v: &SpaceTimeField, sigma: f64, nls: NlsParams) -> Result<SpaceTimeField> {
    let p = nls.p() as usize;
    let shape = padded_shape(v, p);
    let half = (nls.p() as i32 - 1) / 2;
    let power = |u: &mut [Complex64]| {
        for x in u.iter_mut() {
            *x *= x.norm_sqr().powi(half);
        }
    };

    let mut plain = interpolate(v, &shape);
    power(&mut plain);

    let coarse = v.grid();
    let damp: Vec<f64> = coarse
        .frequencies()
        .iter()
        .map(|xi| (-sigma * spectral::l1(*xi)).exp())
        .collect();
    let nx = coarse.len();
    let damped_raw: Vec<Complex64> = v
        .raw_coefficients()
        .iter()
        .enumerate()
        .map(|(i, a)| a * damp[i % nx])
        .collect();
    let mut damped = fft::resample(&damped_raw, &v.shape(), &shape);
    fft::transform(&mut damped, &shape, rustfft::FftDirection::Inverse);
    power(&mut damped);

    let fine_grid = GridSpec::new(coarse.dim(), shape[1], coarse.box_len())?;
    spectral::check_exp_guard(sigma, fine_grid.max_l1_frequency())?;
    let mut raw = fft::analyze(&damped, &shape);
    let grow: Vec<f64> = fine_grid
        .frequencies()
        .iter()
        .map(|xi| (sigma * spectral::l1(*xi)).exp())
        .collect();
    let fx = fine_grid.len();
    let mut plain_raw = fft::analyze(&plain, &shape);
    drop_roundoff(&mut raw);
    drop_roundoff(&mut plain_raw);
    for (i, (a, b)) in raw.iter_mut().zip(&plain_raw).enumerate() {
        *a = *a * grow[i % fx] - b;
    }
    Ok(SpaceTimeField::from_raw(fine_grid, shape[0], v.t_len(), raw))
}

/// Spatial derivative `d/dx_axis`.
fn gradient(f: &SpaceTimeField, axis: usize) -> SpaceTimeField {
    let freqs = f.grid().frequencies();
    let nx = f.grid().len();
    let raw: Vec<Complex64> = f
        .raw_coefficients()
        .iter()
        .enumerate()
        .map(|(i, a)| a * Complex64::new(0.0, freqs[i % nx][axis]))
        .collect();
    SpaceTimeField::from_raw(*f.grid(), f.m(), f.t_len(), raw)
}

fn bp(sigma: f64, s: f64, b: f64) -> BourgainParams {
    BourgainParams { sigma, s, b }
}

/// `(LHS, RHS)` of one estimate on one sample.
pub fn evaluate(id: EstimateId, inputs: &[SpaceTimeField], conj: &[bool], params: &EstimateParams) -> Result<(f64, f64)> {
    let p = params.nls.p();
    let arity = id.arity(p);
    if inputs.len() != arity {
        return Err(Error::ArityMismatch { id: id.as_str().into(), expected: arity, got: inputs.len() });
    }
    if id.uses_conjugation() && conj.len() != arity {
        return Err(Error::ArityMismatch { id: "conj_pattern".into(), expected: arity, got: conj.len() });
    }
    let d = inputs[0].grid().dim();
    let (s0, s1) = critical_indices(p, d)?;
    let b = params.b;
    let sigma = params.sigma;
    let x = |f: &SpaceTimeField, s: f64| xsb_norm(f, bp(0.0, s, b));

    match id {
        EstimateId::Strichartz84 | EstimateId::Strichartz44 => {
            let (q, r) = if id == EstimateId::Strichartz84 { (8.0, 4.0) } else { (4.0, 4.0) };
            let fine = inputs[0].upsample(2)?;
            Ok((mixed_lebesgue_norm(&fine, q, r), x(&inputs[0], 0.0)?))
        }
        EstimateId::MultilinearL2 => {
            let lhs = multilinear_product(inputs, conj)?.l2_norm();
            let mut rhs = x(&inputs[arity - 1], 0.0)?;
            for f in &inputs[..arity - 1] {
                rhs *= x(f, s0)?;
            }
            Ok((lhs, rhs))
        }
        EstimateId::MultilinearDual => {
            let lhs = xsb_norm(&multilinear_product(inputs, conj)?, bp(0.0, 0.0, -b))?;
            let mut rhs = x(&inputs[arity - 1], 0.0)? * x(&inputs[arity - 2], 0.0)?;
            for f in &inputs[..arity - 2] {
                rhs *= x(f, s1)?;
            }
            Ok((lhs, rhs))
        }
        EstimateId::MultilinearGevrey => {
            let lhs = xsb_norm(&multilinear_product(inputs, conj)?, bp(sigma, 1.0, 0.0))?;
            let mut rhs = 1.0;
            for f in inputs {
                rhs *= xsb_norm(f, bp(sigma, 1.0, b))?;
            }
            Ok((lhs, rhs))
        }
        EstimateId::CommutatorL2 => {
            let v = &inputs[0];
            let lhs = gevrey_commutator_st(v, sigma, params.nls)?.conj().l2_norm();
            let rhs = sigma * x(v, s0)?.powi(p as i32 - 1) * x(v, 1.0)?;
            Ok((lhs, rhs))
        }
        EstimateId::CommutatorGradient => {
            let v = &inputs[0];
            let f = gevrey_commutator_st(v, sigma, params.nls)?;
            let mut sq = 0.0;
            for axis in 0..d {
                let g = gradient(&f, axis).conj();
                sq += xsb_norm(&g, bp(0.0, 0.0, -b))?.powi(2);
            }
            let rhs = sigma * x(v, s1)?.powi(p as i32 - 2) * x(v, 1.0)?.powi(2);
            Ok((sq.sqrt(), rhs))
        }
        EstimateId::TraceEmbedding => {
            let f = &inputs[0];
            let lhs = sup_gevrey_norm(f, GevreyParams { sigma, s: 1.0 })?;
            Ok((lhs, xsb_norm(f, bp(sigma, 1.0, b))?))
        }
    }
}

/// Evaluates every sample of `batch` (one resolution) and collects the ratios.
///
/// Samples whose right-hand side vanishes are excluded and counted.
pub fn check_estimate(
    id: EstimateId,
    batch: &[Vec<SpaceTimeField>],
    conj: &[bool],
    params: &EstimateParams,
) -> Result<EstimateReport> {
    let results: Vec<Result<(f64, f64)>> = batch.par_iter().map(|inputs| evaluate(id, inputs, conj, params)).collect();
    let pairs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let n = batch.first().map(|s| s.first().map_or(0, |f| f.grid().n())).unwrap_or(0);
    assemble(id, n, pairs, params)
}

fn assemble(id: EstimateId, n: usize, pairs: Vec<(f64, f64)>, params: &EstimateParams) -> Result<EstimateReport> {
    let total = pairs.len();
    let ratios: Vec<f64> = pairs.iter().filter(|(_, r)| *r > 0.0).map(|(l, r)| l / r).collect();
    let excluded = total - ratios.len();
    if ratios.is_empty() {
        return Err(Error::AllRhsZero);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let median_ratio = median(&ratios);
    Ok(EstimateReport {
        estimate_id: id,
        sample_count: total,
        excluded_zero_rhs: excluded,
        max_ratio,
        median_ratio,
        per_resolution: vec![ResolutionStats { n, samples: total, excluded_zero_rhs: excluded, max_ratio, median_ratio }],
        ratios,
        params: params.clone(),
    })
}

/// Draws `params.samples` seeded samples at every `n` of `ladder` and merges
/// the per-resolution reports; sample `i` uses seed `params.seed + i`.
pub fn probe_estimate(id: EstimateId, params: &EstimateParams, ladder: &[usize]) -> Result<EstimateReport> {
    params.validate()?;
    let arity = id.arity(params.nls.p());
    let conj = &params.conj_pattern;
    let mut merged: Option<EstimateReport> = None;
    for &n in ladder {
        let pairs: Vec<Result<(f64, f64)>> = (0..params.samples)
            .into_par_iter()
            .map(|i| {
                let seed = params.seed.wrapping_add(i as u64);
                let inputs = (0..arity)
                    .map(|f| params.sampler.sample(id.dim(), n, seed, f as u64))
                    .collect::<Result<Vec<_>>>()?;
                evaluate(id, &inputs, conj, params)
            })
            .collect();
        let report = assemble(id, n, pairs.into_iter().collect::<Result<Vec<_>>>()?, params)?;
        merged = Some(match merged {
            None => report,
            Some(mut acc) => {
                acc.sample_count += report.sample_count;
                acc.excluded_zero_rhs += report.excluded_zero_rhs;
                acc.ratios.extend(report.ratios);
                acc.per_resolution.extend(report.per_resolution);
                acc.max_ratio = acc.max_ratio.max(report.max_ratio);
                acc.median_ratio = median(&acc.ratios);
                acc
            }
        });
    }
    merged.ok_or_else(|| Error::InvalidParameter("empty resolution ladder".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn nls(p: u32) -> NlsParams {
        NlsParams::new(p).unwrap()
    }

    fn mode(n: usize, m: usize, t_len: f64, k: i64, j: i64) -> SpaceTimeField {
        let g = make_grid(1, n, 2.0 * PI).unwrap();
        let xi = g.xi(k);
        let tau = 2.0 * PI * j as f64 / t_len;
        SpaceTimeField::from_fn(g, m, t_len, |t, x| Complex64::from_polar(1.0, xi * x[0] + tau * t)).unwrap()
    }

    fn brackets(x: f64) -> f64 {
        (1.0 + x * x).sqrt()
    }

    #[test]
    fn ids_roundtrip() {
        for id in EstimateId::ALL {
            assert_eq!(id.as_str().parse::<EstimateId>().unwrap(), id);
        }
        assert!("strichartz_2_2".parse::<EstimateId>().is_err());
        assert_eq!(EstimateId::MultilinearL2.arity(5), 5);
        assert_eq!(EstimateId::CommutatorL2.arity(5), 1);
    }

    #[test]
    fn product_of_single_modes_is_exact() {
        let t_len = 1.0;
        let f = mode(16, 8, t_len, 3, 2);
        let conj = [false, true, false];
        let prod = multilinear_product(&[f.clone(), f.clone(), f.clone()], &conj).unwrap();
        // e^{i(kx + tau t)} e^{-i(kx + tau t)} e^{i(kx + tau t)}
        assert!((prod.coefficient(2, [3, 0]) - Complex64::from(1.0)).norm() < 1e-12);
        let prod = multilinear_product(&[f.clone(), f.clone(), f.clone()], &[false; 3]).unwrap();
        assert!((prod.coefficient(6, [9, 0]) - Complex64::from(1.0)).norm() < 1e-12);
    }

    #[test]
    fn multilinear_l2_single_mode_oracle() {
        let (t_len, k, j) = (1.0, 2i64, 3i64);
        let f = mode(16, 8, t_len, k, j);
        let params = EstimateParams::new(nls(5));
        let inputs = vec![f; 5];
        let (lhs, rhs) = evaluate(EstimateId::MultilinearL2, &inputs, &[false; 5], &params).unwrap();
        let vol = t_len * 2.0 * PI;
        let tau = 2.0 * PI * j as f64 / t_len;
        let (s0, _) = critical_indices(5, 1).unwrap();
        let x = |s: f64| vol.sqrt() * brackets(k as f64).powf(s) * brackets(tau + (k * k) as f64).powf(0.6);
        assert!((lhs - vol.sqrt()).abs() < 1e-10 * lhs);
        let want = x(s0).powi(4) * x(0.0);
        assert!((rhs - want).abs() < 1e-10 * want);
    }

    #[test]
    fn commutator_single_mode_oracle() {
        let (t_len, k, j) = (1.0, 1i64, -1i64);
        let f = mode(16, 8, t_len, k, j);
        let mut params = EstimateParams::new(nls(5));
        let (s0, _) = critical_indices(5, 1).unwrap();
        let vol: f64 = t_len * 2.0 * PI;
        let tau = 2.0 * PI * j as f64 / t_len;
        let w = |s: f64| vol.sqrt() * brackets(k as f64).powf(s) * brackets(tau + 1.0).powf(0.6);
        let mut prev = None;
        for sigma in [1e-3, 1e-2, 1e-1] {
            params.sigma = sigma;
            let (lhs, rhs) = evaluate(EstimateId::CommutatorL2, std::slice::from_ref(&f), &[], &params).unwrap();
            let defect = 1.0 - (-4.0 * sigma * k as f64).exp();
            assert!((lhs - defect * vol.sqrt()).abs() < 1e-10 * lhs);
            let ratio = lhs / rhs;
            let want = defect * vol.sqrt() / (sigma * w(s0).powi(4) * w(1.0));
            assert!((ratio - want).abs() < 1e-10 * want);
            // bounded uniformly in sigma by the sigma -> 0 limit
            let limit = 4.0 * vol.sqrt() / (w(s0).powi(4) * w(1.0));
            assert!(ratio <= limit * (1.0 + 1e-12));
            if let Some(p) = prev {
                assert!(ratio < p);
            }
            prev = Some(ratio);
        }
    }

    #[test]
    fn zero_inputs_are_excluded() {
        let g = make_grid(1, 16, 2.0 * PI).unwrap();
        let z = SpaceTimeField::zeros(g, 8, 1.0).unwrap();
        let params = EstimateParams::new(nls(3));
        let batch = vec![vec![z.clone(), z.clone(), z.clone()]; 3];
        assert!(matches!(
            check_estimate(EstimateId::MultilinearL2, &batch, &params.conj_pattern, &params),
            Err(Error::AllRhsZero)
        ));
        let mut batch = batch;
        let f = mode(16, 8, 1.0, 1, 1);
        batch.push(vec![f.clone(), f.clone(), f]);
        let report = check_estimate(EstimateId::MultilinearL2, &batch, &params.conj_pattern, &params).unwrap();
        assert_eq!(report.excluded_zero_rhs, 3);
        assert_eq!(report.ratios.len(), 1);
        assert!(matches!(
            check_estimate(EstimateId::MultilinearL2, &[vec![z]], &params.conj_pattern, &params),
            Err(Error::ArityMismatch { .. })
        ));
    }

    /// Free wave packet at frequency scale `scale`, focused mid-slab.
    fn packet(scale: f64) -> SpaceTimeField {
        let g = make_grid(1, 256, 2.0 * PI).unwrap();
        let (m, t_len) = (256, 0.05);
        let tc = t_len / 2.0;
        let freqs: Vec<i64> = (-127..128).collect();
        let amps: Vec<f64> = freqs.iter().map(|&k| (-(k as f64 / scale).powi(2)).exp()).collect();
        let f = SpaceTimeField::from_fn(g, m, t_len, |t, x| {
            let bump = super::super::sampler::time_bump(t, t_len);
            let mut s = Complex64::default();
            for (&k, &a) in freqs.iter().zip(&amps) {
                let kf = k as f64;
                s += Complex64::from_polar(a, kf * x[0] - kf * kf * (t - tc));
            }
            s * bump
        })
        .unwrap();
        f.scale(Complex64::from(1.0 / f.l2_norm()))
    }

    #[test]
    fn strichartz_negative_control_grows_with_frequency() {
        assert!(super::super::admissible_pair(8.0, 4.0, 1));
        assert!(!super::super::admissible_pair(f64::INFINITY, f64::INFINITY, 1));
        let ratio = |f: &SpaceTimeField, q: f64, r: f64| {
            mixed_lebesgue_norm(f, q, r) / xsb_norm(f, bp(0.0, 0.0, 0.6)).unwrap()
        };
        let coarse = packet(4.0);
        let fine = packet(16.0);
        let bad = ratio(&fine, f64::INFINITY, f64::INFINITY) / ratio(&coarse, f64::INFINITY, f64::INFINITY);
        let good = ratio(&fine, 8.0, 4.0) / ratio(&coarse, 8.0, 4.0);
        assert!(bad > 1.7, "inadmissible growth {bad}");
        assert!(good < 1.3 && good > 0.7, "admissible growth {good}");
    }

    #[test]
    fn probe_is_deterministic_and_bounded() {
        let mut params = EstimateParams::new(nls(5));
        params.samples = 4;
        params.seed = 11;
        let a = probe_estimate(EstimateId::TraceEmbedding, &params, &[16, 32]).unwrap();
        let b = probe_estimate(EstimateId::TraceEmbedding, &params, &[16, 32]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_resolution.len(), 2);
        assert!(a.max_ratio.is_finite() && a.max_ratio > 0.0);
        assert!(a.growth() < 2.0);
    }

    #[test]
    fn gevrey_weights_do_not_amplify_roundoff_under_refinement() {
        let params = EstimateParams { samples: 1, ..EstimateParams::new(nls(5)) };
        for id in [EstimateId::MultilinearGevrey, EstimateId::CommutatorL2] {
            let ratio = |n: usize| {
                let inputs: Vec<SpaceTimeField> = (0..id.arity(5))
                    .map(|f| params.sampler.sample(1, n, 3, f as u64).unwrap())
                    .collect();
                let (l, r) = evaluate(id, &inputs, &params.conj_pattern, &params).unwrap();
                l / r
            };
            let (a, b) = (ratio(64), ratio(128));
            assert!((a / b - 1.0).abs() < 1e-6, "{id}: {a} vs {b}");
        }
    }
}
