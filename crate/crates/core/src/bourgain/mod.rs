//! Space-time fields on a periodized time slab and the norms measured on them.
//!
//! A [`SpaceTimeField`] holds `m` time slices `t_j = j t_len / m` of a field
//! on a spatial grid. Its spectrum uses the series convention in both
//! variables, so `e^{i(k.x + tau t)}` has a single unit coefficient at
//! `(tau, xi_k)` with `tau_j = 2 pi j / t_len`.

pub mod estimates;
pub mod sampler;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft;
use crate::spectral::{self, Field, GevreyParams, GridSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: GridSpec,
    m: usize,
    t_len: f64,
    values: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

fn check_slab(m: usize, t_len: f64) -> Result<()> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("time samples must be a power of two >= 2, got {m}")));
    }
    if !(t_len > 0.0 && t_len.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_len must be > 0, got {t_len}")));
    }
    Ok(())
}

fn shape_of(grid: &GridSpec, m: usize) -> Vec<usize> {
    let mut shape = vec![m];
    shape.extend(grid.shape());
    shape
}

impl SpaceTimeField {
    /// Builds a field from samples, time-major: entry `j * N + i` is slice `j`
    /// at flat spatial index `i`.
    pub fn from_values(grid: GridSpec, m: usize, t_len: f64, values: Vec<Complex64>) -> Result<Self> {
        check_slab(m, t_len)?;
        if values.len() != m * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                m * grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        let raw = fft::analyze(&values, &shape_of(&grid, m));
        Ok(Self::from_parts_raw(grid, m, t_len, values, raw))
    }

    /// Builds a field from series coefficients indexed like the samples,
    /// in FFT order along every axis.
    pub fn from_spectrum(grid: GridSpec, m: usize, t_len: f64, spectrum: Vec<Complex64>) -> Result<Self> {
        check_slab(m, t_len)?;
        if spectrum.len() != m * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                m * grid.len(),
                spectrum.len()
            )));
        }
        if spectrum.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let signs = grid.origin_signs();
        let raw: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(i, c)| c * signs[i % grid.len()])
            .collect();
        Ok(Self::from_raw(grid, m, t_len, raw))
    }

    pub fn from_fn(grid: GridSpec, m: usize, t_len: f64, f: impl Fn(f64, &[f64]) -> Complex64) -> Result<Self> {
        check_slab(m, t_len)?;
        let points = grid.points();
        let dt = t_len / m as f64;
        let mut values = Vec::with_capacity(m * points.len());
        for j in 0..m {
            let t = j as f64 * dt;
            values.extend(points.iter().map(|x| f(t, &x[..grid.dim()])));
        }
        Self::from_values(grid, m, t_len, values)
    }

    pub fn zeros(grid: GridSpec, m: usize, t_len: f64) -> Result<Self> {
        check_slab(m, t_len)?;
        let len = m * grid.len();
        Ok(Self {
            grid,
            m,
            t_len,
            values: vec![Complex64::default(); len],
            spectrum: vec![Complex64::default(); len],
        })
    }

    pub(crate) fn from_parts_raw(grid: GridSpec, m: usize, t_len: f64, values: Vec<Complex64>, raw: Vec<Complex64>) -> Self {
        let signs = grid.origin_signs();
        let n = grid.len();
        let spectrum = raw.iter().enumerate().map(|(i, a)| a * signs[i % n]).collect();
        Self { grid, m, t_len, values, spectrum }
    }

    /// From plain normalized DFT coefficients.
    pub(crate) fn from_raw(grid: GridSpec, m: usize, t_len: f64, raw: Vec<Complex64>) -> Self {
        let values = fft::synthesize(&raw, &shape_of(&grid, m));
        Self::from_parts_raw(grid, m, t_len, values, raw)
    }

    pub(crate) fn raw_coefficients(&self) -> Vec<Complex64> {
        let signs = self.grid.origin_signs();
        let n = self.grid.len();
        self.spectrum.iter().enumerate().map(|(i, c)| c * signs[i % n]).collect()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t_len(&self) -> f64 {
        self.t_len
    }

    pub fn dt(&self) -> f64 {
        self.t_len / self.m as f64
    }

    pub fn shape(&self) -> Vec<usize> {
        shape_of(&self.grid, self.m)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Time frequency of FFT index `j`.
    pub fn tau(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * fft::wavenumber(j, self.m) as f64 / self.t_len
    }

    /// Coefficient at time wavenumber `j` and spatial wavevector `k`; zero
    /// outside the band.
    pub fn coefficient(&self, j: i64, k: [i64; 2]) -> Complex64 {
        let half = (self.m / 2) as i64;
        match self.grid.spectrum_index(k) {
            Some(i) if (-half..half).contains(&j) => self.spectrum[fft::index_of(j, self.m) * self.grid.len() + i],
            _ => Complex64::default(),
        }
    }

    /// Spatial field at time sample `j`.
    pub fn slice(&self, j: usize) -> Field {
        let n = self.grid.len();
        Field::from_values(self.grid, self.values[j * n..(j + 1) * n].to_vec())
            .expect("slices of a valid field are valid")
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            spectrum: self.spectrum.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        let values: Vec<Complex64> = self.values.iter().map(|v| v.conj()).collect();
        Self::from_values(self.grid, self.m, self.t_len, values).expect("conjugation keeps samples finite")
    }

    /// Space-time `L^2` norm from the spectrum.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.spectrum.iter().map(|c| c.norm_sqr()).sum();
        (self.t_len * self.grid.volume() * sum).sqrt()
    }

    /// Trigonometric interpolation onto a grid `factor` times finer in every axis.
    pub fn upsample(&self, factor: usize) -> Result<Self> {
        let grid = GridSpec::new(self.grid.dim(), self.grid.n() * factor, self.grid.box_len())?;
        let m = self.m * factor;
        let raw = fft::resample(&self.raw_coefficients(), &self.shape(), &shape_of(&grid, m));
        Ok(Self::from_raw(grid, m, self.t_len, raw))
    }
}

/// Weights of the Gevrey-Bourgain norm `X^{sigma,s,b}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BourgainParams {
    pub sigma: f64,
    pub s: f64,
    pub b: f64,
}

impl BourgainParams {
    pub fn new(sigma: f64, s: f64, b: f64) -> Result<Self> {
        let bp = Self { sigma, s, b };
        bp.validate()?;
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.b.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("need |b| < 1, got {}", self.b)));
        }
        Ok(())
    }
}

/// `||e^{sigma||D||} <xi>^s <tau + |xi|^2>^b f^||`, scaled by `(t_len L^d)^{1/2}`.
pub fn xsb_norm(f: &SpaceTimeField, bp: BourgainParams) -> Result<f64> {
    bp.validate()?;
    spectral::check_exp_guard(bp.sigma, f.grid.max_l1_frequency())?;
    let freqs = f.grid.frequencies();
    let spatial: Vec<(f64, f64)> = freqs
        .iter()
        .map(|xi| {
            let mut w = 1.0;
            if bp.sigma != 0.0 {
                w *= (2.0 * bp.sigma * spectral::l1(*xi)).exp();
            }
            if bp.s != 0.0 {
                w *= (1.0 + spectral::norm_sq(*xi)).powf(bp.s);
            }
            (w, spectral::norm_sq(*xi))
        })
        .collect();
    let n = f.grid.len();
    let mut sum = 0.0;
    for j in 0..f.m {
        let tau = f.tau(j);
        let row = &f.spectrum[j * n..(j + 1) * n];
        for (c, (w, xi2)) in row.iter().zip(&spatial) {
            let mut weight = *w;
            if bp.b != 0.0 {
                let d = tau + xi2;
                weight *= (1.0 + d * d).powf(bp.b);
            }
            sum += weight * c.norm_sqr();
        }
    }
    Ok((f.t_len * f.grid.volume() * sum).sqrt())
}

/// Multiplies by the indicator of `[a, c)` in time.
pub fn window(f: &SpaceTimeField, a: f64, c: f64) -> Result<SpaceTimeField> {
    if !(0.0 <= a && a < c && c <= f.t_len) {
        return Err(Error::EmptyInterval(a, c));
    }
    let n = f.grid.len();
    let dt = f.dt();
    let mut values = f.values.clone();
    for j in 0..f.m {
        let t = j as f64 * dt;
        if !(a <= t && t < c) {
            values[j * n..(j + 1) * n].fill(Complex64::default());
        }
    }
    SpaceTimeField::from_values(f.grid, f.m, f.t_len, values)
}

/// `2 <= q, r <= inf`, `2/q + d/r = d/2`, `(q, r, d) != (2, inf, 2)`.
pub fn admissible_pair(q: f64, r: f64, d: usize) -> bool {
    if !(q >= 2.0 && r >= 2.0) {
        return false;
    }
    if d == 2 && q == 2.0 && r.is_infinite() {
        return false;
    }
    (2.0 / q + d as f64 / r - d as f64 / 2.0).abs() <= 1e-12
}

fn lebesgue_combine(sum_or_max: f64, cell: f64, q: f64) -> f64 {
    if q.is_infinite() {
        sum_or_max
    } else {
        (cell * sum_or_max).powf(1.0 / q)
    }
}

/// Riemann-sum `L^r` in space per slice, then `L^q` in time.
///
/// Panics if `q < 1` or `r < 1`.
pub fn mixed_lebesgue_norm(f: &SpaceTimeField, q: f64, r: f64) -> f64 {
    assert!(q >= 1.0 && r >= 1.0, "exponents must be >= 1, got q = {q}, r = {r}");
    let n = f.grid.len();
    let cell = f.grid.dx().powi(f.grid.dim() as i32);
    let slices = (0..f.m).map(|j| {
        let row = &f.values[j * n..(j + 1) * n];
        if r.is_infinite() {
            row.iter().map(|v| v.norm()).fold(0.0, f64::max)
        } else {
            lebesgue_combine(spectral::lebesgue_sum(row, r), cell, r)
        }
    });
    if q.is_infinite() {
        slices.fold(0.0, f64::max)
    } else {
        let sum: f64 = slices.map(|s| s.powf(q)).sum();
        lebesgue_combine(sum, f.dt(), q)
    }
}

/// `sup_j ||f(t_j)||_{G^{sigma,s}}`.
pub fn sup_gevrey_norm(f: &SpaceTimeField, gp: GevreyParams) -> Result<f64> {
    let mut best = 0.0f64;
    for j in 0..f.m {
        best = best.max(spectral::gevrey_sobolev_norm(&f.slice(j), gp)?);
    }
    Ok(best)
}

/// Raw coefficients of `f` copied onto `shape` (zero-padded or truncated).
pub(crate) fn resample_raw(f: &SpaceTimeField, shape: &[usize]) -> Vec<Complex64> {
    fft::resample(&f.raw_coefficients(), &f.shape(), shape)
}

/// Coefficients below this fraction of the largest one are treated as
/// transform roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;

/// Zeroes coefficients under `ROUNDOFF_FLOOR` times the largest magnitude, so
/// that growing weights do not amplify transform noise.
pub(crate) fn drop_roundoff(raw: &mut [Complex64]) {
    let max = raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = ROUNDOFF_FLOOR * max;
    for c in raw.iter_mut() {
        if c.norm() < floor {
            *c = Complex64::default();
        }
    }
}

/// Samples of `f` on `shape` by trigonometric interpolation.
pub(crate) fn interpolate(f: &SpaceTimeField, shape: &[usize]) -> Vec<Complex64> {
    let mut v = resample_raw(f, shape);
    fft::transform(&mut v, shape, FftDirection::Inverse);
    v
}
