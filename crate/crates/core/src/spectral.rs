//! Periodic grids, fields with cached Fourier-series spectra, diagonal
//! Fourier multipliers, and the Gevrey-Sobolev and Lebesgue norms.
//!
//! The grid samples `[-L/2, L/2)^d` with `n` points per axis. The spectrum
//! of a field is stored in the Fourier-series normalization
//! `c_k = L^{-d} \int f(x) e^{-i xi_k . x} dx`, so that
//! `||f||_{L^2}^2 = L^d sum_k |c_k|^2` and a plane wave `e^{i xi_k x}` has a
//! single unit coefficient. Frequencies are `xi_k = 2 pi k / L` with
//! `k in [-n/2, n/2)` per axis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

/// `ln(1e120)`: largest admitted exponent for `e^{sigma ||xi||}`.
pub const EXP_GUARD: f64 = 276.310_211_159_285_5;

/// Fraction of mass allowed within `L/4` of the box boundary before a
/// leak warning is raised.
pub const BOUNDARY_LEAK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    box_len: f64,
}

/// Validated constructor; see [`GridSpec::new`].
pub fn make_grid(dim: usize, n: usize, box_len: f64) -> Result<GridSpec> {
    GridSpec::new(dim, n, box_len)
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, box_len: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidDimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(Error::NonPositiveBox(box_len));
        }
        Ok(Self { dim, n, box_len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.dim]
    }

    pub fn dx(&self) -> f64 {
        self.box_len / self.n as f64
    }

    /// `L^dim`.
    pub fn volume(&self) -> f64 {
        self.box_len.powi(self.dim as i32)
    }

    /// Physical frequency of wavenumber `k`.
    pub fn xi(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.box_len
    }

    /// Grid coordinate of index `j` along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.box_len + j as f64 * self.dx()
    }

    /// Signed wavevector of each flat spectrum index (FFT order); the
    /// second component is zero in one dimension.
    pub fn wavevectors(&self) -> Vec<[i64; 2]> {
        let n = self.n;
        match self.dim {
            1 => (0..n).map(|i| [fft::wavenumber(i, n), 0]).collect(),
            _ => (0..n * n)
                .map(|i| [fft::wavenumber(i / n, n), fft::wavenumber(i % n, n)])
                .collect(),
        }
    }

    /// Physical frequency vector of each flat spectrum index.
    pub fn frequencies(&self) -> Vec<[f64; 2]> {
        self.wavevectors()
            .into_iter()
            .map(|[a, b]| [self.xi(a), self.xi(b)])
            .collect()
    }

    /// Coordinates of each flat grid index.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let n = self.n;
        match self.dim {
            1 => (0..n).map(|j| [self.coordinate(j), 0.0]).collect(),
            _ => (0..n * n)
                .map(|j| [self.coordinate(j / n), self.coordinate(j % n)])
                .collect(),
        }
    }

    /// Largest `||xi||_1` on the grid, attained at the Nyquist corner.
    pub fn max_l1_frequency(&self) -> f64 {
        self.dim as f64 * PI * self.n as f64 / self.box_len
    }

    /// Flat spectrum index of wavevector `k`, if it lies in the band.
    pub fn spectrum_index(&self, k: [i64; 2]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let inside = |v: i64| (-half..half).contains(&v);
        match self.dim {
            1 => (inside(k[0]) && k[1] == 0).then(|| fft::index_of(k[0], self.n)),
            _ => (inside(k[0]) && inside(k[1]))
                .then(|| fft::index_of(k[0], self.n) * self.n + fft::index_of(k[1], self.n)),
        }
    }

    /// `(-1)^{k_1 + k_2}` per spectrum index: the phase between the plain
    /// DFT and the series convention for a grid starting at `-L/2`.
    pub(crate) fn origin_signs(&self) -> Vec<f64> {
        self.wavevectors()
            .into_iter()
            .map(|[a, b]| if (a + b).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
            .collect()
    }
}

#[inline]
pub(crate) fn l1(xi: [f64; 2]) -> f64 {
    xi[0].abs() + xi[1].abs()
}

#[inline]
pub(crate) fn norm_sq(xi: [f64; 2]) -> f64 {
    xi[0] * xi[0] + xi[1] * xi[1]
}

/// Japanese bracket `<xi> = sqrt(1 + |xi|^2)`.
#[inline]
pub(crate) fn bracket(xi: [f64; 2]) -> f64 {
    (1.0 + norm_sq(xi)).sqrt()
}

/// Rejects `e^{sigma * max_l1}` above the overflow guard.
pub(crate) fn check_exp_guard(sigma: f64, max_l1: f64) -> Result<()> {
    let exponent = sigma * max_l1;
    if exponent > EXP_GUARD {
        Err(Error::OverflowGuard { exponent })
    } else {
        Ok(())
    }
}

/// A complex field sampled on a periodic grid, with its spectrum.
///
/// Immutable once built: every operation returns a new field.
#[derive(Clone, Debug)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite field sample".into()));
        }
        let mut spectrum = fft::analyze(&values, &grid.shape());
        for (c, s) in spectrum.iter_mut().zip(grid.origin_signs()) {
            *c *= s;
        }
        Ok(Self {
            grid,
            values,
            spectrum,
        })
    }

    pub fn from_spectrum(grid: GridSpec, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                spectrum.len()
            )));
        }
        if spectrum.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite spectral coefficient".into()));
        }
        let raw: Vec<Complex64> = spectrum
            .iter()
            .zip(grid.origin_signs())
            .map(|(c, s)| c * s)
            .collect();
        let values = fft::synthesize(&raw, &grid.shape());
        Ok(Self {
            grid,
            values,
            spectrum,
        })
    }

    /// Samples `f` at the grid points; `f` receives a slice of `dim` coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let dim = grid.dim();
        let values = grid.points().iter().map(|x| f(&x[..dim])).collect();
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
            spectrum: vec![Complex64::default(); grid.len()],
        }
    }

    /// Internal constructor from raw DFT coefficients (no origin phase) and
    /// the matching samples.
    pub(crate) fn from_parts_raw(grid: GridSpec, values: Vec<Complex64>, raw: Vec<Complex64>) -> Self {
        let spectrum = raw
            .into_iter()
            .zip(grid.origin_signs())
            .map(|(c, s)| c * s)
            .collect();
        Self {
            grid,
            values,
            spectrum,
        }
    }

    /// Internal constructor from raw DFT coefficients.
    pub(crate) fn from_raw(grid: GridSpec, raw: Vec<Complex64>) -> Self {
        let values = fft::synthesize(&raw, &grid.shape());
        Self::from_parts_raw(grid, values, raw)
    }

    /// Raw DFT coefficients (series coefficients without the origin phase).
    pub(crate) fn raw_coefficients(&self) -> Vec<Complex64> {
        self.spectrum
            .iter()
            .zip(self.grid.origin_signs())
            .map(|(c, s)| c * s)
            .collect()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Series coefficients in FFT index order; see [`GridSpec::wavevectors`].
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Series coefficient of wavevector `k`, zero outside the band.
    pub fn coefficient(&self, k: [i64; 2]) -> Complex64 {
        self.grid
            .spectrum_index(k)
            .map(|i| self.spectrum[i])
            .unwrap_or_default()
    }

    pub fn scale(&self, factor: Complex64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            spectrum: self.spectrum.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn conj(&self) -> Field {
        let values: Vec<Complex64> = self.values.iter().map(|v| v.conj()).collect();
        Field::from_values(self.grid, values).expect("conjugate of a finite field is finite")
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::default())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `f - g` on the same grid.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            spectrum: self
                .spectrum
                .iter()
                .zip(&other.spectrum)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Spectral L^2 distance.
    pub fn l2_distance(&self, other: &Field) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let sum: f64 = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((self.grid.volume() * sum).sqrt())
    }

    /// Spectral L^2 norm `(L^d sum |c_k|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.spectrum.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * sum).sqrt()
    }

    /// Share of the grid mass lying within `L/4` of the box boundary.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let quarter = 0.25 * self.grid.box_len();
        let dim = self.grid.dim();
        let (mut edge, mut total) = (0.0, 0.0);
        for (x, v) in self.grid.points().iter().zip(&self.values) {
            let m = v.norm_sqr();
            total += m;
            if x[..dim].iter().any(|c| c.abs() > quarter) {
                edge += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }
}

/// Inverse transform of the forward transform of `field`, recomputed from scratch.
pub fn transform_roundtrip(field: &Field) -> Field {
    let shape = field.grid.shape();
    let raw = fft::analyze(&field.values, &shape);
    let values = fft::synthesize(&raw, &shape);
    Field::from_parts_raw(field.grid, values, raw)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Diagonal Fourier multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierSpec {
    /// `e^{+-sigma ||xi||_1}`
    GevreyExp { sigma: f64, sign: Sign },
    /// `<xi>^s`
    BracketPow { s: f64 },
    /// `i xi_axis`
    Gradient { axis: usize },
    /// `-|xi|^2`
    Laplacian,
    /// `e^{-i t |xi|^2}`, the symbol of `e^{it Delta}`.
    FreePropagator { t: f64 },
}

impl MultiplierSpec {
    pub fn symbol(&self, xi: [f64; 2]) -> Complex64 {
        match *self {
            MultiplierSpec::GevreyExp { sigma, sign } => {
                Complex64::from((sign.value() * sigma * l1(xi)).exp())
            }
            MultiplierSpec::BracketPow { s } => Complex64::from(bracket(xi).powf(s)),
            MultiplierSpec::Gradient { axis } => Complex64::new(0.0, xi[axis]),
            MultiplierSpec::Laplacian => Complex64::from(-norm_sq(xi)),
            MultiplierSpec::FreePropagator { t } => Complex64::from_polar(1.0, -t * norm_sq(xi)),
        }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        match *self {
            MultiplierSpec::GevreyExp { sigma, sign } => {
                if !(sigma >= 0.0) {
                    return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
                }
                if sign == Sign::Plus {
                    check_exp_guard(sigma, grid.max_l1_frequency())?;
                }
            }
            MultiplierSpec::Gradient { axis } if axis >= grid.dim() => {
                return Err(Error::InvalidParameter(format!(
                    "gradient axis {axis} out of range for dimension {}",
                    grid.dim()
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Multiplies the spectrum by the symbol of `m` and refreshes the samples.
pub fn apply_multiplier(field: &Field, m: MultiplierSpec) -> Result<Field> {
    m.validate(&field.grid)?;
    let freqs = field.grid.frequencies();
    let spectrum: Vec<Complex64> = field
        .spectrum
        .iter()
        .zip(&freqs)
        .map(|(c, xi)| c * m.symbol(*xi))
        .collect();
    Field::from_spectrum(field.grid, spectrum)
}

/// Strip half-width and Sobolev index of a Gevrey space `G^{sigma,s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GevreyParams {
    pub sigma: f64,
    pub s: f64,
}

impl GevreyParams {
    pub fn new(sigma: f64, s: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(Self { sigma, s })
    }

    /// `G^{0,0} = L^2`.
    pub fn l2() -> Self {
        Self { sigma: 0.0, s: 0.0 }
    }
}

/// `||e^{sigma ||D||} <D>^s f||_{L^2}` evaluated on the spectrum.
pub fn gevrey_sobolev_norm(field: &Field, gp: GevreyParams) -> Result<f64> {
    Ok(gevrey_sobolev_norm_sq(field, gp)?.sqrt())
}

pub(crate) fn gevrey_sobolev_norm_sq(field: &Field, gp: GevreyParams) -> Result<f64> {
    if !(gp.sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {}", gp.sigma)));
    }
    check_exp_guard(gp.sigma, field.grid.max_l1_frequency())?;
    let freqs = field.grid.frequencies();
    let sum: f64 = field
        .spectrum
        .iter()
        .zip(&freqs)
        .map(|(c, xi)| {
            let mut w = 1.0;
            if gp.sigma != 0.0 {
                w *= (2.0 * gp.sigma * l1(*xi)).exp();
            }
            if gp.s != 0.0 {
                w *= (1.0 + norm_sq(*xi)).powf(gp.s);
            }
            w * c.norm_sqr()
        })
        .sum();
    Ok(field.grid.volume() * sum)
}

/// Riemann-sum `L^q` norm; `q = f64::INFINITY` gives the max modulus.
///
/// Panics if `q < 1`.
pub fn lebesgue_norm(field: &Field, q: f64) -> f64 {
    assert!(q >= 1.0, "lebesgue_norm requires q >= 1, got {q}");
    if q.is_infinite() {
        return field.max_abs();
    }
    let cell = field.grid.dx().powi(field.grid.dim() as i32);
    (cell * lebesgue_sum(&field.values, q)).powf(1.0 / q)
}

/// `sum_j |v_j|^q`, with integer fast paths.
pub(crate) fn lebesgue_sum(values: &[Complex64], q: f64) -> f64 {
    if q == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum()
    } else if q.fract() == 0.0 && q <= 16.0 && (q as i32) % 2 == 0 {
        let half = q as i32 / 2;
        values.iter().map(|v| v.norm_sqr().powi(half)).sum()
    } else {
        values.iter().map(|v| v.norm().powf(q)).sum()
    }
}
