//! Pseudospectral evolution of the defocusing nonlinear Schrödinger equation
//! `i u_t + Δu = |u|^{p-1} u` (odd `p >= 3`, one or two space dimensions)
//! with diagnostics for the uniform radius of spatial analyticity.
//!
//! Modules:
//! - [`spectral`]: periodic grids, fields, Fourier multipliers, Gevrey-Sobolev norms.
//! - [`solver`]: split-step and Duhamel/Picard integrators, mass and energy.
//! - [`diagnostics`]: the almost-conserved functional `A_sigma`, the Gevrey
//!   commutator, the spectrum-decay radius estimator, lifespan and
//!   sigma-schedule formulas.
//! - [`bourgain`]: space-time fields, `X^{sigma,s,b}` norms, Strichartz pairs
//!   and a Monte-Carlo harness for the multilinear estimates.
//! - [`experiments`]: configuration, the canonical experiments, CSV tables
//!   and plot scripts used by the `gevrey-nls` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bourgain;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub(crate) mod fft;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral::{Field, GevreyParams, GridSpec, MultiplierSpec, Sign};
