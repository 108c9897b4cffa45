//! Spectral toolkit for the linear Schrodinger equation of order 2m,
//! `u_t = -i (-Delta)^m u` in R^N.
//!
//! The crate is organised around the pair of rescaled operators
//!
//! ```text
//! B  = -i (-Delta)^m + (1/2m) y.grad + (N/2m) I     (forward, t -> +inf)
//! B* = -i (-Delta)^m - (1/2m) y.grad                (blow-up, t -> T^-)
//! ```
//!
//! which share the discrete spectrum `{ -|beta|/2m }`.  The eigenfunctions of
//! `B*` are generalized Hermite polynomials handled exactly in [`polyalg`];
//! the eigenfunctions of `B` are derivatives of the oscillatory rescaled
//! kernel `F(y)` computed numerically in [`kernel`].  On top of the pair sit
//! the FFT propagator and eigenfunction expansions ([`evolution`]), the
//! large-time / blow-up classifiers ([`asymptotics`]), the boundary
//! characteristic-point machinery ([`regularity`]), the quasilinear
//! eigenvalue checks ([`nonlin`]) and the coefficient-space model
//! ([`seqspace`]).

pub mod acceptance;
pub mod asymptotics;
pub mod evolution;
pub mod grid;
pub mod kernel;
pub mod nonlin;
pub mod ode;
pub mod polyalg;
pub mod regularity;
pub mod seqspace;
pub mod special;

use thiserror::Error;

/// Half-order `m` and ambient dimension `N` of the equation
/// `u_t = -i (-Delta)^m u` in `R^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralParams {
    m: u32,
    dim: usize,
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("half-order m must be >= 1, got {0}")]
    BadOrder(u32),
    #[error("dimension N must be >= 1, got {0}")]
    BadDim(usize),
}

impl SpectralParams {
    pub fn new(m: u32, dim: usize) -> Result<Self, ParamError> {
        if m < 1 {
            return Err(ParamError::BadOrder(m));
        }
        if dim < 1 {
            return Err(ParamError::BadDim(dim));
        }
        Ok(Self { m, dim })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn two_m(&self) -> u32 {
        2 * self.m
    }

    /// Weight exponent `alpha = 2m/(2m-1)`, always in (1, 2].
    pub fn alpha(&self) -> f64 {
        2.0 * self.m as f64 / (2.0 * self.m as f64 - 1.0)
    }

    /// Eigenvalue `lambda = -l / 2m` shared by the operator pair at order `l`.
    pub fn eigenvalue(&self, order: u32) -> f64 {
        -(order as f64) / self.two_m() as f64
    }
}
