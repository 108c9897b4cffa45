//! Little Hilbert/Sobolev spaces of expansion coefficients.
//!
//! In the coefficient realization the operator pair acts diagonally,
//! `B: {c_beta} -> {lambda_beta c_beta}`, the resolvent divides entrywise,
//! and the compactness/sector estimates become explicit tail bounds.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::Value;
use thiserror::Error;

use crate::evolution::CoeffSeq;
use crate::polyalg::MultiIndex;
use crate::special::kernel_amplitude_at_zero;
use crate::SpectralParams;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error(
        "resolvent parameter hits the spectrum: |lambda - lambda_beta| = \
         {dist:.3e} at beta of order {order}"
    )]
    EigenvalueHit { dist: f64, order: u32 },
}

/// Finitely supported coefficient vector `{a_beta}`.
#[derive(Debug, Clone, Default)]
pub struct SeqVec {
    entries: BTreeMap<MultiIndex, Complex64>,
}

impl SeqVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, beta: MultiIndex, a: Complex64) {
        if a.norm_sqr() == 0.0 {
            self.entries.remove(&beta);
        } else {
            self.entries.insert(beta, a);
        }
    }

    pub fn get(&self, beta: &MultiIndex) -> Complex64 {
        self.entries
            .get(beta)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `l^2` pairing `(v, w)_0 = sum a_beta conj(c_beta)`.
    pub fn dot(&self, other: &SeqVec) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in &self.entries {
            acc += a * other.get(b).conj();
        }
        acc
    }

    /// Shares the coefficient-sequence JSON schema.
    pub fn to_json(&self) -> Value {
        let cut = self
            .entries
            .keys()
            .map(|b| b.order())
            .max()
            .unwrap_or(0);
        let mut c = CoeffSeq::new(cut);
        for (b, a) in &self.entries {
            c.insert(b.clone(), *a);
        }
        c.to_json()
    }

    pub fn from_json(v: &Value) -> Option<SeqVec> {
        let c = CoeffSeq::from_json(v)?;
        let mut out = SeqVec::new();
        for (b, a) in c.iter() {
            out.insert(b.clone(), *a);
        }
        Some(out)
    }
}

/// `||v||_0 = sqrt(sum |a_beta|^2)`.
pub fn l2_norm(v: &SeqVec) -> f64 {
    v.entries
        .values()
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Graph norm `||v||_1 = sqrt(sum (1 + |lambda_beta|^2) |a_beta|^2)`.
pub fn h2m_norm(v: &SeqVec, sp: &SpectralParams) -> f64 {
    v.entries
        .iter()
        .map(|(b, a)| (1.0 + sp.eigenvalue(b.order()).powi(2)) * a.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Diagonal action `{a_beta} -> {lambda_beta a_beta}`.
pub fn apply_diag_b(v: &SeqVec, sp: &SpectralParams) -> SeqVec {
    let mut out = SeqVec::new();
    for (b, a) in &v.entries {
        out.insert(b.clone(), a * sp.eigenvalue(b.order()));
    }
    out
}

/// Sector-bound report accompanying a resolvent application: in the sector
/// `|arg lambda| < pi/2 + theta` the estimate
/// `||(B - lambda)^{-1} v||_0 <= ||v||_0 / (|lambda| sin theta)` holds with
/// the stated constant at `theta = pi/4`.
#[derive(Debug, Clone, Copy)]
pub struct SectorBound {
    pub theta: f64,
    pub in_sector: bool,
    pub observed_norm: f64,
    pub bound: f64,
    pub satisfied: bool,
}

const EIGEN_GUARD: f64 = 1e-9;

/// Entrywise resolvent `b_beta = a_beta / (lambda_beta - lambda)` together
/// with the sector-estimate check at `theta = pi/4`.
pub fn resolvent_apply(
    v: &SeqVec,
    lambda: Complex64,
    sp: &SpectralParams,
) -> Result<(SeqVec, SectorBound), SeqError> {
    let mut out = SeqVec::new();
    for (b, a) in &v.entries {
        let denom = Complex64::new(sp.eigenvalue(b.order()), 0.0) - lambda;
        if denom.norm() < EIGEN_GUARD {
            return Err(SeqError::EigenvalueHit {
                dist: denom.norm(),
                order: b.order(),
            });
        }
        out.insert(b.clone(), a / denom);
    }
    // distance guard against the whole spectrum {-l/2m}, not only the
    // supported modes
    let two_m = sp.two_m() as f64;
    let nearest_order = (-(lambda.re) * two_m).round().max(0.0);
    let nearest = Complex64::new(-nearest_order / two_m, 0.0);
    if (lambda - nearest).norm() < EIGEN_GUARD {
        return Err(SeqError::EigenvalueHit {
            dist: (lambda - nearest).norm(),
            order: nearest_order as u32,
        });
    }
    let theta = std::f64::consts::FRAC_PI_4;
    let in_sector = lambda.norm() > 0.0
        && lambda.arg().abs() < std::f64::consts::FRAC_PI_2 + theta;
    let observed = l2_norm(&out);
    let bound = l2_norm(v) / (lambda.norm() * theta.sin());
    Ok((
        out,
        SectorBound {
            theta,
            in_sector,
            observed_norm: observed,
            bound,
            satisfied: !in_sector || observed <= bound * (1.0 + 1e-12),
        },
    ))
}

/// Coefficient-growth admissibility: `|c_beta| ~ l^rate` keeps the expansion
/// inside the closure space iff `rate < 2 (2 - alpha)/alpha`, which reduces
/// exactly to `rate < 2 - 2/m`.
pub fn admissible_growth(rate_exponent: f64, sp: &SpectralParams) -> bool {
    rate_exponent < 2.0 - 2.0 / sp.m() as f64
}

/// Leading-order estimate of `||psi_beta||^2_{L^2_rho}` at `|beta| = l`:
/// `l^{-l(2-alpha)/alpha} K^{l/(2m-1)}` with
/// `K = e^{2m-1} / (2m (m e)^{(2m-1)/m})`, scaled by the kernel amplitude
/// `|F(0)|^2` so the small-l values are comparable to quadrature.
pub fn mode_norm_estimate(l: u32, sp: &SpectralParams) -> f64 {
    assert!(l >= 2, "estimate is a large-order asymptotic, need l >= 2");
    let alpha = sp.alpha();
    let m = sp.m() as f64;
    let lf = l as f64;
    let k = ((2.0 * m - 1.0).exp())
        / (2.0 * m * (m * std::f64::consts::E).powf((2.0 * m - 1.0) / m));
    let core = lf.powf(-lf * (2.0 - alpha) / alpha) * k.powf(lf / (2.0 * m - 1.0));
    core * kernel_amplitude_at_zero(sp.m(), sp.dim()).powi(2)
}
