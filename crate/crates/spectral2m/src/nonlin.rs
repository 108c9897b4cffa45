//! Quasilinear nonlinear-eigenvalue machinery at residual level.
//!
//! Self-similar solutions `u = (+-t)^{-alpha} f(y)`, `y = x/(+-t)^{beta}`
//! with `beta = (1 - alpha n)/2m` turn the quasilinear equation
//! `u_t = -i (-Delta)^m (|u|^n u)` into the pair of eigenvalue problems
//!
//! ```text
//! -i (-Delta)^m (|f|^n f) +- beta y.grad f +- alpha f = 0,
//! ```
//!
//! checked here for the explicit members and the `n -> 0` linear anchor.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{apply_symbol, CGrid, GridError};
use crate::SpectralParams;

#[derive(Debug, Error)]
pub enum NlepError {
    #[error("the closed-form global pair exists for m = 1 only (got m = {0})")]
    SecondOrderOnly(u32),
    #[error("growth exponents need n > 0")]
    ZeroN,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Which of the two self-similar branches a pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    /// Global decay as `t -> +infinity`.
    Plus,
    /// Blow-up as `t -> 0^-`.
    Minus,
}

/// A (candidate) nonlinear eigenpair.
#[derive(Debug, Clone)]
pub struct NLEigenpair {
    pub alpha: f64,
    /// `beta = (1 - alpha n)/2m`, kept consistent by construction.
    pub beta_exp: f64,
    pub n: f64,
    pub sign: BranchSign,
    pub profile: Profile,
}

#[derive(Debug, Clone)]
pub enum Profile {
    /// `f(y) = amplitude * e^{i |y|^2 / 4}` (second-order global family).
    ChirpedConstant { amplitude: f64 },
    /// `f == 1` (blow-up family, all m and n).
    One,
    /// Arbitrary sampled profile.
    Grid(CGrid),
}

impl NLEigenpair {
    pub fn sample(&self, y: &[f64]) -> Complex64 {
        match &self.profile {
            Profile::ChirpedConstant { amplitude } => {
                let r2: f64 = y.iter().map(|x| x * x).sum();
                Complex64::from_polar(*amplitude, r2 / 4.0)
            }
            Profile::One => Complex64::new(1.0, 0.0),
            Profile::Grid(_) => unreachable!("sample() is for closed forms"),
        }
    }
}

/// Closed-form global pair for `m = 1`:
/// `alpha = N/(2 + N n)`, `f = (2/(2+Nn))^{1/n} e^{i |y|^2/4}`.
pub fn explicit_pair_plus(n: f64, n_dim: usize, m: u32) -> Result<NLEigenpair, NlepError> {
    if m != 1 {
        return Err(NlepError::SecondOrderOnly(m));
    }
    assert!(n > 0.0);
    let nf = n_dim as f64;
    let alpha = nf / (2.0 + nf * n);
    let amplitude = (2.0 / (2.0 + nf * n)).powf(1.0 / n);
    Ok(NLEigenpair {
        alpha,
        beta_exp: (1.0 - alpha * n) / 2.0,
        n,
        sign: BranchSign::Plus,
        profile: Profile::ChirpedConstant { amplitude },
    })
}

/// The first blow-up pair, valid for every `m` and `n`:
/// `alpha = 0`, `f == 1`.
pub fn explicit_pair_minus(n: f64, sp: &SpectralParams) -> NLEigenpair {
    NLEigenpair {
        alpha: 0.0,
        beta_exp: 1.0 / sp.two_m() as f64,
        n,
        sign: BranchSign::Minus,
        profile: Profile::One,
    }
}

/// Residual report for a sampled pair.
#[derive(Debug)]
pub struct NlepReport {
    pub residual: CGrid,
    /// sup of the residual over `|y| <= extent/2`.
    pub sup_residual: f64,
    /// Points where `|f| < 1e-10` met `n < 1`; the fractional power is not
    /// smooth there and the local residual is unreliable.
    pub nodal_flag: bool,
}

/// Evaluate `-i (-Delta)^m (|f|^n f) +- beta y.grad f +- alpha f` with
/// spectral differentiation for `(-Delta)^m` (on the smoothly windowed
/// field) and 4th-order centered differences for `y.grad f`.
pub fn nlep_residual(
    pair: &NLEigenpair,
    sp: &SpectralParams,
    shape: &[usize],
    extent: f64,
) -> Result<NlepReport, NlepError> {
    let spacing: Vec<f64> = shape.iter().map(|&n| 2.0 * extent / n as f64).collect();
    let f_grid = match &pair.profile {
        Profile::Grid(g) => g.clone(),
        _ => CGrid::from_fn(shape, &spacing, |y| pair.sample(y))?,
    };
    let sgn = match pair.sign {
        BranchSign::Plus => 1.0,
        BranchSign::Minus => -1.0,
    };
    // |f|^n f with the modulus clamped away from zero
    let nodal_flag = pair.n > 0.0
        && pair.n < 1.0
        && f_grid.data().iter().any(|z| z.norm() < 1e-10);
    let nl = f_grid.map(|z| {
        let a = z.norm().max(1e-300);
        z * a.powf(pair.n)
    });
    // constants are in the kernel of (-Delta)^m; splitting off the mean
    // keeps that exact under the boundary window
    let mean = nl.data().iter().sum::<Complex64>() / nl.len() as f64;
    let m = sp.m();
    let lap = apply_symbol(&nl.map(|z| z - mean).windowed(0.7), |w| {
        let w2: f64 = w.iter().map(|x| x * x).sum();
        Complex64::new(w2.powi(m as i32), 0.0)
    });
    let mut residual = lap.map(|z| z * Complex64::new(0.0, -1.0));
    // +- beta y.grad f by centered differences, +- alpha f
    let dim = f_grid.dim();
    let shape_v = f_grid.shape().to_vec();
    let strides: Vec<usize> = {
        let mut s = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * shape_v[a + 1];
        }
        s
    };
    let data = f_grid.data();
    let mut coords = vec![0.0; dim];
    let mut idx_nd = vec![0usize; dim];
    for idx in 0..f_grid.len() {
        f_grid.coords_of(idx, &mut coords);
        let mut rem = idx;
        for a in (0..dim).rev() {
            idx_nd[a] = rem % shape_v[a];
            rem /= shape_v[a];
        }
        let mut euler = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            let n = shape_v[a];
            let h = f_grid.spacing()[a];
            let j = idx_nd[a];
            let base = idx - j * strides[a];
            let nb = |off: isize| -> Complex64 {
                let jj = (j as isize + off).rem_euclid(n as isize) as usize;
                data[base + jj * strides[a]]
            };
            let d = (-nb(2) + nb(1) * 8.0 - nb(-1) * 8.0 + nb(-2)) / (12.0 * h);
            euler += coords[a] * d;
        }
        residual.data_mut()[idx] +=
            sgn * (pair.beta_exp * euler + pair.alpha * data[idx]);
    }
    // sup over the half-extent interior
    let mut sup = 0.0f64;
    for idx in 0..residual.len() {
        residual.coords_of(idx, &mut coords);
        if coords.iter().all(|&y| y.abs() <= extent / 2.0) {
            sup = sup.max(residual.data()[idx].norm());
        }
    }
    Ok(NlepReport {
        residual,
        sup_residual: sup,
        nodal_flag,
    })
}

/// Growth-exponent balance for the blow-up problem.
#[derive(Debug, Clone, Copy)]
pub struct GrowthExponents {
    /// WKBJ algebraic-factor exponent from
    /// `delta n + (2m-1)(alpha_exp - 1) = 1` with `alpha_exp = 2m/(2m-1)`
    /// (identically zero for the pure-power symbol).
    pub delta_wkbj: f64,
    /// Fast bundle `f ~ |y|^{2m/n}`.
    pub blowup_growth: f64,
    /// Slow bundle `f ~ |y|^{2m|alpha|/(1+|alpha| n)}`.
    pub minimal_growth: f64,
    /// The admissibility ordering `minimal < blowup`.
    pub ordering_ok: bool,
}

pub fn growth_exponents(
    n: f64,
    sp: &SpectralParams,
    alpha: f64,
) -> Result<GrowthExponents, NlepError> {
    if n <= 0.0 {
        return Err(NlepError::ZeroN);
    }
    let m = sp.m() as f64;
    let alpha_exp = 2.0 * m / (2.0 * m - 1.0);
    let delta = (1.0 - (2.0 * m - 1.0) * (alpha_exp - 1.0)) / n;
    let blowup = 2.0 * m / n;
    let minimal = 2.0 * m * alpha.abs() / (1.0 + alpha.abs() * n);
    Ok(GrowthExponents {
        delta_wkbj: delta,
        blowup_growth: blowup,
        minimal_growth: minimal,
        ordering_ok: minimal < blowup,
    })
}

/// Branching data at `n -> 0+` for the first global branch (`m = 1`):
/// the linear anchor `alpha(0) = N/2` and the slope `d alpha/dn(0) = -N^2/4`
/// compared with a finite-difference slope of the closed-form family,
/// Richardson-extrapolated to `n = 0` from `n = 1e-3` and `1e-4`.
#[derive(Debug, Clone, Copy)]
pub struct BranchingSlope {
    pub linear_anchor: f64,
    pub analytic_slope: f64,
    pub fd_slope: f64,
    pub rel_error: f64,
}

pub fn branching_slope_check(n_dim: usize) -> BranchingSlope {
    let nf = n_dim as f64;
    let anchor = nf / 2.0;
    let analytic = -nf * nf / 4.0;
    let alpha = |n: f64| nf / (2.0 + nf * n);
    let (n1, n2) = (1e-4, 1e-3);
    let s1 = (alpha(n1) - anchor) / n1;
    let s2 = (alpha(n2) - anchor) / n2;
    // eliminate the O(n) error of the one-sided slopes
    let fd = (n2 * s1 - n1 * s2) / (n2 - n1);
    BranchingSlope {
        linear_anchor: anchor,
        analytic_slope: analytic,
        fd_slope: fd,
        rel_error: ((fd - analytic) / analytic).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(m: u32, n: usize) -> SpectralParams {
        SpectralParams::new(m, n).unwrap()
    }

    #[test]
    fn explicit_plus_values() {
        let p = explicit_pair_plus(1.0, 1, 1).unwrap();
        assert!((p.alpha - 1.0 / 3.0).abs() < 1e-15);
        if let Profile::ChirpedConstant { amplitude } = p.profile {
            assert!((amplitude - 2.0 / 3.0).abs() < 1e-15);
        } else {
            panic!("wrong profile kind");
        }
        let p22 = explicit_pair_plus(2.0, 2, 1).unwrap();
        assert!((p22.alpha - 1.0 / 3.0).abs() < 1e-15);
        assert!(explicit_pair_plus(1.0, 1, 2).is_err());
    }

    #[test]
    fn explicit_plus_zero_n_limit() {
        // alpha -> N/2m and amplitude -> e^{-N/2}
        for n_dim in [1usize, 2] {
            let mut prev_gap = f64::INFINITY;
            for n in [1e-2, 1e-3, 1e-4] {
                let p = explicit_pair_plus(n, n_dim, 1).unwrap();
                let amp = match p.profile {
                    Profile::ChirpedConstant { amplitude } => amplitude,
                    _ => unreachable!(),
                };
                let gap = (amp - (-(n_dim as f64) / 2.0).exp()).abs()
                    + (p.alpha - n_dim as f64 / 2.0).abs();
                assert!(gap < prev_gap);
                prev_gap = gap;
            }
            assert!(prev_gap < 1e-3);
        }
    }

    #[test]
    fn beta_exponent_consistency() {
        for n in [0.3, 1.0, 2.5] {
            let p = explicit_pair_plus(n, 1, 1).unwrap();
            assert!((p.beta_exp - (1.0 - p.alpha * n) / 2.0).abs() < 1e-15);
            let q = explicit_pair_minus(n, &sp(3, 1));
            assert!((q.beta_exp - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn minus_pair_residual_is_zero() {
        for m in 1..=3u32 {
            let s = sp(m, 1);
            let pair = explicit_pair_minus(0.5, &s);
            let rep = nlep_residual(&pair, &s, &[512], 12.0).unwrap();
            assert!(rep.sup_residual < 1e-12, "m={m}: {}", rep.sup_residual);
        }
    }

    #[test]
    fn plus_pair_residual_small_grid() {
        let s = sp(1, 1);
        let pair = explicit_pair_plus(1.0, 1, 1).unwrap();
        let rep = nlep_residual(&pair, &s, &[4096], 16.0).unwrap();
        assert!(!rep.nodal_flag);
        assert!(rep.sup_residual < 1e-5, "sup {}", rep.sup_residual);
    }

    #[test]
    fn growth_exponent_examples() {
        let g = growth_exponents(1.0, &sp(1, 1), -0.5).unwrap();
        assert!((g.blowup_growth - 2.0).abs() < 1e-15);
        assert!((g.minimal_growth - 2.0 / 3.0).abs() < 1e-14);
        assert!(g.ordering_ok);
        assert!((g.delta_wkbj - 0.0).abs() < 1e-14);
        assert!(growth_exponents(0.0, &sp(1, 1), -0.5).is_err());
        // both growths vanish as n -> infinity
        let big = growth_exponents(1e9, &sp(2, 1), -2.0).unwrap();
        assert!(big.blowup_growth < 1e-8 && big.minimal_growth < 1e-8);
    }

    #[test]
    fn growth_ordering_random_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = rng.gen_range(1..=3u32);
            let n = rng.gen_range(0.01..=2.0);
            let alpha = rng.gen_range(-5.0..-0.0001);
            let g = growth_exponents(n, &sp(m, 1), alpha).unwrap();
            assert!(g.ordering_ok, "m={m} n={n} alpha={alpha}");
        }
    }

    #[test]
    fn branching_slopes() {
        let b1 = branching_slope_check(1);
        assert!((b1.linear_anchor - 0.5).abs() < 1e-15);
        assert!((b1.analytic_slope + 0.25).abs() < 1e-15);
        assert!(b1.rel_error < 1e-3);
        let b2 = branching_slope_check(2);
        assert!((b2.linear_anchor - 1.0).abs() < 1e-15);
        assert!((b2.analytic_slope + 1.0).abs() < 1e-15);
        assert!(b2.rel_error < 1e-3);
    }
}
