use std::collections::BTreeMap;

use num_complex::Complex64;

use super::multiindex::MultiIndex;
use super::poly::{eval_poly, Poly};
use crate::SpectralParams;

/// Polynomial with complex-double coefficients, used where exact rational
/// algebra meets floating-point data: eigenspace combinations with measured
/// coefficients and the nilpotent polynomial evolution.
#[derive(Debug, Clone, Default)]
pub struct PolyC {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl PolyC {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.norm() <= tol)
    }

    pub fn add_term(&mut self, beta: MultiIndex, c: Complex64) {
        assert_eq!(beta.dim(), self.dim);
        let e = self.terms.entry(beta).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    /// Exact polynomial scaled by a complex coefficient; the stored
    /// `sqrt(norm_factor_sq)` is folded in.
    pub fn from_exact(p: &Poly, scale: Complex64) -> Self {
        let factor = super::crat::rat_to_f64(p.norm_factor_sq()).sqrt();
        let mut out = Self::zero(p.dim());
        for (b, c) in p.terms() {
            out.add_term(b.clone(), c.to_c64() * factor * scale);
        }
        out
    }

    pub fn add(&self, other: &PolyC) -> PolyC {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> PolyC {
        let mut out = Self::zero(self.dim);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c * s);
        }
        out
    }

    pub fn diff(&self, axis: usize) -> PolyC {
        let mut out = Self::zero(self.dim);
        for (b, c) in &self.terms {
            let e = b.entry(axis);
            if e == 0 {
                continue;
            }
            out.add_term(b.bump(axis, -1), c * e as f64);
        }
        out
    }

    pub fn neg_laplacian_pow(&self, m: u32) -> PolyC {
        let mut out = self.clone();
        for _ in 0..m {
            let mut lap = PolyC::zero(self.dim);
            for axis in 0..self.dim {
                lap = lap.add(&out.diff(axis).diff(axis));
            }
            out = lap.scale(Complex64::new(-1.0, 0.0));
        }
        out
    }

    pub fn eval(&self, y: &[f64]) -> Complex64 {
        assert_eq!(y.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, c) in &self.terms {
            let mut mon = 1.0;
            for (axis, &e) in b.entries().iter().enumerate() {
                mon *= y[axis].powi(e as i32);
            }
            acc += c * mon;
        }
        acc
    }

    /// Evaluate at `s * y` (diagonal scaling of the argument).
    pub fn compose_scale(&self, s: f64) -> PolyC {
        let mut out = PolyC::zero(self.dim);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c * s.powi(b.order() as i32));
        }
        out
    }

    /// Exact physical evolution of polynomial data under
    /// `u_t = -i (-Delta)^m u`: the series `sum_j (t^j/j!) (-i(-Delta)^m)^j p`
    /// terminates because the Laplacian lowers degree.
    pub fn evolve_physical(&self, sp: &SpectralParams, t: f64) -> PolyC {
        let mut sum = self.clone();
        let mut power = self.clone();
        let mut j = 0u32;
        loop {
            j += 1;
            power = power
                .neg_laplacian_pow(sp.m())
                .scale(Complex64::new(0.0, -1.0));
            if power.terms.is_empty() {
                break;
            }
            let coeff = t.powi(j as i32)
                / (1..=j).map(|k| k as f64).product::<f64>();
            sum = sum.add(&power.scale(Complex64::new(coeff, 0.0)));
            if j > 4 * self.dim as u32 + self.degree().unwrap_or(0) {
                break;
            }
        }
        sum
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|b| b.order()).max()
    }

    /// Real part as a polynomial over the reals (coefficients' real parts
    /// stay in `re`, imaginary parts contribute nothing on real points).
    pub fn eval_re(&self, y: &[f64]) -> f64 {
        self.eval(y).re
    }
}

/// Convenience: evaluate an exact polynomial scaled by a complex number.
pub fn eval_scaled(p: &Poly, scale: Complex64, y: &[f64]) -> Complex64 {
    scale * eval_poly(p, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{hermite_star, CRat};

    #[test]
    fn diagonal_semigroup_action_on_hermite_star() {
        // Evolving psi*_2 (m=1) physically and rescaling to the blow-up
        // frame multiplies it by e^{lambda tau}: u0 = y^2 - 2i evolves to
        // y^2 - 2i(1-t), and at y e^{-tau/2}, t = 1 - e^{-tau} this is
        // e^{-tau} (y^2 - 2i).
        let sp = SpectralParams::new(1, 1).unwrap();
        let psi2 = hermite_star(&MultiIndex::new(vec![2]), &sp).unwrap();
        let p = PolyC::from_exact(&psi2, Complex64::new(1.0, 0.0));
        let tau = 0.7f64;
        let t = 1.0 - (-tau).exp();
        let evolved = p.evolve_physical(&sp, t).compose_scale((-tau / 2.0).exp());
        let decay = (-tau).exp();
        for y in [-2.0, 0.3, 1.7] {
            let got = evolved.eval(&[y]);
            let want = p.eval(&[y]) * decay;
            assert!((got - want).norm() < 1e-14, "y={y}: {got} vs {want}");
        }
    }

    #[test]
    fn from_exact_applies_normalization() {
        let sp = SpectralParams::new(1, 1).unwrap();
        let psi2 = hermite_star(&MultiIndex::new(vec![2]), &sp).unwrap();
        let p = PolyC::from_exact(&psi2, Complex64::new(1.0, 0.0));
        // psi*_2(0) = -2i / sqrt(2)
        let v = p.eval(&[0.0]);
        assert!((v - Complex64::new(0.0, -2.0 / 2.0f64.sqrt())).norm() < 1e-15);
        let _ = CRat::one();
    }
}
