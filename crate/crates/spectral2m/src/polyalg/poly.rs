use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::crat::{rat_to_f64, CRat};
use super::multiindex::MultiIndex;

/// Sparse multivariate polynomial with exact complex-rational coefficients.
///
/// An optional rational `norm_factor_sq` rides along with the integer-ish
/// core so that the irrational prefactors `1/sqrt(beta!)` of the Hermite
/// family never force floating point: the polynomial represents
/// `sqrt(norm_factor_sq) * sum terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<MultiIndex, CRat>,
    norm_factor_sq: BigRational,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
            norm_factor_sq: BigRational::one(),
        }
    }

    pub fn constant(dim: usize, c: CRat) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, CRat::one())
    }

    /// The monomial `y^beta` with coefficient `c`.
    pub fn monomial(beta: MultiIndex, c: CRat) -> Self {
        let mut p = Self::zero(beta.dim());
        p.add_term(beta, c);
        p
    }

    /// Coordinate polynomial `y_axis`.
    pub fn var(dim: usize, axis: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, axis), CRat::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, beta: &MultiIndex) -> CRat {
        self.terms.get(beta).cloned().unwrap_or_else(CRat::zero)
    }

    pub fn norm_factor_sq(&self) -> &BigRational {
        &self.norm_factor_sq
    }

    pub fn with_norm_factor_sq(mut self, f: BigRational) -> Self {
        self.norm_factor_sq = f;
        self
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|b| b.order()).max()
    }

    /// Leading term in graded lexicographic order.
    pub fn leading(&self) -> Option<(&MultiIndex, &CRat)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, beta: MultiIndex, c: CRat) {
        assert_eq!(beta.dim(), self.dim, "term dimension mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(beta.clone()).or_insert_with(CRat::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&beta);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim);
        assert_eq!(
            self.norm_factor_sq, other.norm_factor_sq,
            "adding polynomials with different normalization factors"
        );
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &CRat) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.dim).with_norm_factor_sq(self.norm_factor_sq.clone());
        }
        self.map_coeffs(|c| c * s)
    }

    pub fn scale_rat(&self, s: &BigRational) -> Poly {
        self.map_coeffs(|c| c.scale(s))
    }

    /// Multiply every coefficient by `i`.
    pub fn mul_i(&self) -> Poly {
        self.map_coeffs(|c| c.mul_i())
    }

    fn map_coeffs(&self, f: impl Fn(&CRat) -> CRat) -> Poly {
        let mut out = Poly::zero(self.dim).with_norm_factor_sq(self.norm_factor_sq.clone());
        for (b, c) in &self.terms {
            out.add_term(b.clone(), f(c));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim);
        let mut out = Poly::zero(self.dim)
            .with_norm_factor_sq(&self.norm_factor_sq * &other.norm_factor_sq);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.plus(b), ca * cb);
            }
        }
        out
    }

    /// Partial derivative along one axis, exact.
    pub fn diff(&self, axis: usize) -> Poly {
        let mut out = Poly::zero(self.dim).with_norm_factor_sq(self.norm_factor_sq.clone());
        for (b, c) in &self.terms {
            let e = b.entry(axis);
            if e == 0 {
                continue;
            }
            let scaled = c.scale(&BigRational::from_integer(BigInt::from(e)));
            out.add_term(b.bump(axis, -1), scaled);
        }
        out
    }
}

/// Horner-style evaluation at a real point; exact coefficients are converted
/// to doubles only as they enter the accumulation, and the stored
/// `sqrt(norm_factor_sq)` is applied last.
pub fn eval_poly(p: &Poly, y: &[f64]) -> Complex64 {
    assert_eq!(y.len(), p.dim(), "evaluation point dimension mismatch");
    let terms: Vec<(&MultiIndex, &CRat)> = p.terms().collect();
    let factor = rat_to_f64(p.norm_factor_sq()).sqrt();
    horner(&terms, y, 0) * factor
}

/// Recursive Horner over variables: group terms by the exponent of the
/// current variable, evaluate each group in the remaining variables, then
/// run a 1-D Horner sweep in this variable.
fn horner(terms: &[(&MultiIndex, &CRat)], y: &[f64], axis: usize) -> Complex64 {
    if terms.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    if axis + 1 == y.len() {
        let max_e = terms.iter().map(|(b, _)| b.entry(axis)).max().unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); max_e as usize + 1];
        for (b, c) in terms {
            coeffs[b.entry(axis) as usize] += c.to_c64();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * y[axis] + c;
        }
        return acc;
    }
    let max_e = terms.iter().map(|(b, _)| b.entry(axis)).max().unwrap();
    let mut groups: Vec<Vec<(&MultiIndex, &CRat)>> = vec![Vec::new(); max_e as usize + 1];
    for &(b, c) in terms {
        groups[b.entry(axis) as usize].push((b, c));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for group in groups.iter().rev() {
        acc = acc * y[axis] + horner(group, y, axis + 1);
    }
    acc
}

fn rat_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    let numer: BigInt = n.parse().ok()?;
    let denom: BigInt = d.parse().ok()?;
    if denom.is_zero() {
        return None;
    }
    Some(BigRational::new(numer, denom))
}

impl Poly {
    /// JSON form: `{"dim": N, "terms": [{"beta": [...], "re": "p/q",
    /// "im": "p/q"}], "norm_factor_sq": "p/q"}` with decimal-free rationals.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(b, c)| {
                json!({
                    "beta": b.entries(),
                    "re": rat_string(&c.re),
                    "im": rat_string(&c.im),
                })
            })
            .collect();
        json!({
            "dim": self.dim,
            "terms": terms,
            "norm_factor_sq": rat_string(&self.norm_factor_sq),
        })
    }

    pub fn from_json(v: &Value) -> Option<Poly> {
        let dim = v.get("dim")?.as_u64()? as usize;
        let mut p = Poly::zero(dim);
        for t in v.get("terms")?.as_array()? {
            let beta: Vec<u32> = t
                .get("beta")?
                .as_array()?
                .iter()
                .map(|e| e.as_u64().map(|x| x as u32))
                .collect::<Option<_>>()?;
            let re = parse_rat(t.get("re")?.as_str()?)?;
            let im = parse_rat(t.get("im")?.as_str()?)?;
            p.add_term(MultiIndex::new(beta), CRat::new(re, im));
        }
        let nf = parse_rat(v.get("norm_factor_sq")?.as_str()?)?;
        Some(p.with_norm_factor_sq(nf))
    }
}
