use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational `re + i*im`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Multiply by the imaginary unit: `(re + i im) * i = -im + i re`.
    pub fn mul_i(&self) -> Self {
        Self::new(-self.im.clone(), self.re.clone())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

/// Rational to double, accurate also when numerator/denominator overflow f64.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // fall back to a scaled division for giant integers
    let num = r.numer();
    let den = r.denom();
    let shift = (num.bits() as i64 - den.bits() as i64).max(0);
    let scaled = (num << 64u32) / den;
    match scaled.to_f64() {
        Some(v) => v / 2f64.powi(64),
        None => {
            let sign = if (num.is_negative()) != (den.is_negative()) {
                -1.0
            } else {
                1.0
            };
            sign * f64::INFINITY * if shift > 0 { 1.0 } else { 0.0 }
        }
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&CRat> for CRat {
    fn add_assign(&mut self, rhs: &CRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        CRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+({})i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = CRat::i();
        assert_eq!(&i * &i, CRat::from_int(-1));
    }

    #[test]
    fn exact_arithmetic_closed() {
        let a = CRat::from_ratio(1, 3);
        let b = CRat::from_ratio(1, 6);
        assert_eq!(&a + &b, CRat::from_ratio(1, 2));
        assert_eq!(&a * &b, CRat::from_ratio(1, 18));
        assert_eq!(&(&a - &a) + &CRat::zero(), CRat::zero());
    }

    #[test]
    fn conversion() {
        let z = CRat::new(
            BigRational::new(BigInt::from(1), BigInt::from(4)),
            BigRational::new(BigInt::from(-3), BigInt::from(2)),
        );
        let c = z.to_c64();
        assert_eq!(c.re, 0.25);
        assert_eq!(c.im, -1.5);
    }
}
