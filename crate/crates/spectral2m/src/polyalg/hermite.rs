use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::crat::CRat;
use super::multiindex::MultiIndex;
use super::poly::Poly;
use super::PolyError;
use crate::SpectralParams;

/// `(-Delta)^m p`, computed by `m` repeated applications of
/// `-sum d^2/dy_i^2`.  Exact.
pub fn neg_laplacian_pow(p: &Poly, m: u32) -> Poly {
    assert!(m >= 1);
    let mut out = p.clone();
    for _ in 0..m {
        let mut lap = Poly::zero(p.dim()).with_norm_factor_sq(out.norm_factor_sq().clone());
        for axis in 0..p.dim() {
            lap = lap.add(&out.diff(axis).diff(axis));
        }
        out = lap.neg();
    }
    out
}

/// Euler term `y . grad p`; maps each monomial `y^gamma` to `|gamma| y^gamma`.
pub fn euler_term(p: &Poly) -> Poly {
    let mut out = Poly::zero(p.dim()).with_norm_factor_sq(p.norm_factor_sq().clone());
    for (b, c) in p.terms() {
        let deg = b.order();
        if deg == 0 {
            continue;
        }
        out.add_term(
            b.clone(),
            c.scale(&BigRational::from_integer(BigInt::from(deg))),
        );
    }
    out
}

fn check_dim(p: &Poly, sp: &SpectralParams) -> Result<(), PolyError> {
    if p.dim() != sp.dim() {
        return Err(PolyError::DimensionMismatch {
            expected: sp.dim(),
            got: p.dim(),
        });
    }
    Ok(())
}

/// Blow-up differential expression `B* p = -i (-Delta)^m p - (1/2m) y.grad p`.
pub fn apply_bstar(p: &Poly, sp: &SpectralParams) -> Result<Poly, PolyError> {
    check_dim(p, sp)?;
    let inv2m = BigRational::new(BigInt::one(), BigInt::from(sp.two_m()));
    let lap = neg_laplacian_pow(p, sp.m()).mul_i().neg();
    Ok(lap.sub(&euler_term(p).scale_rat(&inv2m)))
}

/// Forward differential expression
/// `B p = -i (-Delta)^m p + (1/2m) y.grad p + (N/2m) p`.
pub fn apply_b(p: &Poly, sp: &SpectralParams) -> Result<Poly, PolyError> {
    check_dim(p, sp)?;
    let inv2m = BigRational::new(BigInt::one(), BigInt::from(sp.two_m()));
    let n_over_2m = BigRational::new(BigInt::from(sp.dim() as u32), BigInt::from(sp.two_m()));
    let lap = neg_laplacian_pow(p, sp.m()).mul_i().neg();
    Ok(lap
        .add(&euler_term(p).scale_rat(&inv2m))
        .add(&p.scale_rat(&n_over_2m)))
}

/// Integer-coefficient core of the generalized Hermite polynomial:
/// `y^beta + sum_{j=1}^{[|beta|/2m]} (1/j!) (i (-Delta)^m)^j y^beta`.
pub fn hermite_star_core(beta: &MultiIndex, sp: &SpectralParams) -> Result<Poly, PolyError> {
    homogeneous_ladder(beta, sp, true)
}

/// Generalized Hermite polynomial `psi*_beta`, eigenfunction of `B*` with
/// eigenvalue `-|beta|/2m`.  The `1/sqrt(beta!)` prefactor is carried as the
/// exact rational `norm_factor_sq = 1/beta!`.
pub fn hermite_star(beta: &MultiIndex, sp: &SpectralParams) -> Result<Poly, PolyError> {
    let core = hermite_star_core(beta, sp)?;
    let fact = BigRational::new(BigInt::one(), BigInt::from(beta.factorial()));
    Ok(core.with_norm_factor_sq(fact))
}

/// Polynomial eigenfunction `psi+_beta` of the expression `B`, with
/// eigenvalue `(N+|beta|)/2m`; same homogeneous ladder with `-i` in place of
/// `i`.
pub fn hermite_plus(beta: &MultiIndex, sp: &SpectralParams) -> Result<Poly, PolyError> {
    let core = homogeneous_ladder(beta, sp, false)?;
    let fact = BigRational::new(BigInt::one(), BigInt::from(beta.factorial()));
    Ok(core.with_norm_factor_sq(fact))
}

/// Shared ladder `P_j = (1/j!) (s i (-Delta)^m)^j y^beta` with `s = +1` for
/// the blow-up family and `s = -1` for the forward one.
fn homogeneous_ladder(
    beta: &MultiIndex,
    sp: &SpectralParams,
    plus_i: bool,
) -> Result<Poly, PolyError> {
    if beta.dim() != sp.dim() {
        return Err(PolyError::DimensionMismatch {
            expected: sp.dim(),
            got: beta.dim(),
        });
    }
    let s = beta.order() / sp.two_m();
    let mut sum = Poly::monomial(beta.clone(), CRat::one());
    let mut power = sum.clone();
    let mut j_fact = BigRational::one();
    for j in 1..=s {
        power = neg_laplacian_pow(&power, sp.m()).mul_i();
        if !plus_i {
            power = power.neg();
        }
        if power.is_zero() {
            break;
        }
        j_fact *= BigRational::from_integer(BigInt::from(j));
        sum = sum.add(&power.scale_rat(&j_fact.recip()));
    }
    Ok(sum)
}

/// Residual `B* psi*_beta - lambda_beta psi*_beta`; the contract is that it
/// is the exact zero polynomial.
pub fn verify_eigenpair(beta: &MultiIndex, sp: &SpectralParams) -> Result<Poly, PolyError> {
    let psi = hermite_star(beta, sp)?;
    let lambda = CRat::new(
        BigRational::new(BigInt::from(-(beta.order() as i64)), BigInt::from(sp.two_m())),
        BigRational::zero(),
    );
    Ok(apply_bstar(&psi, sp)?.sub(&psi.scale(&lambda)))
}

/// Number of multiindices with `|beta| = l` in dimension `N`:
/// the binomial coefficient `C(l+N-1, N-1)`.
pub fn eigenspace_dim(l: u32, n: usize) -> u128 {
    let k = (n - 1) as u128;
    let top = l as u128 + k;
    let mut num = 1u128;
    let mut den = 1u128;
    for j in 1..=k {
        num *= top - k + j;
        den *= j;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    #[allow(unused_imports)]
    use num_traits::One as _;

    fn sp(m: u32, n: usize) -> SpectralParams {
        SpectralParams::new(m, n).unwrap()
    }

    #[test]
    fn laplacian_powers() {
        // (-Delta) y^2 = -2
        let p = Poly::monomial(MultiIndex::new(vec![2]), CRat::one());
        let l = neg_laplacian_pow(&p, 1);
        assert_eq!(l, Poly::constant(1, CRat::from_int(-2)));
        // (-Delta)^2 y^4 = 24
        let q = Poly::monomial(MultiIndex::new(vec![4]), CRat::one());
        assert_eq!(neg_laplacian_pow(&q, 2), Poly::constant(1, CRat::from_int(24)));
        // constants are annihilated
        let c = Poly::constant(2, CRat::from_int(5));
        assert!(neg_laplacian_pow(&c, 3).is_zero());
    }

    #[test]
    fn euler_identity_on_monomials() {
        let p = Poly::monomial(MultiIndex::new(vec![2]), CRat::one());
        assert_eq!(euler_term(&p), p.scale(&CRat::from_int(2)));
        let q = Poly::monomial(MultiIndex::new(vec![1, 1]), CRat::one());
        assert_eq!(euler_term(&q), q.scale(&CRat::from_int(2)));
        assert!(euler_term(&Poly::constant(1, CRat::from_int(5))).is_zero());
    }

    #[test]
    fn bstar_annihilates_constants() {
        for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
            let one = Poly::one(n);
            assert!(apply_bstar(&one, &sp(m, n)).unwrap().is_zero());
        }
    }

    #[test]
    fn bstar_on_known_eigenpolys() {
        // y^2 - 2i, m=1: eigenvalue -1
        let mut p = Poly::monomial(MultiIndex::new(vec![2]), CRat::one());
        p.add_term(MultiIndex::zero(1), CRat::i().scale(&BigRational::from_integer(BigInt::from(-2))));
        let out = apply_bstar(&p, &sp(1, 1)).unwrap();
        assert_eq!(out, p.neg());

        // y^4 + 24i, m=2: eigenvalue -1
        let mut q = Poly::monomial(MultiIndex::new(vec![4]), CRat::one());
        q.add_term(MultiIndex::zero(1), CRat::i().scale(&BigRational::from_integer(BigInt::from(24))));
        let out = apply_bstar(&q, &sp(2, 1)).unwrap();
        assert_eq!(out, q.neg());
    }

    #[test]
    fn b_spectrum_on_low_order() {
        // B 1 = (N/2m) 1
        let one = Poly::one(1);
        assert_eq!(
            apply_b(&one, &sp(1, 1)).unwrap(),
            one.scale(&CRat::from_ratio(1, 2))
        );
        // B y = y for m=1, N=1
        let y = Poly::var(1, 0);
        assert_eq!(apply_b(&y, &sp(1, 1)).unwrap(), y);
        // B 0 = 0
        assert!(apply_b(&Poly::zero(1), &sp(1, 1)).unwrap().is_zero());
    }

    #[test]
    fn hermite_star_small_cases() {
        let s11 = sp(1, 1);
        let psi0 = hermite_star(&MultiIndex::zero(1), &s11).unwrap();
        assert_eq!(psi0, Poly::one(1));

        let psi2 = hermite_star(&MultiIndex::new(vec![2]), &s11).unwrap();
        let mut expect = Poly::monomial(MultiIndex::new(vec![2]), CRat::one());
        expect.add_term(MultiIndex::zero(1), CRat::i().scale(&BigRational::from_integer(BigInt::from(-2))));
        let expect = expect.with_norm_factor_sq(BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(psi2, expect);

        let psi4 = hermite_star(&MultiIndex::new(vec![4]), &sp(2, 1)).unwrap();
        let mut expect = Poly::monomial(MultiIndex::new(vec![4]), CRat::one());
        expect.add_term(MultiIndex::zero(1), CRat::i().scale(&BigRational::from_integer(BigInt::from(24))));
        let expect = expect.with_norm_factor_sq(BigRational::new(BigInt::one(), BigInt::from(24)));
        assert_eq!(psi4, expect);
    }

    #[test]
    fn hermite_star_leading_term_is_monic() {
        for (m, n) in [(1u32, 1usize), (2, 1), (1, 2), (3, 2)] {
            let s = sp(m, n);
            for beta in MultiIndex::enumerate_up_to(n, 6) {
                let psi = hermite_star(&beta, &s).unwrap();
                assert_eq!(psi.degree(), Some(beta.order()));
                let (lead, c) = psi.leading().unwrap();
                assert_eq!(lead, &beta);
                assert_eq!(*c, CRat::one());
            }
        }
    }

    #[test]
    fn hermite_plus_eigen_relation() {
        // apply_b(hermite_plus(beta)) = ((N+|beta|)/2m) hermite_plus(beta)
        for (m, n) in [(1u32, 1usize), (2, 1), (1, 2)] {
            let s = sp(m, n);
            for beta in MultiIndex::enumerate_up_to(n, 5) {
                let plus = hermite_plus(&beta, &s).unwrap();
                let lam = CRat::new(
                    BigRational::new(
                        BigInt::from(n as u32 + beta.order()),
                        BigInt::from(2 * m),
                    ),
                    BigRational::zero(),
                );
                assert_eq!(
                    apply_b(&plus, &s).unwrap(),
                    plus.scale(&lam),
                    "m={m} N={n} beta={beta}"
                );
            }
        }
    }

    #[test]
    fn hermite_plus_examples() {
        // beta=(1), m=1, N=1 -> y with eigenvalue 1
        let p = hermite_plus(&MultiIndex::new(vec![1]), &sp(1, 1)).unwrap();
        assert_eq!(p.leading().unwrap().0.entries(), &[1]);
        // beta=(2), m=1, N=1 -> y^2 + 2i (core), eigenvalue 3/2
        let p = hermite_plus(&MultiIndex::new(vec![2]), &sp(1, 1)).unwrap();
        assert_eq!(
            p.coeff(&MultiIndex::zero(1)),
            CRat::i().scale(&BigRational::from_integer(BigInt::from(2)))
        );
    }

    #[test]
    fn eigenpair_residuals_vanish() {
        for (m, n) in [(1u32, 1usize), (1, 2), (3, 1)] {
            let s = sp(m, n);
            for beta in [
                MultiIndex::enumerate_exact(n, 3),
                MultiIndex::enumerate_exact(n, 6),
            ]
            .concat()
            {
                assert!(verify_eigenpair(&beta, &s).unwrap().is_zero());
            }
        }
        // the specific mixed case (2,1) in N=2
        assert!(verify_eigenpair(&MultiIndex::new(vec![2, 1]), &sp(1, 2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn eigenspace_dims() {
        assert_eq!(eigenspace_dim(0, 3), 1);
        assert_eq!(eigenspace_dim(2, 2), 3);
        assert_eq!(eigenspace_dim(5, 1), 1);
        assert_eq!(
            eigenspace_dim(4, 3) as usize,
            MultiIndex::enumerate_exact(3, 4).len()
        );
    }

    #[test]
    fn generating_recursion_matches_hermite_star_core() {
        // For m=1, N=1 the polynomials h_k from the kernel generating
        // relation D^k e^{i y^2/4} = h_k(y) e^{i y^2/4}, i.e.
        // h_{k+1} = h_k' + (i y / 2) h_k, satisfy h_k = (i/2)^k * core_k.
        // This is the classic-Hermite recursion transplanted to imaginary
        // argument, and is an independent construction of the same family.
        let s11 = sp(1, 1);
        let iy_half = Poly::var(1, 0)
            .mul_i()
            .scale_rat(&BigRational::new(BigInt::one(), BigInt::from(2)));
        let mut h = Poly::one(1);
        for k in 1..=6u32 {
            h = h.diff(0).add(&iy_half.mul(&h));
            let core = hermite_star_core(&MultiIndex::new(vec![k]), &s11).unwrap();
            // (i/2)^k
            let mut scale = CRat::one();
            for _ in 0..k {
                scale = scale.mul_i().scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
            }
            assert_eq!(h, core.scale(&scale), "k={k}");
        }
    }

    #[test]
    fn dimension_mismatch_reported() {
        let beta = MultiIndex::new(vec![1, 1]);
        assert!(hermite_star(&beta, &sp(1, 1)).is_err());
    }

    #[test]
    fn factorial_normalization_squares() {
        let s11 = sp(1, 1);
        let psi = hermite_star(&MultiIndex::new(vec![4]), &s11).unwrap();
        assert_eq!(
            psi.norm_factor_sq(),
            &BigRational::new(BigInt::one(), BigInt::from(24))
        );
        assert!(!psi.norm_factor_sq().is_zero());
    }
}
