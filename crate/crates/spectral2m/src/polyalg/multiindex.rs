use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

/// Multiindex `beta` in `N` variables: a vector of non-negative integers.
///
/// Ordered by graded lexicographic order (total degree first, then lex),
/// which fixes a deterministic term order for serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multiindex needs dimension >= 1");
        Self(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// `e_axis`, the unit multiindex along one coordinate.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn entry(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// Order `|beta| = sum beta_i`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `beta! = prod beta_i!`, exact.
    pub fn factorial(&self) -> BigUint {
        let mut acc = BigUint::one();
        for &e in &self.0 {
            for k in 2..=e as u64 {
                acc *= k;
            }
        }
        acc
    }

    /// Component-wise sum (monomial product exponent).
    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Raise the entry along `axis` by `k`.
    pub fn bump(&self, axis: usize, k: i64) -> MultiIndex {
        let mut e = self.0.clone();
        e[axis] = (e[axis] as i64 + k) as u32;
        MultiIndex::new(e)
    }

    /// All multiindices of dimension `dim` with `|beta| = order`.
    pub fn enumerate_exact(dim: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fn rec(cur: &mut Vec<u32>, axis: usize, left: u32, out: &mut Vec<MultiIndex>) {
            if axis + 1 == cur.len() {
                cur[axis] = left;
                out.push(MultiIndex::new(cur.clone()));
                return;
            }
            for v in (0..=left).rev() {
                cur[axis] = v;
                rec(cur, axis + 1, left - v, out);
            }
        }
        rec(&mut cur, 0, order, &mut out);
        out.sort();
        out
    }

    /// All multiindices with `|beta| <= max_order`, graded-lex sorted.
    pub fn enumerate_up_to(dim: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for l in 0..=max_order {
            out.extend(Self::enumerate_exact(dim, l));
        }
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
