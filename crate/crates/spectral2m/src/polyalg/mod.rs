//! Exact symbolic algebra over complex rationals.
//!
//! Everything here is arbitrary precision: the generalized Hermite
//! polynomials, the differential expressions `B` and `B*`, and the
//! eigenvalue relations they satisfy are verified with zero numerical error.

mod crat;
mod hermite;
mod multiindex;
mod numeric;
mod poly;

pub use crat::{rat_to_f64, CRat};
pub use hermite::{
    apply_b, apply_bstar, eigenspace_dim, euler_term, hermite_star, hermite_star_core,
    hermite_plus, neg_laplacian_pow, verify_eigenpair,
};
pub use multiindex::MultiIndex;
pub use numeric::PolyC;
pub use poly::{eval_poly, Poly};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
