//! Exact arithmetic: rationals, polynomials and real algebraic numbers.

pub mod bipoly;
pub mod field;
pub mod rat;
pub mod upoly;

pub use bipoly::{squarefree_factor_bipoly, BiPoly};
pub use field::{isolate_real_roots, lift, sign_at, Field, Limits, Num, RealAlg};
pub use rat::Rat;
pub use upoly::{Isolated, UniPoly};

/// Number of distinct complex roots of a nonzero polynomial.
pub fn distinct_complex_root_count<F: Field>(p: &UniPoly<F>) -> Result<usize, crate::GermError> {
    if p.is_zero() {
        return Err(crate::GermError::InvalidInput("zero polynomial".into()));
    }
    Ok(p.distinct_complex_root_count())
}
