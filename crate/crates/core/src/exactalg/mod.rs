//! Exact rational arithmetic: univariate polynomials over ℚ and Sturm-based
//! sign and root certification.

mod poly;
pub mod rat;
mod sturm;

use thiserror::Error;

pub use poly::{PolyDisplay, RatPoly};
pub use rat::{format_rat, parse_rat, ParseRatError, Rat};
pub use sturm::{
    count_roots, is_negative_on_positive_axis, negativity_witness, nonnegative_roots_isolated,
    real_roots_isolated, NegativityWitness, RootInterval, RootRange, SturmChain,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactAlgError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
}
