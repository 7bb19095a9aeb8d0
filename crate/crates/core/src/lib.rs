//! Exact algebra of linear differential operators with polynomial
//! coefficients on ℝⁿ, their polynomial symbols on the cotangent bundle,
//! and the automorphism families of both Lie algebras.
//!
//! Everything is computed over the rationals with arbitrary precision, so
//! every identity checked by this crate is checked exactly.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use opcalc_core::{DiffOp, Polynomial};
//!
//! let d1 = DiffOp::derivation(1, 0);
//! let x1 = DiffOp::multiplication(Polynomial::var(1, 0));
//! assert_eq!(d1.commutator(&x1).unwrap(), DiffOp::identity(1));
//! ```
#![no_std]

extern crate alloc;

pub mod affine;
pub mod auto;
mod error;
pub mod form;
pub mod index;
mod int;
pub mod poly;
pub mod symbol;
pub mod verify;
pub mod weyl;

mod fmt_util;

pub use affine::AffineMap;
pub use auto::{D1AutoSpec, DAutoSpec, SAutoSpec};
pub use error::{AlgebraError, Result};
pub use form::{ClosedOneForm, OneForm};
pub use index::MultiIndex;
pub use poly::Polynomial;
pub use symbol::PhaseSymbol;
pub use verify::{Counterexample, LieElement, Property, VerificationReport};
pub use weyl::{DiffOp, Order, Side};

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `num / den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
