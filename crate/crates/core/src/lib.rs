//! Exact arithmetic for 2-descent on elliptic curves `y² = x(x−e₁)(x+e₂)`
//! with full rational 2-torsion.
//!
//! The crate computes 2-Selmer groups of quadratic twists by two independent
//! routes (kernels of bit-packed F₂ matrices built from Hilbert symbols, and
//! direct enumeration of everywhere-locally-solvable descent classes), the
//! Cassels pairing on the pure 2-Selmer group, and genus-theory invariants
//! (Rédei matrices, 4- and 8-ranks of imaginary quadratic class groups) with
//! the resulting congruent-number style criteria.
//!
//! Everything is exact: arbitrary-precision integers and rationals, p-adic
//! approximations with certified precision, and exact sign arithmetic in real
//! quadratic extensions. No floating point is used anywhere.

pub mod arith;
pub mod cassels;
pub mod curves;
pub mod descent;
pub mod f2linalg;
pub mod genus;
mod padic;
pub mod selmer;

mod error;
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
