//! Exact-arithmetic bounds on the maximum of a polynomial over a rational polytope.
//!
//! The lower and upper bounds are built from the moments `∫_P f(x)^k dx`,
//! which are computed exactly with the exponential valuation of the polytope
//! (Brion–Lawrence–Varchenko vertex cones). Two integration backends are
//! provided:
//!
//! - powers of linear forms, obtained from the monomial basis expansion,
//! - Handelman decompositions `f + s = Σ c_α g^α` found by an exact LP, whose
//!   products of affine factors are integrated with a truncated series method.
//!
//! Everything upstream of the final decimal root extraction is an exact
//! rational; the roots themselves are rounded in the direction that keeps
//! each bound valid.

pub mod bounds;
pub mod decompose;
pub mod error;
pub mod exactlp;
pub mod gridsum;
pub mod integrate;
pub mod polytope;
pub mod ratpoly;

pub use error::{Error, Result};
pub use ratpoly::{Monomial, Polynomial, Rational};
