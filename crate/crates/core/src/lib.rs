//! Exact symbolic machinery for finite-dimensional Lie algebras of vector
//! fields on C^2, their lifts to C^2 x C, and first Lie-algebra cohomology.
//!
//! Everything is computed over exponential polynomials: finite sums of
//! Gaussian-rational multiples of monomials in x, y, the fiber variable u and
//! formal parameter symbols, times exponentials e^(omega*x + sigma*y) with
//! Gaussian-rational frequencies. No floating point anywhere; all linear and
//! polynomial algebra is exact.

pub mod catalog;
pub mod cohomology;
pub mod error;
pub mod expoly;
pub mod groebner;
pub mod liealg;
pub mod liftsolver;
mod linalg;
mod parse;
pub mod rat;
mod roots;
pub mod vfield;

/// Crate version, re-exported so front ends can report it.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use expoly::{ExpPoly, Freq, Term, Var};
pub use parse::{parse_expoly, parse_vector_field};
pub use rat::GaussianRational;
pub use vfield::{FiberMap, Space, VectorField};
