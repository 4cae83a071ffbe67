//! Numerical laboratory for multipliers of weak product spaces of diagonal
//! complete Nevanlinna-Pick kernels.
//!
//! Everything operates on graded polynomial truncations, where multiplication
//! and Hankel operators become finite complex matrices with exactly computable
//! entries. The crate provides:
//!
//! * [`space`] — diagonal kernel spaces (Hardy, Drury-Arveson, Dirichlet,
//!   custom), multi-index and polynomial arithmetic, monomial norms, and the
//!   coefficient positivity test for the complete Nevanlinna-Pick property.
//! * [`operators`] — matrix representations of multiplication operators,
//!   column/row tuples and Hankel operators, with a deterministic power
//!   iteration for dominant singular values.
//! * [`norms`] — the binomial multiplier family on the two-variable
//!   Drury-Arveson space, column/row norm gaps and the transpose-gap
//!   experiment for matrices of multipliers.
//! * [`weak_product`] — norm brackets for the weak product: certified lower
//!   bounds via Hankel duality, upper bounds via alternating bilinear
//!   factorization, factorization certificates, and the Hardy-space `H^1`
//!   quadrature oracle.
//! * [`harness`] — a batch experiment runner behind the CLI, emitting
//!   deterministic CSV/JSON reports.

pub mod error;
pub mod harness;
pub mod io;
pub mod norms;
pub mod operators;
pub mod parse;
pub mod space;
pub mod weak_product;

pub use error::{Error, Result};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;
