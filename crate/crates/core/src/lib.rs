//! Exact and numerical verification of the holographic Q-curvature identities.
//!
//! The crate is organised bottom-up:
//!
//! - [`exact`]: arbitrary-precision rationals, polynomials and rational
//!   functions in the spectral parameter λ, truncated power series.
//! - [`hypergeom`]: terminating hypergeometric sums and the classical
//!   summation/transformation formulas, checked exactly.
//! - [`sphere`]: closed forms on the round sphere plus a radial ODE oracle.
//! - [`geometry`]: conformally flat test metrics on a periodic grid, their
//!   curvature, differential primitives, quadrature and discrete adjoints.
//! - [`operators`]: the λ-families `T2`, `T4`, their polynomial
//!   normalisations and the GJMS operators.
//! - [`holographic`]: holographic coefficients, Q-curvatures and the
//!   master-relation checks.
//! - [`suites`]: batch runners producing [`report::CheckReport`]s.

pub mod error;
pub mod exact;
pub mod geometry;
pub mod holographic;
pub mod hypergeom;
pub mod operators;
pub mod report;
pub mod sphere;
pub mod suites;

pub use error::{Error, Result};
pub use exact::{LambdaPoly, LambdaRat, Rational};
pub use report::{CheckReport, QuantitiesReport};
