//! Exact arithmetic: rationals, polynomials and rational functions in λ,
//! truncated formal power series.

mod interp;
mod poly;
mod ratfunc;
mod scalar;
mod series;

pub use interp::{interpolate, interpolate_f64, FloatPoly};
pub use poly::LambdaPoly;
pub use ratfunc::LambdaRat;
pub use scalar::{binomial, factorial, falling_factorial, int, pochhammer, rat, Field, Rational, Ring};
pub(crate) use scalar::{non_positive_integer, to_f64};
pub use series::FormalSeries;
