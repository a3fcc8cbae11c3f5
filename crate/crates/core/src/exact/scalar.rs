use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn factorial(k: u64) -> Rational {
    (1..=k).fold(<Rational as One>::one(), |acc, i| acc * int(i as i64))
}

/// Binomial coefficient `C(n, k)` for integer `n` (negative `n` allowed,
/// via the falling-factorial definition). Zero for `k < 0`.
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 {
        return <Rational as Zero>::zero();
    }
    let mut acc = <Rational as One>::one();
    for i in 0..k {
        acc = acc * int(n - i) / int(i + 1);
    }
    acc
}

/// Commutative ring with unit; the coefficient domain for polynomials,
/// Pochhammer products and power series.
pub trait Ring: Clone + PartialEq + Debug + Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// The value as a rational constant, if it is one.
    fn as_rational(&self) -> Option<Rational>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }
}

/// A ring in which every non-zero element is invertible.
pub trait Field: Ring {
    /// `None` when `other` is zero.
    fn checked_div(&self, other: &Self) -> Option<Self>;
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Field for Rational {
    fn checked_div(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }
}

/// Rising factorial `x (x+1) ⋯ (x+k-1)`; `1` for `k = 0`.
pub fn pochhammer<R: Ring>(x: &R, k: usize) -> R {
    let mut acc = R::one();
    for i in 0..k {
        acc = acc.mul(&x.add(&R::from_int(i as i64)));
    }
    acc
}

/// Falling factorial `x(x-1)⋯(x-k+1)`; 1 for `k = 0`.
pub fn falling_factorial<R: Ring>(x: &R, k: usize) -> R {
    let mut acc = R::one();
    for i in 0..k {
        acc = acc.mul(&x.sub(&R::from_int(i as i64)));
    }
    acc
}

/// `Some(m)` when `r` is the integer `-m` with `m >= 0`.
pub(crate) fn non_positive_integer(r: &Rational) -> Option<usize> {
    if r.is_integer() && !r.is_positive() {
        (-r.to_integer()).to_usize()
    } else {
        None
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles huge numerators/denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&int(3), 3), int(60));
        assert_eq!(pochhammer(&rat(7, 3), 0), int(1));
        assert_eq!(pochhammer(&int(-2), 3), int(0));
        assert_eq!(pochhammer(&rat(1, 2), 2), rat(3, 4));
        assert_eq!(falling_factorial(&int(3), 2), int(6));
        assert_eq!(falling_factorial(&int(2), 3), int(0));
        assert_eq!(falling_factorial(&rat(5, 2), 2), pochhammer(&rat(3, 2), 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), int(15));
        assert_eq!(binomial(4, 5), int(0));
        assert_eq!(binomial(-3, 2), int(6));
        assert_eq!(binomial(5, -1), int(0));
        assert_eq!(factorial(5), int(120));
    }

    #[test]
    fn non_positive_integers() {
        assert_eq!(non_positive_integer(&int(-4)), Some(4));
        assert_eq!(non_positive_integer(&int(0)), Some(0));
        assert_eq!(non_positive_integer(&int(2)), None);
        assert_eq!(non_positive_integer(&rat(-1, 2)), None);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = factorial(200) / (factorial(200) * int(3));
        assert!((to_f64(&big) - 1.0 / 3.0).abs() < 1e-15);
    }
}
