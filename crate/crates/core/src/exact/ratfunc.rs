use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{forward_owned, LambdaPoly};
use super::scalar::{to_f64, Rational};
use crate::error::{Error, Result};

/// Rational function `num / den` in λ.
///
/// Always kept in normal form: `gcd(num, den) = 1` and `den` monic. Two
/// rational functions are therefore equal iff their fields are equal, which
/// makes `r == 0` decidable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LambdaRat {
    num: LambdaPoly,
    den: LambdaPoly,
}

impl LambdaRat {
    pub fn new(num: LambdaPoly, den: LambdaPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: LambdaPoly, den: LambdaPoly) -> Self {
        if num.is_zero() {
            return LambdaRat { num, den: LambdaPoly::one() };
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g).expect("gcd non-zero");
        let (den, _) = den.div_rem(&g).expect("gcd non-zero");
        let lead = Rational::one() / den.leading();
        LambdaRat { num: num.scale(&lead), den: den.scale(&lead) }
    }

    /// Re-normalise; idempotent on values built through the public API.
    pub fn reduced(&self) -> Self {
        Self::reduce(self.num.clone(), self.den.clone())
    }

    pub fn zero() -> Self {
        LambdaRat { num: LambdaPoly::zero(), den: LambdaPoly::one() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        LambdaRat { num: LambdaPoly::constant(c), den: LambdaPoly::one() }
    }

    pub fn lambda() -> Self {
        LambdaPoly::lambda().into()
    }

    pub fn numer(&self) -> &LambdaPoly {
        &self.num
    }

    pub fn denom(&self) -> &LambdaPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial this function equals, if its denominator is constant.
    pub fn as_poly(&self) -> Option<LambdaPoly> {
        self.den.is_constant().then(|| self.num.scale(&(Rational::one() / self.den.leading())))
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.as_poly().filter(LambdaPoly::is_constant).map(|p| p.coeff(0))
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Pole(x.to_string()));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::reduce(n, &self.den * &self.den)
    }

    /// `r(λ + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        Self::reduce(self.num.shift(c), self.den.shift(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::reduce(self.num.scale(c), self.den.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Rational poles (roots of the reduced denominator).
    pub fn poles(&self) -> Vec<Rational> {
        self.den.rational_roots()
    }

    /// Whether every pole lies in `allowed`, i.e. the denominator divides
    /// `Π (λ - p)` taken with enough multiplicity.
    pub fn poles_within(&self, allowed: &[Rational]) -> bool {
        let mut d = self.den.clone();
        loop {
            let mut progressed = false;
            for p in allowed {
                let lin = LambdaPoly::shifted_lambda(-p.clone());
                if let Ok((q, r)) = d.div_rem(&lin) {
                    if r.is_zero() {
                        d = q;
                        progressed = true;
                    }
                }
            }
            if d.is_constant() {
                return true;
            }
            if !progressed {
                return false;
            }
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        LambdaRat { num: self.num.pow(k), den: self.den.pow(k) }
    }

    pub fn to_f64_constant(&self) -> Option<f64> {
        self.as_constant().map(|c| to_f64(&c))
    }
}

impl From<LambdaPoly> for LambdaRat {
    fn from(p: LambdaPoly) -> Self {
        LambdaRat { num: p, den: LambdaPoly::one() }
    }
}

impl From<Rational> for LambdaRat {
    fn from(c: Rational) -> Self {
        LambdaRat::constant(c)
    }
}

impl fmt::Debug for LambdaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LambdaRat({self})")
    }
}

impl fmt::Display for LambdaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl LambdaPoly {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.leading().is_one()
    }
}

impl Add for &LambdaRat {
    type Output = LambdaRat;
    fn add(self, rhs: &LambdaRat) -> LambdaRat {
        if self.den == rhs.den {
            return LambdaRat::reduce(&self.num + &rhs.num, self.den.clone());
        }
        // Work over lcm(den) rather than the full product.
        let g = self.den.gcd(&rhs.den);
        let (l, _) = self.den.div_rem(&g).expect("gcd non-zero");
        let (r, _) = rhs.den.div_rem(&g).expect("gcd non-zero");
        LambdaRat::reduce(&(&self.num * &r) + &(&rhs.num * &l), &self.den * &r)
    }
}

impl Sub for &LambdaRat {
    type Output = LambdaRat;
    fn sub(self, rhs: &LambdaRat) -> LambdaRat {
        self + &(-rhs)
    }
}

impl Mul for &LambdaRat {
    type Output = LambdaRat;
    fn mul(self, rhs: &LambdaRat) -> LambdaRat {
        LambdaRat::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &LambdaRat {
    type Output = LambdaRat;
    /// Panics on division by the zero function; use [`Field::checked_div`]
    /// for a fallible version.
    fn div(self, rhs: &LambdaRat) -> LambdaRat {
        assert!(!rhs.is_zero(), "division by zero rational function");
        LambdaRat::reduce(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &LambdaRat {
    type Output = LambdaRat;
    fn neg(self) -> LambdaRat {
        LambdaRat { num: -&self.num, den: self.den.clone() }
    }
}

forward_owned!(LambdaRat, Add add, Sub sub, Mul mul, Div div);

impl Neg for LambdaRat {
    type Output = LambdaRat;
    fn neg(self) -> LambdaRat {
        -&self
    }
}

impl super::scalar::Ring for LambdaRat {
    fn zero() -> Self {
        LambdaRat::zero()
    }
    fn one() -> Self {
        LambdaRat::one()
    }
    fn is_zero(&self) -> bool {
        LambdaRat::is_zero(self)
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
        LambdaRat::constant(r.clone())
    }
    fn as_rational(&self) -> Option<Rational> {
        self.as_constant()
    }
}

impl super::scalar::Field for LambdaRat {
    fn checked_div(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
}
