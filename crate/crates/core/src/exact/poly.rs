use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::scalar::{int, to_f64, Rational};
use crate::error::{Error, Result};

/// Univariate polynomial in λ with exact rational coefficients, stored in
/// ascending degree. Trailing zeros are always trimmed, so the zero
/// polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<Rational>,
}

impl LambdaPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        LambdaPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        LambdaPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `λ`.
    pub fn lambda() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `a·λ + b`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![b, a])
    }

    /// `λ + c`.
    pub fn shifted_lambda(c: Rational) -> Self {
        Self::linear(Rational::one(), c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        self.scale(&(Rational::one() / lead))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// `p(λ + c)`, via Horner's scheme in the shifted variable.
    pub fn shift(&self, c: &Rational) -> Self {
        let x = Self::shifted_lambda(c.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, a| &(&acc * &x) + &Self::constant(a.clone()))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Euclidean division: `(q, r)` with `self = q·d + r`, `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = Rational::one() / d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b non-zero");
            a = b;
            // Monic remainders keep the rational coefficients small.
            b = if r.is_zero() { r } else { r.monic() };
        }
        a.monic()
    }

    /// Whether `self` divides `other` exactly.
    pub fn divides(&self, other: &Self) -> bool {
        match other.div_rem(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => other.is_zero(),
        }
    }

    /// Product of the linear factors `λ - r` over `roots`.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::shifted_lambda(-r.clone())
        })
    }

    /// Rational roots of the polynomial, by the rational root theorem on the
    /// primitive integer form. Multiplicities are collapsed.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut p = self.clone();
        if p.is_zero() {
            return out;
        }
        while p.coeff(0).is_zero() && !p.is_zero() {
            if out.is_empty() {
                out.push(Rational::zero());
            }
            p = Self::new(p.coeffs[1..].to_vec());
        }
        if p.is_constant() {
            return out;
        }
        let lcm = p
            .coeffs
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, c| {
                num_integer::Integer::lcm(&acc, c.denom())
            });
        let ints: Vec<num_bigint::BigInt> =
            p.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let divisors = |n: &num_bigint::BigInt| -> Vec<num_bigint::BigInt> {
            let mut ds = Vec::new();
            let mut i = num_bigint::BigInt::one();
            while &i * &i <= *n {
                if (n % &i).is_zero() {
                    ds.push(i.clone());
                    ds.push(n / &i);
                }
                i += 1;
            }
            ds
        };
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sign in [1, -1] {
                    let cand = Rational::new(num.clone() * sign, den.clone());
                    if p.eval(&cand).is_zero() && !out.contains(&cand) {
                        out.push(cand);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LambdaPoly({self})")
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                if abs.is_integer() {
                    write!(f, "{abs}")?;
                } else {
                    write!(f, "({abs})")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "{}λ", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}λ^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        LambdaPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        LambdaPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || rhs.is_zero() {
            return LambdaPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPoly::new(out)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { (&self).$m(&rhs) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t { (&self).$m(rhs) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(LambdaPoly, Add add, Sub sub, Mul mul);

impl Neg for LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        -&self
    }
}

impl super::scalar::Ring for LambdaPoly {
    fn zero() -> Self {
        LambdaPoly::zero()
    }
    fn one() -> Self {
        LambdaPoly::one()
    }
    fn is_zero(&self) -> bool {
        LambdaPoly::is_zero(self)
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
        LambdaPoly::constant(r.clone())
    }
    fn as_rational(&self) -> Option<Rational> {
        self.is_constant().then(|| self.coeff(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{pochhammer, rat};

    #[test]
    fn pochhammer_of_lambda() {
        let p = pochhammer(&LambdaPoly::lambda(), 2);
        assert_eq!(p, LambdaPoly::from_ints(&[0, 1, 1]));
        assert_eq!(pochhammer(&LambdaPoly::lambda(), 0), LambdaPoly::one());
    }

    #[test]
    fn division_and_gcd() {
        // (λ-1)(λ+2) and (λ-1)(λ-3)
        let a = LambdaPoly::from_roots(&[int(1), int(-2)]);
        let b = LambdaPoly::from_roots(&[int(1), int(3)]);
        assert_eq!(a.gcd(&b), LambdaPoly::from_roots(&[int(1)]));
        let (q, r) = (&a * &b).div_rem(&a).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, b);
        assert!(LambdaPoly::zero().div_rem(&LambdaPoly::one()).unwrap().0.is_zero());
        assert_eq!(a.div_rem(&LambdaPoly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn shift_and_derivative() {
        let p = LambdaPoly::from_ints(&[1, 0, 1]); // λ² + 1
        assert_eq!(p.shift(&int(1)), LambdaPoly::from_ints(&[2, 2, 1]));
        assert_eq!(p.derivative(), LambdaPoly::from_ints(&[0, 2]));
        assert_eq!(p.shift(&rat(1, 2)).eval(&int(3)), p.eval(&rat(7, 2)));
    }

    #[test]
    fn roots() {
        let p = LambdaPoly::from_roots(&[int(0), rat(3, 2), int(-4), int(-4)]);
        assert_eq!(p.rational_roots(), vec![int(-4), int(0), rat(3, 2)]);
        assert!(LambdaPoly::from_ints(&[1, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn display() {
        let p = LambdaPoly::new(vec![int(-1), rat(1, 2), int(0), int(-3)]);
        assert_eq!(p.to_string(), "-3*λ^3 + (1/2)*λ - 1");
        assert_eq!(LambdaPoly::lambda().to_string(), "λ");
        assert_eq!(LambdaPoly::zero().to_string(), "0");
    }
}
