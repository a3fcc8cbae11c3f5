use super::scalar::Ring;
use crate::error::{Error, Result};

/// Power series `Σ_{i ≤ order} c_i s^i` truncated after degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalSeries<C> {
    order: usize,
    coeffs: Vec<C>,
}

impl<C: Ring> FormalSeries<C> {
    /// Missing coefficients are zero; extra ones are dropped.
    pub fn new(order: usize, mut coeffs: Vec<C>) -> Self {
        coeffs.resize(order + 1, C::zero());
        FormalSeries { order, coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> C) -> Self {
        FormalSeries { order, coeffs: (0..=order).map(f).collect() }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        Self::new(order, vec![C::one()])
    }

    /// The series `s`.
    pub fn variable(order: usize) -> Self {
        Self::new(order, vec![C::zero(), C::one()])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(order.min(self.order), self.coeffs.clone())
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order.min(other.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let o = self.common_order(other);
        Self::from_fn(o, |i| self.coeffs[i].add(&other.coeffs[i]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let o = self.common_order(other);
        Self::from_fn(o, |i| self.coeffs[i].sub(&other.coeffs[i]))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_fn(self.order, |i| self.coeffs[i].mul(c))
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let o = self.common_order(other);
        let mut out = vec![C::zero(); o + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(o + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(o + 1 - i) {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        FormalSeries { order: o, coeffs: out }
    }

    /// Substitute `s ↦ s^k`.
    pub fn compose_with_monomial(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ValuationRequired);
        }
        let mut out = vec![C::zero(); self.order + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            match i.checked_mul(k) {
                Some(j) if j <= self.order => out[j] = c.clone(),
                _ => break,
            }
        }
        Ok(FormalSeries { order: self.order, coeffs: out })
    }

    /// `self(inner(s))`. The inner series must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::ValuationRequired);
        }
        let o = self.common_order(inner);
        let inner = inner.truncate(o);
        // Σ c_k inner^k with the powers built once; when `inner` has constant
        // coefficients this touches each coefficient of `self` only O(o) times.
        let mut out = vec![C::zero(); o + 1];
        out[0] = self.coeffs[0].clone();
        let mut power = inner.clone();
        for (k, c) in self.coeffs.iter().enumerate().take(o + 1).skip(1) {
            if !c.is_zero() {
                for (slot, p) in out.iter_mut().zip(&power.coeffs).skip(k) {
                    if !p.is_zero() {
                        *slot = slot.add(&c.mul(p));
                    }
                }
            }
            if k < o {
                power = power.mul(&inner);
            }
        }
        Ok(FormalSeries { order: o, coeffs: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, Rational};

    fn s(order: usize, c: &[i64]) -> FormalSeries<Rational> {
        FormalSeries::new(order, c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn product_truncates() {
        let p = s(4, &[1, 1]).mul(&s(4, &[1, -1]));
        assert_eq!(p, s(4, &[1, 0, -1]));
        let mixed = s(2, &[1, 1]).mul(&s(5, &[1, 1]));
        assert_eq!(mixed.order(), 2);
    }

    #[test]
    fn geometric_composed_with_square() {
        let geo = FormalSeries::from_fn(5, |_| int(1));
        let sq = s(5, &[0, 0, 1]);
        assert_eq!(geo.compose(&sq).unwrap(), s(5, &[1, 0, 1, 0, 1]));
        assert_eq!(geo.compose_with_monomial(2).unwrap(), s(5, &[1, 0, 1, 0, 1]));
        assert_eq!(geo.compose(&s(5, &[1, 1])), Err(Error::ValuationRequired));
    }

    #[test]
    fn exp_of_log_like_composition() {
        // 1/(1-u) with u = s/(1+s) = s - s² + ... gives 1 + s.
        let geo = FormalSeries::from_fn(6, |_| int(1));
        let u = FormalSeries::from_fn(6, |i| {
            if i == 0 { int(0) } else if i % 2 == 1 { int(1) } else { int(-1) }
        });
        assert_eq!(geo.compose(&u).unwrap(), s(6, &[1, 1]));
        assert_eq!(s(3, &[2, 3]).scale(&rat(1, 2)), FormalSeries::new(3, vec![int(1), rat(3, 2)]));
    }
}
