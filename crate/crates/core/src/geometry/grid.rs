use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Accuracy order of the centered finite-difference stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum StencilOrder {
    Fourth,
    Sixth,
    Eighth,
    Tenth,
    Twelfth,
}

impl StencilOrder {
    pub const ALL: [StencilOrder; 5] =
        [StencilOrder::Fourth, StencilOrder::Sixth, StencilOrder::Eighth, StencilOrder::Tenth, StencilOrder::Twelfth];

    pub fn order(self) -> usize {
        match self {
            StencilOrder::Fourth => 4,
            StencilOrder::Sixth => 6,
            StencilOrder::Eighth => 8,
            StencilOrder::Tenth => 10,
            StencilOrder::Twelfth => 12,
        }
    }

    /// `(m!)² / ((m-k)! (m+k)!)` for `k = 1..=m`, `m` the half-width.
    fn base(self) -> Vec<f64> {
        let m = self.order() / 2;
        let mut out = Vec::with_capacity(m);
        // Ratio form avoids large factorials: b_k = b_{k-1}·(m-k+1)/(m+k).
        let mut b = 1.0;
        for k in 1..=m {
            b *= (m - k + 1) as f64 / (m + k) as f64;
            out.push(b);
        }
        out
    }

    /// Weights `c_k` of `f(x+kh) - f(x-kh)`, `k = 1..=m`, for `h·f'(x)`.
    fn first(self) -> Vec<f64> {
        let sign = |k: usize| if k % 2 == 1 { 1.0 } else { -1.0 };
        self.base().iter().enumerate().map(|(i, b)| sign(i + 1) * b / (i + 1) as f64).collect()
    }

    /// Center weight and weights of `f(x+kh) + f(x-kh)` for `h²·f''(x)`.
    fn second(self) -> (f64, Vec<f64>) {
        let sign = |k: usize| if k % 2 == 1 { 2.0 } else { -2.0 };
        let w: Vec<f64> =
            self.base().iter().enumerate().map(|(i, b)| sign(i + 1) * b / ((i + 1) * (i + 1)) as f64).collect();
        (-2.0 * w.iter().sum::<f64>(), w)
    }
}

impl Default for StencilOrder {
    fn default() -> Self {
        StencilOrder::Twelfth
    }
}

impl TryFrom<usize> for StencilOrder {
    type Error = Error;
    fn try_from(k: usize) -> Result<Self> {
        StencilOrder::ALL
            .into_iter()
            .find(|o| o.order() == k)
            .ok_or_else(|| Error::InvalidParameter(format!("stencil order {k} not in {{4, 6, 8, 10, 12}}")))
    }
}

impl From<StencilOrder> for usize {
    fn from(o: StencilOrder) -> usize {
        o.order()
    }
}

/// Real scalar field on an `n1 × n2` periodic grid, row-major with the
/// first coordinate indexing rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    n1: usize,
    n2: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self::constant(n1, n2, 0.0)
    }

    pub fn constant(n1: usize, n2: usize, c: f64) -> Self {
        Field { n1, n2, data: vec![c; n1 * n2] }
    }

    pub fn from_vec(n1: usize, n2: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n1 * n2 {
            return Err(Error::Format(format!("{} values for a {n1}x{n2} grid", data.len())));
        }
        Ok(Field { n1, n2, data })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.data[i1 * self.n2 + i2]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Field {
        Field { n1: self.n1, n2: self.n2, data: self.data.par_iter().map(|&x| f(x)).collect() }
    }

    pub fn zip(&self, other: &Field, f: impl Fn(f64, f64) -> f64 + Sync) -> Field {
        assert_eq!(self.shape(), other.shape(), "field shapes differ");
        let data = self.data.par_iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Field { n1: self.n1, n2: self.n2, data }
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|x| c * x)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max|self - other|`.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Every second point in both directions; the coarse grid of a
    /// refinement pair.
    pub fn restrict(&self) -> Field {
        let (m1, m2) = (self.n1 / 2, self.n2 / 2);
        let data = (0..m1 * m2).map(|k| self.get(2 * (k / m2), 2 * (k % m2))).collect();
        Field { n1: m1, n2: m2, data }
    }
}

macro_rules! pointwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                self.zip(rhs, |a, b| a $op b)
            }
        }
        impl $tr for Field {
            type Output = Field;
            fn $method(self, rhs: Field) -> Field {
                (&self).$method(&rhs)
            }
        }
    };
}

pointwise!(Add, add, +);
pointwise!(Sub, sub, -);
pointwise!(Mul, mul, *);

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

/// Uniform periodic grid on `[0, 2π)²` standing for the two active
/// coordinates of an `n`-dimensional flat torus; fields never depend on the
/// other `n - 2` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusChart {
    n: usize,
    n1: usize,
    n2: usize,
    order: StencilOrder,
}

impl TorusChart {
    pub fn new(n: usize, n1: usize, n2: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} < 3")));
        }
        if n1 < 16 || n2 < 16 {
            return Err(Error::InvalidParameter(format!("grid {n1}x{n2} below 16x16")));
        }
        Ok(TorusChart { n, n1, n2, order: StencilOrder::default() })
    }

    pub fn square(n: usize, size: usize) -> Result<Self> {
        Self::new(n, size, size)
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn order(&self) -> StencilOrder {
        self.order
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * PI / [self.n1, self.n2][axis] as f64
    }

    /// Cell area `h₁h₂` of the quadrature rule.
    pub fn cell(&self) -> f64 {
        self.spacing(0) * self.spacing(1)
    }

    pub fn coords(&self, i1: usize, i2: usize) -> (f64, f64) {
        (i1 as f64 * self.spacing(0), i2 as f64 * self.spacing(1))
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Field {
        let data = (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (x1, x2) = self.coords(k / self.n2, k % self.n2);
                f(x1, x2)
            })
            .collect();
        Field { n1: self.n1, n2: self.n2, data }
    }

    pub fn zeros(&self) -> Field {
        Field::zeros(self.n1, self.n2)
    }

    pub fn constant(&self, c: f64) -> Field {
        Field::constant(self.n1, self.n2, c)
    }

    /// Same geometry with half the points in each direction.
    pub fn coarsened(&self) -> Result<Self> {
        Ok(Self::new(self.n, self.n1 / 2, self.n2 / 2)?.with_order(self.order))
    }

    pub fn check(&self, f: &Field) -> Result<()> {
        if f.shape() != self.shape() {
            return Err(Error::ChartMismatch(format!(
                "field {:?} on chart {:?}",
                f.shape(),
                self.shape()
            )));
        }
        Ok(())
    }

    fn stencil(&self, f: &Field, axis: usize, center: f64, weights: &[f64], odd: bool, scale: f64) -> Field {
        let (n1, n2) = self.shape();
        let mut out = vec![0.0; n1 * n2];
        out.par_chunks_mut(n2).enumerate().for_each(|(i1, row)| {
            for (i2, slot) in row.iter_mut().enumerate() {
                let mut acc = center * f.get(i1, i2);
                for (k, w) in weights.iter().enumerate() {
                    let k = k + 1;
                    let (plus, minus) = if axis == 0 {
                        (f.get((i1 + k) % n1, i2), f.get((i1 + n1 - k) % n1, i2))
                    } else {
                        (f.get(i1, (i2 + k) % n2), f.get(i1, (i2 + n2 - k) % n2))
                    };
                    acc += w * if odd { plus - minus } else { plus + minus };
                }
                *slot = acc * scale;
            }
        });
        Field { n1, n2, data: out }
    }

    /// Centered first derivative along `axis`; an antisymmetric matrix.
    pub fn d(&self, axis: usize, f: &Field) -> Field {
        let h = self.spacing(axis);
        self.stencil(f, axis, 0.0, &self.order.first(), true, 1.0 / h)
    }

    /// Centered second derivative along `axis`.
    pub fn d2(&self, axis: usize, f: &Field) -> Field {
        let h = self.spacing(axis);
        let (c, w) = self.order.second();
        self.stencil(f, axis, c, &w, false, 1.0 / (h * h))
    }

    /// Mixed derivative `∂₁∂₂` as a product of first-derivative stencils.
    pub fn d12(&self, f: &Field) -> Field {
        self.d(0, &self.d(1, f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_accuracy_and_convergence() {
        for order in [StencilOrder::Fourth, StencilOrder::Sixth, StencilOrder::Eighth] {
            let err = |size: usize| {
                let c = TorusChart::square(4, size).unwrap().with_order(order);
                let f = c.sample(|x, y| (2.0 * x).sin() * y.cos());
                let d = c.d(0, &f).max_diff(&c.sample(|x, y| 2.0 * (2.0 * x).cos() * y.cos()));
                let dd = c.d2(1, &f).max_diff(&c.sample(|x, y| -(2.0 * x).sin() * y.cos()));
                d.max(dd)
            };
            let ratio = err(32) / err(64);
            let want = 2f64.powi(order.order() as i32) * 0.8;
            assert!(ratio > want, "order {order:?}: ratio {ratio}");
        }
    }

    #[test]
    fn closed_form_weights_match_tables() {
        let e = StencilOrder::Eighth;
        let want1 = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let want2 = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
        for (a, b) in e.first().iter().zip(want1) {
            assert!((a - b).abs() < 1e-15);
        }
        let (c, w) = e.second();
        assert!((c + 205.0 / 72.0).abs() < 1e-14);
        for (a, b) in w.iter().zip(want2) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(StencilOrder::Fourth.first(), vec![2.0 / 3.0, -1.0 / 12.0]);
    }

    #[test]
    fn twelfth_order_resolves_a_single_mode_to_roundoff() {
        // A width-m stencil differentiates sin(x) with error O(h^{2m}).
        let c = TorusChart::square(4, 64).unwrap().with_order(StencilOrder::Twelfth);
        let f = c.sample(|x, _| x.sin());
        assert!(c.d(0, &f).max_diff(&c.sample(|x, _| x.cos())) < 1e-14);
        assert!(c.d2(0, &f).max_diff(&c.sample(|x, _| -x.sin())) < 1e-12);
    }

    #[test]
    fn first_derivative_is_antisymmetric() {
        let c = TorusChart::square(3, 16).unwrap();
        let f = c.sample(|x, y| (x + 2.0 * y).sin() + 0.3 * x.cos());
        let g = c.sample(|x, y| (3.0 * x).cos() * y.sin());
        let lhs: f64 = c.d(1, &f).values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
        let rhs: f64 = f.values().iter().zip(c.d(1, &g).values()).map(|(a, b)| a * b).sum();
        assert!((lhs + rhs).abs() < 1e-12);
    }

    #[test]
    fn restriction_and_shape_checks() {
        let c = TorusChart::square(4, 32).unwrap();
        let f = c.sample(|x, y| x + 10.0 * y);
        let coarse = c.coarsened().unwrap();
        assert_eq!(f.restrict(), coarse.sample(|x, y| x + 10.0 * y));
        assert!(c.check(&coarse.zeros()).is_err());
        assert!(TorusChart::square(2, 32).is_err());
        assert!(StencilOrder::try_from(5).is_err());
    }
}
