use std::sync::Arc;

use super::grid::{Field, TorusChart};

/// Matrix-free linear operator on grid fields, kept as an expression tree so
/// that its exact discrete transpose can be formed structurally.
#[derive(Clone, Debug)]
pub enum LinearOp {
    Identity,
    /// Pointwise multiplication; a diagonal matrix.
    Mul(Arc<Field>),
    /// Centered first difference along an axis; antisymmetric.
    Deriv(usize),
    Scale(f64, Box<LinearOp>),
    /// Applied right to left: `Compose([A, B]) f = A(B f)`.
    Compose(Vec<LinearOp>),
    Sum(Vec<LinearOp>),
}

impl LinearOp {
    pub fn mul(f: Field) -> Self {
        LinearOp::Mul(Arc::new(f))
    }

    pub fn scaled(self, c: f64) -> Self {
        LinearOp::Scale(c, Box::new(self))
    }

    /// `self ∘ inner`.
    pub fn after(self, inner: LinearOp) -> Self {
        LinearOp::Compose(vec![self, inner])
    }

    pub fn apply(&self, chart: &TorusChart, f: &Field) -> Field {
        match self {
            LinearOp::Identity => f.clone(),
            LinearOp::Mul(m) => m.as_ref() * f,
            LinearOp::Deriv(axis) => chart.d(*axis, f),
            LinearOp::Scale(c, op) => op.apply(chart, f).scale(*c),
            LinearOp::Compose(ops) => {
                ops.iter().rev().fold(f.clone(), |acc, op| op.apply(chart, &acc))
            }
            LinearOp::Sum(ops) => ops
                .iter()
                .map(|op| op.apply(chart, f))
                .reduce(|a, b| &a + &b)
                .unwrap_or_else(|| chart.zeros()),
        }
    }

    /// Transpose with respect to the plain Euclidean product of grid values.
    pub fn transpose(&self) -> LinearOp {
        match self {
            LinearOp::Identity | LinearOp::Mul(_) => self.clone(),
            LinearOp::Deriv(_) => self.clone().scaled(-1.0),
            LinearOp::Scale(c, op) => op.transpose().scaled(*c),
            LinearOp::Compose(ops) => LinearOp::Compose(ops.iter().rev().map(|o| o.transpose()).collect()),
            LinearOp::Sum(ops) => LinearOp::Sum(ops.iter().map(|o| o.transpose()).collect()),
        }
    }

    /// Adjoint for `⟨f, g⟩ = Σ w f g`: `W⁻¹ Aᵀ W`.
    pub fn weighted_adjoint(&self, weight: &Arc<Field>, inv_weight: &Arc<Field>) -> LinearOp {
        LinearOp::Compose(vec![
            LinearOp::Mul(inv_weight.clone()),
            self.transpose(),
            LinearOp::Mul(weight.clone()),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &Field, b: &Field) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn transpose_matches_inner_products() {
        let c = TorusChart::square(4, 16).unwrap();
        let m = c.sample(|x, y| 1.0 + 0.3 * (x - y).sin());
        let op = LinearOp::Sum(vec![
            LinearOp::Deriv(0).after(LinearOp::mul(m.clone())).after(LinearOp::Deriv(1)),
            LinearOp::mul(m).scaled(2.5),
            LinearOp::Identity,
        ]);
        let f = c.sample(|x, y| (x + y).cos() + 0.2 * (3.0 * y).sin());
        let g = c.sample(|x, y| x.sin() * (2.0 * y).cos());
        let lhs = dot(&op.apply(&c, &f), &g);
        let rhs = dot(&f, &op.transpose().apply(&c, &g));
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn composition_order() {
        let c = TorusChart::square(4, 16).unwrap();
        let x = c.sample(|x, _| x);
        let f = c.sample(|_, y| y.sin());
        // D₂ then multiply by x.
        let op = LinearOp::mul(x.clone()).after(LinearOp::Deriv(1));
        assert_eq!(op.apply(&c, &f), &x * &c.d(1, &f));
        assert_eq!(LinearOp::Sum(vec![]).apply(&c, &f), c.zeros());
    }
}
