use super::poly::LambdaPoly;
use super::scalar::Rational;
use crate::error::{Error, Result};

/// Unique polynomial of degree `< points.len()` through all `(λ_i, y_i)`,
/// computed exactly by Newton divided differences.
pub fn interpolate(points: &[(Rational, Rational)]) -> Result<LambdaPoly> {
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::DuplicateAbscissa(xi.to_string()));
        }
    }
    let xs: Vec<&Rational> = points.iter().map(|(x, _)| x).collect();
    let mut dd: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..dd.len() {
        for i in (level..dd.len()).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // Horner on the Newton form.
    let mut poly = LambdaPoly::zero();
    for i in (0..dd.len()).rev() {
        poly = &(&poly * &LambdaPoly::shifted_lambda(-xs[i].clone()))
            + &LambdaPoly::constant(dd[i].clone());
    }
    Ok(poly)
}

/// Polynomial with floating-point coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly(pub Vec<f64>);

impl FloatPoly {
    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `k`-th derivative at zero, `k! · c_k`.
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product::<f64>() * self.coeff(k)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Floating-point counterpart of [`interpolate`] for exact abscissae and
/// numerically evaluated ordinates.
pub fn interpolate_f64(points: &[(Rational, f64)]) -> Result<FloatPoly> {
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::DuplicateAbscissa(xi.to_string()));
        }
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| super::scalar::to_f64(x)).collect();
    let mut dd: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    for level in 1..dd.len() {
        for i in (level..dd.len()).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut coeffs = vec![0.0; dd.len()];
    for i in (0..dd.len()).rev() {
        // coeffs <- coeffs * (λ - x_i) + dd[i]
        let mut next = vec![0.0; dd.len()];
        for (k, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if k + 1 < next.len() {
                next[k + 1] += c;
            }
            next[k] -= c * xs[i];
        }
        next[0] += dd[i];
        coeffs = next;
    }
    Ok(FloatPoly(coeffs))
}
