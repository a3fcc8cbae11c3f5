use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Field, TorusChart};
use super::linop::LinearOp;
use crate::{Error, Result};

/// `g = e^{2φ}·(flat)` on a [`TorusChart`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetric {
    chart: TorusChart,
    phi: Field,
    custom: bool,
}

impl ConformalMetric {
    pub fn new(chart: TorusChart, phi: Field) -> Result<Self> {
        chart.check(&phi)?;
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("conformal factor is not finite".into()));
        }
        Ok(ConformalMetric { chart, phi, custom: false })
    }

    /// A user-supplied conformal factor; accepted, but flagged in reports.
    pub fn custom(chart: TorusChart, phi: Field) -> Result<Self> {
        let mut m = Self::new(chart, phi)?;
        m.custom = true;
        Ok(m)
    }

    pub fn flat(chart: TorusChart) -> Self {
        let phi = chart.zeros();
        ConformalMetric { chart, phi, custom: false }
    }

    pub fn chart(&self) -> &TorusChart {
        &self.chart
    }

    pub fn phi(&self) -> &Field {
        &self.phi
    }

    pub fn is_custom(&self) -> bool {
        self.custom
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    /// `e^{kφ}`.
    pub fn exp_phi(&self, k: f64) -> Field {
        self.phi.map(|p| (k * p).exp())
    }

    /// The metric `e^{2ω} g`.
    pub fn conformal_change(&self, omega: &Field) -> Result<Self> {
        self.chart.check(omega)?;
        Ok(ConformalMetric { chart: self.chart.clone(), phi: &self.phi + omega, custom: self.custom })
    }
}

/// Curvature data needed by the operator families.
///
/// `schouten` holds the covariant components `P₁₁, P₁₂, P₂₂` of the active
/// block; every inactive diagonal component equals `schouten_inactive`, and
/// mixed active/inactive components vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureBundle {
    pub j: Field,
    pub psq: Field,
    pub schouten: [Field; 3],
    pub schouten_inactive: Field,
}

impl CurvatureBundle {
    /// Constant curvature data on a flat chart, `P = (J/n)·δ`. Only
    /// meaningful for operators applied to constants; used to compare
    /// against the sphere closed forms.
    pub fn constant(chart: &TorusChart, j: f64, psq: f64) -> Self {
        let p = j / chart.n() as f64;
        CurvatureBundle {
            j: chart.constant(j),
            psq: chart.constant(psq),
            schouten: [chart.constant(p), chart.zeros(), chart.constant(p)],
            schouten_inactive: chart.constant(p),
        }
    }

    fn component(&self, i: usize, j: usize) -> &Field {
        match (i, j) {
            (0, 0) => &self.schouten[0],
            (1, 1) => &self.schouten[2],
            _ => &self.schouten[1],
        }
    }

    /// Largest relative max-norm gap in `J` and `|P|²`.
    pub fn relative_gap(&self, other: &CurvatureBundle) -> f64 {
        let rel = |a: &Field, b: &Field| a.max_diff(b) / b.max_abs().max(f64::MIN_POSITIVE);
        let gj = if other.j.max_abs() == 0.0 { self.j.max_abs() } else { rel(&self.j, &other.j) };
        let gp = if other.psq.max_abs() == 0.0 { self.psq.max_abs() } else { rel(&self.psq, &other.psq) };
        gj.max(gp)
    }
}

/// Schouten tensor of `e^{2φ}δ` from the conformal change of the flat
/// metric: `P = -∇²φ + dφ⊗dφ - ½|dφ|²δ` (Euclidean derivatives).
pub fn curvature(metric: &ConformalMetric) -> CurvatureBundle {
    let c = metric.chart();
    let phi = metric.phi();
    let n = c.n() as f64;
    let (d0, d1) = (c.d(0, phi), c.d(1, phi));
    let grad2 = &(&d0 * &d0) + &(&d1 * &d1);
    let half = grad2.scale(0.5);
    let p11 = &(&(&d0 * &d0) - &c.d2(0, phi)) - &half;
    let p22 = &(&(&d1 * &d1) - &c.d2(1, phi)) - &half;
    let p12 = &(&d0 * &d1) - &c.d12(phi);
    let pin = -&half;
    let e2 = metric.exp_phi(-2.0);
    let trace = &(&p11 + &p22) + &pin.scale(n - 2.0);
    let j = &e2 * &trace;
    let sq = &(&(&p11 * &p11) + &(&p22 * &p22)) + &(&(&p12 * &p12).scale(2.0) + &(&pin * &pin).scale(n - 2.0));
    let psq = &(&e2 * &e2) * &sq;
    CurvatureBundle { j, psq, schouten: [p11, p12, p22], schouten_inactive: pin }
}

/// Brute-force curvature: assemble `g_ab = e^{2φ}δ_ab` in all `n`
/// dimensions, difference the components to get Christoffel symbols, then
/// Ricci, scalar curvature and Schouten tensor with generic index
/// contractions.
pub fn oracle_curvature(metric: &ConformalMetric) -> CurvatureBundle {
    let c = metric.chart();
    let n = c.n();
    let len = c.len();
    let e2 = metric.exp_phi(2.0);
    let idx2 = |a: usize, b: usize| a * n + b;
    let idx3 = |a: usize, b: usize, e: usize| (a * n + b) * n + e;

    let g: Vec<Field> = (0..n * n)
        .map(|k| if k / n == k % n { e2.clone() } else { c.zeros() })
        .collect();
    // dg[axis][ab], only the two active axes carry derivatives.
    let dg: Vec<Vec<Field>> = (0..2).map(|ax| g.iter().map(|f| c.d(ax, f)).collect()).collect();
    let deriv = |ax: usize, k: usize, p: usize| -> f64 {
        if ax < 2 {
            dg[ax][k].values()[p]
        } else {
            0.0
        }
    };

    // Γ^a_bc = ½ g^{ad} (∂_b g_cd + ∂_c g_bd - ∂_d g_bc), point by point.
    let gamma_pts: Vec<(Vec<f64>, Vec<f64>)> = (0..len)
        .into_par_iter()
        .map(|p| {
            let gm: Vec<f64> = (0..n * n).map(|k| g[k].values()[p]).collect();
            let ginv = invert(&gm, n);
            let mut gamma = vec![0.0; n * n * n];
            for a in 0..n {
                for b in 0..n {
                    for e in 0..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            let t = deriv(b, idx2(e, d), p) + deriv(e, idx2(b, d), p)
                                - deriv(d, idx2(b, e), p);
                            s += ginv[idx2(a, d)] * t;
                        }
                        gamma[idx3(a, b, e)] = 0.5 * s;
                    }
                }
            }
            (gamma, ginv)
        })
        .collect();
    let (n1, n2) = c.shape();
    let gamma: Vec<Field> = (0..n * n * n)
        .map(|k| Field::from_vec(n1, n2, gamma_pts.iter().map(|(gm, _)| gm[k]).collect()).expect("shape"))
        .collect();
    let dgamma: Vec<Vec<Field>> = (0..2).map(|ax| gamma.iter().map(|f| c.d(ax, f)).collect()).collect();

    let results: Vec<(f64, f64, [f64; 3], f64)> = (0..len)
        .into_par_iter()
        .map(|p| {
            let gam = &gamma_pts[p].0;
            let ginv = &gamma_pts[p].1;
            let dgam = |ax: usize, k: usize| if ax < 2 { dgamma[ax][k].values()[p] } else { 0.0 };
            // R_bc = ∂_a Γ^a_bc - ∂_c Γ^a_ab + Γ^a_ad Γ^d_bc - Γ^a_cd Γ^d_ab
            let mut ric = vec![0.0; n * n];
            for b in 0..n {
                for e in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        s += dgam(a, idx3(a, b, e)) - dgam(e, idx3(a, a, b));
                        for d in 0..n {
                            s += gam[idx3(a, a, d)] * gam[idx3(d, b, e)] - gam[idx3(a, e, d)] * gam[idx3(d, a, b)];
                        }
                    }
                    ric[idx2(b, e)] = s;
                }
            }
            let scal: f64 = (0..n * n).map(|k| ginv[k] * ric[k]).sum();
            let j = scal / (2.0 * (n as f64 - 1.0));
            let p_cov: Vec<f64> = (0..n * n)
                .map(|k| (ric[k] - j * g[k].values()[p]) / (n as f64 - 2.0))
                .collect();
            let mut psq = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for e in 0..n {
                        for d in 0..n {
                            psq += ginv[idx2(a, b)] * ginv[idx2(e, d)] * p_cov[idx2(a, e)] * p_cov[idx2(b, d)];
                        }
                    }
                }
            }
            let inactive = if n > 2 { p_cov[idx2(n - 1, n - 1)] } else { 0.0 };
            (j, psq, [p_cov[idx2(0, 0)], p_cov[idx2(0, 1)], p_cov[idx2(1, 1)]], inactive)
        })
        .collect();
    let mk = |f: &dyn Fn(&(f64, f64, [f64; 3], f64)) -> f64| {
        Field::from_vec(n1, n2, results.iter().map(f).collect()).expect("shape")
    };
    CurvatureBundle {
        j: mk(&|r| r.0),
        psq: mk(&|r| r.1),
        schouten: [mk(&|r| r.2[0]), mk(&|r| r.2[1]), mk(&|r| r.2[2])],
        schouten_inactive: mk(&|r| r.3),
    }
}

/// Gauss–Jordan inverse of a small dense matrix.
fn invert(m: &[f64], n: usize) -> Vec<f64> {
    let mut a = m.to_vec();
    let mut inv: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .expect("non-empty");
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        a[r * n + k] -= f * a[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    inv
}

/// The geometric building blocks of the operator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Primitive {
    /// `Δ`, the non-positive Laplacian.
    Lap,
    MulJ,
    MulPsq,
    /// `f ↦ δ(P df)`, `δ` the formal adjoint of `d`.
    SchoutenDivGrad,
    /// `f ↦ (dJ, df)`.
    GradPairJ,
    /// `g ↦ -(dJ, dg) - g ΔJ`, the integrated-by-parts adjoint of `(dJ, d·)`.
    GradPairJAdjoint,
}

impl Primitive {
    pub fn symbol(self) -> &'static str {
        match self {
            Primitive::Lap => "Δ",
            Primitive::MulJ => "J",
            Primitive::MulPsq => "|P|²",
            Primitive::SchoutenDivGrad => "δ(Pd)",
            Primitive::GradPairJ => "(dJ,d)",
            Primitive::GradPairJAdjoint => "(dJ,d)*",
        }
    }

    /// Formal adjoint as a primitive.
    pub fn analytic_adjoint(self) -> Primitive {
        match self {
            Primitive::GradPairJ => Primitive::GradPairJAdjoint,
            Primitive::GradPairJAdjoint => Primitive::GradPairJ,
            p => p,
        }
    }
}

/// A metric together with its curvature and the discretized primitives.
#[derive(Clone, Debug)]
pub struct GridGeometry {
    metric: ConformalMetric,
    curvature: CurvatureBundle,
    weight: Arc<Field>,
    inv_weight: Arc<Field>,
    lap_j: Field,
    dj: [Field; 2],
    ops: [LinearOp; 6],
}

impl GridGeometry {
    pub fn new(metric: ConformalMetric) -> Self {
        let curvature = curvature(&metric);
        Self::with_curvature(metric, curvature)
    }

    /// Geometry whose primitives use the given curvature data.
    pub fn with_curvature(metric: ConformalMetric, curvature: CurvatureBundle) -> Self {
        let c = metric.chart().clone();
        let n = c.n() as f64;
        let weight = Arc::new(metric.exp_phi(n));
        let inv_weight = Arc::new(metric.exp_phi(-n));
        let inv_w = LinearOp::Mul(inv_weight.clone());

        let lap = inv_w.clone().after(LinearOp::Sum(
            (0..2)
                .map(|i| {
                    LinearOp::Compose(vec![
                        LinearOp::Deriv(i),
                        LinearOp::mul(metric.exp_phi(n - 2.0)),
                        LinearOp::Deriv(i),
                    ])
                })
                .collect(),
        ));
        let e4 = metric.exp_phi(n - 4.0);
        let mut sdg_terms = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                sdg_terms.push(LinearOp::Compose(vec![
                    LinearOp::Deriv(i),
                    LinearOp::mul(&e4 * curvature.component(i, j)),
                    LinearOp::Deriv(j),
                ]));
            }
        }
        let sdg = inv_w.after(LinearOp::Sum(sdg_terms)).scaled(-1.0);
        let dj = [c.d(0, &curvature.j), c.d(1, &curvature.j)];
        let em2 = metric.exp_phi(-2.0);
        let gpj = LinearOp::Sum(
            (0..2).map(|i| LinearOp::mul(&em2 * &dj[i]).after(LinearOp::Deriv(i))).collect(),
        );
        let lap_j = lap.apply(&c, &curvature.j);
        let gpj_adj = LinearOp::Sum(vec![gpj.clone().scaled(-1.0), LinearOp::mul(-&lap_j)]);
        let ops = [
            lap,
            LinearOp::mul(curvature.j.clone()),
            LinearOp::mul(curvature.psq.clone()),
            sdg,
            gpj,
            gpj_adj,
        ];
        GridGeometry { metric, curvature, weight, inv_weight, lap_j, dj, ops }
    }

    /// Flat chart carrying constant curvature data (see
    /// [`CurvatureBundle::constant`]).
    pub fn constant_curvature(chart: TorusChart, j: f64, psq: f64) -> Self {
        let bundle = CurvatureBundle::constant(&chart, j, psq);
        Self::with_curvature(ConformalMetric::flat(chart), bundle)
    }

    pub fn metric(&self) -> &ConformalMetric {
        &self.metric
    }

    pub fn chart(&self) -> &TorusChart {
        self.metric.chart()
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn curvature(&self) -> &CurvatureBundle {
        &self.curvature
    }

    pub fn j(&self) -> &Field {
        &self.curvature.j
    }

    pub fn psq(&self) -> &Field {
        &self.curvature.psq
    }

    /// `ΔJ` with the discrete Laplacian.
    pub fn lap_j(&self) -> &Field {
        &self.lap_j
    }

    /// Euclidean gradient components of `J`.
    pub fn dj(&self) -> &[Field; 2] {
        &self.dj
    }

    pub fn primitive(&self, p: Primitive) -> &LinearOp {
        let k = match p {
            Primitive::Lap => 0,
            Primitive::MulJ => 1,
            Primitive::MulPsq => 2,
            Primitive::SchoutenDivGrad => 3,
            Primitive::GradPairJ => 4,
            Primitive::GradPairJAdjoint => 5,
        };
        &self.ops[k]
    }

    pub fn apply(&self, p: Primitive, f: &Field) -> Result<Field> {
        self.chart().check(f)?;
        Ok(self.primitive(p).apply(self.chart(), f))
    }

    pub fn laplacian(&self, f: &Field) -> Result<Field> {
        self.apply(Primitive::Lap, f)
    }

    pub fn schouten_div_grad(&self, f: &Field) -> Result<Field> {
        self.apply(Primitive::SchoutenDivGrad, f)
    }

    pub fn grad_pair_j(&self, f: &Field) -> Result<Field> {
        self.apply(Primitive::GradPairJ, f)
    }

    pub fn mult(&self, m: &Field, f: &Field) -> Result<Field> {
        self.chart().check(m)?;
        self.chart().check(f)?;
        Ok(m * f)
    }

    /// `g(du, dv) = e^{-2φ} Σ ∂ᵢu ∂ᵢv`.
    pub fn grad_pair(&self, u: &Field, v: &Field) -> Field {
        let c = self.chart();
        let s = &(&c.d(0, u) * &c.d(0, v)) + &(&c.d(1, u) * &c.d(1, v));
        &self.metric.exp_phi(-2.0) * &s
    }

    /// Rectangle rule for `∫ f vol(g)` over the active torus.
    pub fn integrate(&self, f: &Field) -> Result<f64> {
        self.chart().check(f)?;
        let cell = self.chart().cell();
        Ok(self.weight.values().iter().zip(f.values()).map(|(w, x)| w * x).sum::<f64>() * cell)
    }

    pub fn inner(&self, f: &Field, g: &Field) -> Result<f64> {
        self.integrate(&(f * g))
    }

    /// Discrete adjoint with respect to [`inner`](Self::inner).
    pub fn adjoint(&self, op: &LinearOp) -> LinearOp {
        op.weighted_adjoint(&self.weight, &self.inv_weight)
    }

    pub fn weight(&self) -> &Field {
        &self.weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig(chart: &TorusChart) -> ConformalMetric {
        ConformalMetric::new(chart.clone(), chart.sample(|x, y| 0.1 * x.sin() * y.cos())).unwrap()
    }

    #[test]
    fn flat_and_constant_factors_have_no_curvature() {
        let c = TorusChart::square(4, 32).unwrap();
        for k in [0.0, 0.7] {
            let m = ConformalMetric::new(c.clone(), c.constant(k)).unwrap();
            let b = curvature(&m);
            assert!(b.j.max_abs() < 1e-13 && b.psq.max_abs() < 1e-13);
            let o = oracle_curvature(&m);
            assert!(o.j.max_abs() < 1e-13 && o.psq.max_abs() < 1e-13);
        }
    }

    #[test]
    fn curvature_agrees_with_oracle() {
        for n in [3, 4, 6] {
            let c = TorusChart::square(n, 64).unwrap();
            let m = trig(&c);
            let gap = curvature(&m).relative_gap(&oracle_curvature(&m));
            assert!(gap < 1e-6, "n={n}: gap {gap}");
        }
    }

    #[test]
    fn flat_laplacian_eigenfunction() {
        let c = TorusChart::square(5, 32).unwrap();
        let g = GridGeometry::new(ConformalMetric::flat(c.clone()));
        let f = c.sample(|x, _| x.sin());
        assert!(g.laplacian(&f).unwrap().max_diff(&(-&f)) < 1e-6);
        assert!(g.schouten_div_grad(&c.constant(3.0)).unwrap().max_abs() < 1e-13);
        assert!((g.integrate(&c.constant(1.0)).unwrap() - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn laplacian_is_symmetric_and_integrates_to_zero() {
        let c = TorusChart::square(4, 32).unwrap();
        let g = GridGeometry::new(trig(&c));
        let f = c.sample(|x, y| (x + y).sin() + 0.3 * (2.0 * y).cos());
        let h = c.sample(|x, y| x.cos() * (2.0 * y).sin());
        assert!(g.integrate(&g.laplacian(&f).unwrap()).unwrap().abs() < 1e-10);
        let a = g.inner(&g.laplacian(&f).unwrap(), &h).unwrap();
        let b = g.inner(&f, &g.laplacian(&h).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let c = TorusChart::square(4, 32).unwrap();
        let g = GridGeometry::new(ConformalMetric::flat(c));
        let other = TorusChart::square(4, 16).unwrap().zeros();
        assert!(matches!(g.laplacian(&other), Err(Error::ChartMismatch(_))));
    }

    #[test]
    fn matrix_inverse() {
        let m = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let inv = invert(&m, 3);
        for r in 0..3 {
            for col in 0..3 {
                let v: f64 = (0..3).map(|k| m[r * 3 + k] * inv[k * 3 + col]).sum();
                assert!((v - if r == col { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
