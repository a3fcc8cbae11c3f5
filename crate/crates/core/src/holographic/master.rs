//! Master relations, the Q- and V-polynomials on a grid.

use super::{numeric_report, NumericContext};
use crate::exact::{factorial, int, interpolate, rat, to_f64, FloatPoly, Rational};
use crate::geometry::Field;
use crate::report::CheckReport;
use crate::{Error, Result};

/// Sample abscissae: `0, 1/3, 5, -2, 7/2`.
pub const DEFAULT_LAMBDAS: [(i64, i64); 5] = [(0, 1), (1, 3), (5, 1), (-2, 1), (7, 2)];

pub fn default_lambdas() -> Vec<Rational> {
    DEFAULT_LAMBDAS.iter().map(|&(p, q)| rat(p, q)).collect()
}

fn four_pow(k: usize) -> f64 {
    4f64.powi(k as i32)
}

/// `λN Σ T₂ⱼ*(λ)(v_{2N-2j}) + (λ-n+2N) Σ j T₂ⱼ*(λ)(v_{2N-2j})`, scaled.
pub fn master_check_numeric(ctx: &NumericContext, big_n: usize, lambda: &Rational, tol: f64) -> Result<CheckReport> {
    check_n(big_n)?;
    let n = ctx.n();
    let lam = to_f64(lambda);
    let gap = lam - (n - 2 * big_n as i64) as f64;
    let mut terms = Vec::new();
    for j in 0..=big_n {
        let c = lam * big_n as f64 + gap * j as f64;
        terms.push(ctx.tstar_v(j, big_n, lambda)?.scale(c));
    }
    let residual = sum(&terms, ctx);
    let refs: Vec<&Field> = terms.iter().collect();
    Ok(numeric_report(
        "numeric.master.weighted_form",
        "λN·Σ T*(v) + (λ-n+2N)·Σ j T*(v) = 0",
        &residual,
        &refs,
        tol,
    )
    .param("n", n)
    .param("N", big_n)
    .param("lambda", lambda))
}

/// The two closed expressions for `8T₄*(λ)(1) + 6T₂*(λ)(v₂) + 4v₄` and
/// `T₄*(λ)(1) + T₂*(λ)(v₂) + v₄` in terms of `J`, `|P|²` and `ΔJ`.
pub fn example_identities(ctx: &NumericContext, lambda: &Rational, tol: f64) -> Result<Vec<CheckReport>> {
    let n = ctx.n();
    let g = ctx.geom();
    let lam = to_f64(lambda);
    let nf = n as f64;
    let t4 = ctx.tstar_v(2, 2, lambda)?;
    let t2 = ctx.tstar_v(1, 2, lambda)?;
    let v4 = ctx.coeffs().v(2)?;
    let (j, psq) = (g.j(), g.psq());
    let jj = j * j;
    // λ(2|P|² - J²) + (n-2)(J² - |P|²) - ΔJ
    let bracket = &(&(&psq.scale(2.0) - &jj).scale(lam) + &(&jj - psq).scale(nf - 2.0)) - g.lap_j();
    let den = (nf - 2.0 - 2.0 * lam) * (nf - 4.0 - 2.0 * lam);

    let lhs1 = &(&t4.scale(8.0) + &t2.scale(6.0)) + &v4.scale(4.0);
    let rhs1 = bracket.scale((nf / 2.0 - 2.0) / den);
    let lhs2 = &(&t4 + &t2) + v4;
    let rhs2 = bracket.scale(-(lam - nf + 4.0) / (8.0 * den));
    let tag = |c: CheckReport| c.param("n", n).param("lambda", lambda);
    Ok(vec![
        tag(numeric_report(
            "numeric.example.weighted_sum",
            "8T₄*(λ)(1) + 6T₂*(λ)(v₂) + 4v₄ = (n/2-2)[…]/((n-2-2λ)(n-4-2λ))",
            &(&lhs1 - &rhs1),
            &[&t4.scale(8.0), &t2.scale(6.0), &v4.scale(4.0), &rhs1],
            tol,
        )),
        tag(numeric_report(
            "numeric.example.plain_sum",
            "T₄*(λ)(1) + T₂*(λ)(v₂) + v₄ = -(λ-n+4)[…]/(8(n-2-2λ)(n-4-2λ))",
            &(&lhs2 - &rhs2),
            &[&t4, &t2, v4, &rhs2],
            tol,
        )),
    ])
}

/// A polynomial in λ with field coefficients.
#[derive(Clone, Debug)]
pub struct PolyField {
    coeffs: Vec<Field>,
    zero: Field,
}

impl PolyField {
    /// Degree `< k` interpolation through `k` samples. The Lagrange weights
    /// are computed exactly.
    pub fn interpolate(samples: &[(Rational, Field)]) -> Result<Self> {
        let (_, first) = samples.first().ok_or_else(|| Error::InvalidParameter("no samples".into()))?;
        let zero = first.scale(0.0);
        let mut coeffs = vec![zero.clone(); samples.len()];
        for (i, (_, f)) in samples.iter().enumerate() {
            let pts: Vec<(Rational, Rational)> =
                samples.iter().enumerate().map(|(k, (x, _))| (x.clone(), int((k == i) as i64))).collect();
            let basis = interpolate(&pts)?;
            for (k, c) in basis.coeffs().iter().enumerate() {
                coeffs[k] = &coeffs[k] + &f.scale(to_f64(c));
            }
        }
        Ok(PolyField { coeffs, zero })
    }

    pub fn coeff(&self, k: usize) -> &Field {
        self.coeffs.get(k).unwrap_or(&self.zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> Field {
        self.coeffs.iter().rev().fold(self.zero.clone(), |acc, c| &acc.scale(x) + c)
    }

    /// The polynomial at one grid point.
    pub fn at_point(&self, i1: usize, i2: usize) -> FloatPoly {
        FloatPoly(self.coeffs.iter().map(|c| c.get(i1, i2)).collect())
    }
}

/// Defining sum of the Q- or V-polynomial at one λ, with its terms.
type Sampled = (Field, Vec<Field>);

fn check_n(big_n: usize) -> Result<()> {
    if !(1..=2).contains(&big_n) {
        return Err(Error::Unsupported(format!(
            "grid identities exist for N in {{1, 2}}, got N={big_n}"
        )));
    }
    Ok(())
}

/// `Π_{k=1}^N (λ + n/2 - 2N + k)`.
fn front(n: i64, big_n: usize, lambda: f64) -> f64 {
    (1..=big_n).map(|k| lambda + n as f64 / 2.0 - 2.0 * big_n as f64 + k as f64).product()
}

fn shifted(n: i64, big_n: usize, lambda: &Rational) -> Rational {
    lambda + int(n - 2 * big_n as i64)
}

/// Samples avoiding every pole of `T₂ⱼ*(λ + n - 2N)`, `j ≤ N`.
pub fn admissible_samples(ctx: &NumericContext, big_n: usize, samples: &[Rational]) -> Result<Vec<Rational>> {
    check_n(big_n)?;
    let n = ctx.n();
    let mut poles = Vec::new();
    for j in 0..=big_n {
        poles.extend(ctx.tstar(j)?.poles());
    }
    Ok(samples.iter().filter(|l| !poles.contains(&shifted(n, big_n, l))).cloned().collect())
}

fn sample(ctx: &NumericContext, big_n: usize, lambda: &Rational, weight: impl Fn(usize) -> f64) -> Result<Sampled> {
    let n = ctx.n();
    let f = front(n, big_n, to_f64(lambda));
    let mu = shifted(n, big_n, lambda);
    let terms = (0..=big_n)
        .map(|j| Ok(ctx.tstar_v(j, big_n, &mu)?.scale(f * weight(j))))
        .collect::<Result<Vec<_>>>()?;
    Ok((sum(&terms, ctx), terms))
}

fn sum(terms: &[Field], ctx: &NumericContext) -> Field {
    terms.iter().fold(ctx.geom().chart().zeros(), |acc, t| &acc + t)
}

fn qres_weight(big_n: usize) -> impl Fn(usize) -> f64 {
    let c = -four_pow(big_n) * to_f64(&factorial(big_n as u64));
    move |_| c
}

fn v_weight(big_n: usize) -> impl Fn(usize) -> f64 {
    move |j| (2 * big_n + 2 * j) as f64
}

/// Interpolation of a defining sum through the first `N+1` admissible
/// samples. Also returns the largest term norm and the unused samples with
/// their directly computed values.
struct Interpolated {
    poly: PolyField,
    scale: f64,
    used: Vec<Rational>,
    extra: Vec<(Rational, Field)>,
}

fn interpolate_sum(
    ctx: &NumericContext,
    big_n: usize,
    samples: &[Rational],
    weight: impl Fn(usize) -> f64,
) -> Result<Interpolated> {
    let ok = admissible_samples(ctx, big_n, samples)?;
    if ok.len() < big_n + 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} pole-free λ samples for N={big_n}, have {}",
            big_n + 1,
            ok.len()
        )));
    }
    let mut scale: f64 = 1.0;
    let mut values = Vec::new();
    for l in &ok {
        let (v, terms) = sample(ctx, big_n, l, &weight)?;
        scale = terms.iter().map(|t| t.max_abs()).fold(scale, f64::max);
        values.push((l.clone(), v));
    }
    let extra = values.split_off(big_n + 1);
    let used = values.iter().map(|(l, _)| l.clone()).collect();
    Ok(Interpolated { poly: PolyField::interpolate(&values)?, scale, used, extra })
}

/// `Q₂ₙʳᵉˢ(λ) = -2^{2N} N! Π_{k=1}^N(λ+n/2-2N+k) Σ_j T₂ⱼ*(λ+n-2N)(v_{2N-2j})`
/// as field coefficients, with the term scale.
pub fn qres_field(ctx: &NumericContext, big_n: usize, samples: &[Rational]) -> Result<(PolyField, f64)> {
    let i = interpolate_sum(ctx, big_n, samples, qres_weight(big_n))?;
    Ok((i.poly, i.scale))
}

/// `V₂ₙ(λ) = Π_{k=1}^N(λ+n/2-2N+k) Σ_j (2N+2j) T₂ⱼ*(λ+n-2N)(v_{2N-2j})`.
pub fn v_poly_field(ctx: &NumericContext, big_n: usize, samples: &[Rational]) -> Result<(PolyField, f64)> {
    let i = interpolate_sum(ctx, big_n, samples, v_weight(big_n))?;
    Ok((i.poly, i.scale))
}

/// The Q-polynomial at one grid point from the default samples.
pub fn qres_poly_numeric(ctx: &NumericContext, big_n: usize, point: (usize, usize)) -> Result<FloatPoly> {
    Ok(qres_field(ctx, big_n, &default_lambdas())?.0.at_point(point.0, point.1))
}

/// The V-polynomial at one grid point from the default samples.
pub fn v_poly_numeric(ctx: &NumericContext, big_n: usize, point: (usize, usize)) -> Result<FloatPoly> {
    Ok(v_poly_field(ctx, big_n, &default_lambdas())?.0.at_point(point.0, point.1))
}

/// Structural checks of the interpolated Q- and V-polynomials.
pub fn poly_checks(ctx: &NumericContext, big_n: usize, samples: &[Rational], tol: f64) -> Result<Vec<CheckReport>> {
    let n = ctx.n();
    let q = interpolate_sum(ctx, big_n, samples, qres_weight(big_n))?;
    let v = interpolate_sum(ctx, big_n, samples, v_weight(big_n))?;
    let scale = q.scale.max(v.scale);
    let used = q.used.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
    let tag = |c: CheckReport| c.param("n", n).param("N", big_n).param("samples", &used);
    let report = |id: &str, rel: &str, r: f64| {
        tag(CheckReport::numeric(id, rel, r / scale, tol).with_detail(format!("max|residual| {r:.3e}, scale {scale:.3e}")))
    };
    let mut out = vec![
        report("numeric.qres.vanishes_at_zero", "Q(0) = 0", q.poly.coeff(0).max_abs()),
        report("numeric.v_poly.degree", "deg V ≤ N-1", v.poly.coeff(big_n).max_abs()),
    ];

    // 2^{2N-2}(N-1)! λ V(λ) = (n/2-N) Q(λ), coefficient by coefficient.
    let c = four_pow(big_n - 1) * to_f64(&factorial(big_n as u64 - 1));
    let half_gap = n as f64 / 2.0 - big_n as f64;
    let worst = (0..=big_n + 1)
        .map(|k| {
            let lhs = if k == 0 { q.poly.coeff(0).scale(0.0) } else { v.poly.coeff(k - 1).scale(c) };
            lhs.max_diff(&q.poly.coeff(k).scale(half_gap))
        })
        .fold(0.0, f64::max);
    out.push(report("numeric.master.polynomial_form", "2^{2N-2}(N-1)! λ V(λ) = (n/2-N) Q(λ)", worst));

    if 2 * big_n as i64 == n {
        let worst = (0..v.poly.len()).map(|k| v.poly.coeff(k).max_abs()).fold(0.0, f64::max);
        out.push(report("numeric.v_poly.critical_vanishing", "V_n(λ) ≡ 0", worst));
    }
    if big_n == 1 {
        // Q₂(λ) = Q₂ λ with Q₂ = J
        out.push(report("numeric.qres.linear_coefficient", "Q₂(λ) = J·λ", q.poly.coeff(1).max_diff(ctx.geom().j())));
    }
    // The interpolant reproduces the defining sum at the unused samples.
    for (which, i) in [("qres", &q), ("v_poly", &v)] {
        if !i.extra.is_empty() {
            let worst = i
                .extra
                .iter()
                .map(|(l, f)| i.poly.eval(to_f64(l)).max_diff(f))
                .fold(0.0, f64::max);
            out.push(report(
                &format!("numeric.{which}.polynomial_in_lambda"),
                "interpolant matches the defining sum at further λ",
                worst,
            ));
        }
    }
    Ok(out)
}

/// `p⁽ᵏ⁾(0)` from the coefficients.
pub(crate) fn derivative_at_zero(p: &PolyField, k: usize) -> Field {
    p.coeff(k).scale(to_f64(&factorial(k as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets::preset_metric;
    use crate::geometry::{ConformalMetric, GridGeometry, TorusChart};
    use crate::sphere::SphereContext;

    fn ctx(n: usize, size: usize, preset: &str) -> NumericContext {
        let c = TorusChart::square(n, size).unwrap();
        NumericContext::new(GridGeometry::new(preset_metric(&c, preset, 5).unwrap()))
    }

    #[test]
    fn master_relations_hold() {
        for (n, preset) in [(5, "random"), (4, "trig1"), (6, "trig2")] {
            let ctx = ctx(n, 32, preset);
            for big_n in 1..=2 {
                for l in default_lambdas() {
                    match master_check_numeric(&ctx, big_n, &l, 1e-6) {
                        Ok(r) => assert!(r.passed, "{r:?}"),
                        Err(e) => assert!(matches!(e, Error::Pole(_))),
                    }
                }
            }
            for l in default_lambdas() {
                if let Ok(rs) = example_identities(&ctx, &l, 1e-6) {
                    assert!(rs.iter().all(|r| r.passed), "{rs:?}");
                }
            }
        }
    }

    #[test]
    fn flat_master_residual_is_zero() {
        let c = TorusChart::square(5, 16).unwrap();
        let ctx = NumericContext::new(GridGeometry::new(ConformalMetric::flat(c)));
        let r = master_check_numeric(&ctx, 1, &rat(1, 3), 0.0).unwrap();
        assert_eq!(r.residual, Some(0.0));
        let (q, _) = qres_field(&ctx, 2, &default_lambdas()).unwrap();
        assert!((0..q.len()).all(|k| q.coeff(k).max_abs() == 0.0));
    }

    #[test]
    fn polynomials_on_a_grid() {
        for (n, preset) in [(4, "trig2"), (6, "random"), (5, "trig1")] {
            let ctx = ctx(n, 32, preset);
            for big_n in 1..=2 {
                for r in poly_checks(&ctx, big_n, &default_lambdas(), 1e-6).unwrap() {
                    assert!(r.passed, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn sphere_constants_reproduce_exact_polynomials() {
        // Flat chart carrying the curvature of S⁴.
        let s = SphereContext::new(4).unwrap();
        let c = TorusChart::square(4, 16).unwrap();
        let g = GridGeometry::constant_curvature(c, to_f64(&s.j()), to_f64(&s.p_sq()));
        let ctx = NumericContext::new(g);
        let q = qres_poly_numeric(&ctx, 2, (3, 5)).unwrap();
        let exact = s.qres_assembled(2).unwrap();
        for k in 0..3 {
            assert!((q.coeff(k) - to_f64(&exact.coeff(k))).abs() < 1e-9, "{q:?} vs {exact}");
        }
        let v = v_poly_numeric(&ctx, 1, (0, 0)).unwrap();
        assert!((v.coeff(0) - 2.0).abs() < 1e-12 && v.coeff(1).abs() < 1e-12);
    }

    #[test]
    fn pole_samples_are_skipped() {
        let ctx = ctx(4, 16, "flat");
        // T₄*(λ) has poles {0, 1} at n = 4; λ + n - 2N = λ.
        let ok = admissible_samples(&ctx, 2, &default_lambdas()).unwrap();
        assert_eq!(ok, vec![rat(1, 3), int(5), int(-2), rat(7, 2)]);
        assert!(qres_field(&ctx, 2, &[int(0), int(1), int(3)]).is_err());
        assert!(master_check_numeric(&ctx, 3, &int(5), 1e-6).is_err());
    }
}
