//! Critical-dimension identities at n = 4 and the conformal transformation
//! law of `Q₄`.

use super::master::{derivative_at_zero, poly_checks, qres_field};
use super::{numeric_report, q4_direct, NumericContext};
use crate::exact::{int, Rational};
use crate::geometry::{Field, GridGeometry};
use crate::operators::{build_p2n, gjms};
use crate::report::{CheckReport, QuantitiesReport};
use crate::{Error, Result};

fn require_n4(ctx: &NumericContext) -> Result<()> {
    if ctx.n() != 4 {
        return Err(Error::InvalidParameter(format!("critical suite needs n = 4, got {}", ctx.n())));
    }
    Ok(())
}

/// The critical identities at λ = 0 for `n = 2N = 4`.
pub fn critical_suite_n4(ctx: &NumericContext, samples: &[Rational], tol: f64) -> Result<QuantitiesReport> {
    require_n4(ctx)?;
    let g = ctx.geom();
    let c = g.chart();
    let zero = int(0);
    let one = c.constant(1.0);
    let q4 = q4_direct(g);
    let v2 = ctx.coeffs().v(1)?;
    let v4 = ctx.coeffs().v(2)?;
    let tag = |r: CheckReport| r.param("n", 4);
    let mut report = QuantitiesReport::new();

    // (a) Σ_{j<2} (4-2j) T₂ⱼ*(0)(v_{4-2j}) = 8 c₂ Q₄ = Q₄/4
    let t2v2 = ctx.tstar_v(1, 2, &zero)?;
    let a_lhs = &v4.scale(4.0) + &t2v2.scale(2.0);
    let a_rhs = q4.scale(0.25);
    report.checks.push(tag(numeric_report(
        "critical.holographic_formula",
        "4v₄ + 2T₂*(0)(v₂) = Q₄/4",
        &(&a_lhs - &a_rhs),
        &[&v4.scale(4.0), &t2v2.scale(2.0), &a_rhs],
        tol,
    )));

    // (b) 4(Ṗ₄*(0) - Ṗ₄(0))(1) = 2⁴·2!·1!·2T₂*(0)(v₂)
    let p4 = build_p2n(4, 2)?;
    let dp = p4.lambda_derivative(g, &zero)?.apply(c, &one);
    let dps = p4.adjoint().lambda_derivative(g, &zero)?.apply(c, &one);
    let b_lhs = (&dps - &dp).scale(4.0);
    let b_rhs = t2v2.scale(64.0);
    report.checks.push(tag(numeric_report(
        "critical.derivative_identity",
        "4(Ṗ₄*(0) - Ṗ₄(0))(1) = 64·T₂*(0)(v₂)",
        &(&b_lhs - &b_rhs),
        &[&dp.scale(4.0), &dps.scale(4.0), &b_rhs],
        tol,
    )));

    // (c) which of Ṗ₄(0)(1), Ṗ₄*(0)(1) equals Q₄
    let plain = numeric_report("", "", &(&dp - &q4), &[&dp, &q4], tol);
    let starred = numeric_report("", "", &(&dps - &q4), &[&dps, &q4], tol);
    let (rp, rs) = (plain.residual.unwrap_or(f64::NAN), starred.residual.unwrap_or(f64::NAN));
    let matching = match (plain.passed, starred.passed) {
        (true, true) => "both",
        (true, false) => "Ṗ₄(0)(1)",
        (false, true) => "Ṗ₄*(0)(1)",
        (false, false) => "neither",
    };
    report.checks.push(tag(CheckReport::numeric(
        "critical.constant_term_derivative",
        "Ṗ₄(0)(1) or Ṗ₄*(0)(1) equals Q₄",
        rp.min(rs),
        tol,
    )
    .with_detail(format!("matches: {matching}; residual Ṗ₄ {rp:.3e}, Ṗ₄* {rs:.3e}"))));

    // (d), (e) from the interpolated Q-polynomial.
    let (qres, scale) = qres_field(ctx, 2, samples)?;
    let qdot = derivative_at_zero(&qres, 1);
    let qddot = derivative_at_zero(&qres, 2);
    let d_scale = scale.max(q4.max_abs());
    let d_res = (&qdot + &q4).max_abs();
    let opposite = (&qdot - &q4).max_abs() / d_scale;
    report.checks.push(tag(CheckReport::numeric(
        "critical.qres_derivative",
        "Q̇₄(0) = -Q₄",
        d_res / d_scale,
        tol,
    )
    .with_detail(format!("relative gap to +Q₄: {opposite:.3e}"))));

    // c₂⁻¹·¼·Σ 2j Ṫ₂ⱼ*(0)(v_{4-2j}) = -½Q̈₄(0) - Q₄·Σ_{k=1}^{1} 1/k
    let dt2 = ctx.tstar(1)?.lambda_derivative(g, &zero)?.apply(c, v2);
    let dt4 = tstar4_derivative_at_zero(ctx)?;
    let e_lhs = (&dt2.scale(2.0) + &dt4.scale(4.0)).scale(32.0 / 4.0);
    let e_rhs = &qddot.scale(-0.5) - &q4;
    report.checks.push(tag(numeric_report(
        "critical.harmonic_sum",
        "c₂⁻¹·¼·Σ 2j Ṫ₂ⱼ*(0)(v₄₋₂ⱼ) = -½Q̈₄(0) - Q₄·Σ 1/k",
        &(&e_lhs - &e_rhs),
        &[&dt2.scale(16.0), &dt4.scale(32.0), &qddot.scale(0.5), &q4],
        tol,
    )));

    report.extend(poly_checks(ctx, 2, samples, tol)?);
    for check in &mut report.checks {
        if !check.id.starts_with("critical.") {
            check.id = format!("critical.{}", check.id.trim_start_matches("numeric."));
        }
    }
    Ok(report)
}

/// `Ṫ₄*(0)(1)` at `n = 4`, where `λ = 0` is a removable singularity of
/// `T₄*(λ)(1)`: the root is divided out of the λ-numerator first.
fn tstar4_derivative_at_zero(ctx: &NumericContext) -> Result<Field> {
    let g = ctx.geom();
    let zero_field = g.chart().zeros();
    let sym = ctx.tstar(2)?.apply_symbolic(g, &g.chart().constant(1.0))?;
    let (reg, remainder) = sym.cancel_root(&int(0), &zero_field)?;
    let scale = sym.numer_at(1.0).map_or(1.0, |f| f.max_abs()).max(1.0);
    if remainder.max_abs() > 1e-9 * scale {
        return Err(Error::Pole(format!("0 (numerator does not vanish: {:.3e})", remainder.max_abs())));
    }
    reg.derivative_at(&int(0), &zero_field)
}

/// `e^{4ω} Q₄(e^{2ω}g) = Q₄(g) + P₄(g)(ω)` for `g = e^{2φ}δ`, `n = 4`.
pub fn conformal_covariance_q4(ctx: &NumericContext, omega: &Field, tol: f64) -> Result<CheckReport> {
    require_n4(ctx)?;
    let g = ctx.geom();
    let changed = GridGeometry::new(g.metric().conformal_change(omega)?);
    let lhs = &q4_direct(&changed) * &omega.map(|w| (4.0 * w).exp());
    let q4 = q4_direct(g);
    let p4w = gjms(g, 2)?.apply(g.chart(), omega);
    let rhs = &q4 + &p4w;
    Ok(numeric_report(
        "conformal.q4_transformation",
        "e^{4ω}Q₄(e^{2ω}g) = Q₄(g) + P₄(g)(ω)",
        &(&lhs - &rhs),
        &[&lhs, &q4, &p4w],
        tol,
    )
    .param("n", 4))
}
