//! Holographic coefficients, Q-curvatures and the identities tying them to
//! the operator families.
//!
//! Grid routines work on a [`NumericContext`]; routines with an `_exact`
//! suffix or taking a [`SphereContext`] work with exact rationals on the
//! round sphere or an Einstein constant mode.

mod critical;
mod master;

pub use critical::{conformal_covariance_q4, critical_suite_n4};
pub use master::{
    admissible_samples, example_identities, master_check_numeric, poly_checks, qres_field, qres_poly_numeric,
    v_poly_field, v_poly_numeric, PolyField, DEFAULT_LAMBDAS,
};

use crate::exact::{int, rat, Rational};
use crate::geometry::{Field, GridGeometry};
use crate::operators::{build_t2, build_t2n, build_t4, LambdaOperator};
use crate::report::CheckReport;
use crate::sphere::SphereContext;
use crate::{Error, Result};

/// `v₀ = 1, v₂, v₄` as grid fields.
#[derive(Clone, Debug)]
pub struct HoloCoefficients {
    v: [Field; 3],
}

impl HoloCoefficients {
    /// `v_{2k}` for `k ≤ 2`.
    pub fn v(&self, k: usize) -> Result<&Field> {
        self.v.get(k).ok_or_else(|| {
            Error::Unsupported(format!("v_{} needs the full Poincaré-Einstein expansion", 2 * k))
        })
    }
}

/// `v₂ = -J/2`, `v₄ = (J² - |P|²)/8`.
pub fn holo_coeffs(geom: &GridGeometry) -> HoloCoefficients {
    let j = geom.j();
    let v2 = j.scale(-0.5);
    let v4 = (&(j * j) - geom.psq()).scale(0.125);
    HoloCoefficients { v: [geom.chart().constant(1.0), v2, v4] }
}

/// `(v₂, v₄)` from traces of the expansion coefficients of `h_r` in powers
/// of `-r²`, i.e. `h_r = h - r² h₂ + r⁴ h₄ - …`. In this orientation the
/// round sphere has `h₂ = g/2` and `h₄ = g/16`.
pub fn holo_coeffs_from_expansion(h2_trace: &Rational, h2_sq_trace: &Rational, h4_trace: &Rational) -> (Rational, Rational) {
    let v2 = -h2_trace / int(2);
    let v4 = h4_trace / int(2) - h2_sq_trace / int(4) + h2_trace * h2_trace / int(8);
    (v2, v4)
}

/// Grid version of [`holo_coeffs_from_expansion`].
pub fn holo_coeffs_from_expansion_fields(h2_trace: &Field, h2_sq_trace: &Field, h4_trace: &Field) -> (Field, Field) {
    let v2 = h2_trace.scale(-0.5);
    let v4 = &(&h4_trace.scale(0.5) - &h2_sq_trace.scale(0.25)) + &(h2_trace * h2_trace).scale(0.125);
    (v2, v4)
}

/// `Q₂ = J`.
pub fn q2(geom: &GridGeometry) -> Field {
    geom.j().clone()
}

/// `Q₄ = (n/2)J² - 2|P|² - ΔJ`.
pub fn q4_direct(geom: &GridGeometry) -> Field {
    let n = geom.n() as f64;
    let j = geom.j();
    &(&(j * j).scale(n / 2.0) - &geom.psq().scale(2.0)) - geom.lap_j()
}

/// Grid data shared by the holographic checks: geometry, holographic
/// coefficients and the adjoint families `T₀*, T₂*, T₄*`.
#[derive(Clone, Debug)]
pub struct NumericContext {
    geom: GridGeometry,
    coeffs: HoloCoefficients,
    tstar: [LambdaOperator; 3],
}

impl NumericContext {
    pub fn new(geom: GridGeometry) -> Self {
        let n = geom.n() as i64;
        let coeffs = holo_coeffs(&geom);
        let tstar = [LambdaOperator::identity(n), build_t2(n).adjoint(), build_t4(n).adjoint()];
        NumericContext { geom, coeffs, tstar }
    }

    pub fn geom(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn n(&self) -> i64 {
        self.geom.n() as i64
    }

    pub fn coeffs(&self) -> &HoloCoefficients {
        &self.coeffs
    }

    /// `T₂ⱼ*` as a λ-family.
    pub fn tstar(&self, j: usize) -> Result<&LambdaOperator> {
        self.tstar.get(j).ok_or_else(|| {
            Error::Unsupported(format!("T_{} exists only in the exact sphere/Einstein setting", 2 * j))
        })
    }

    /// `T₂ⱼ*(λ)(v_{2N-2j})`.
    pub fn tstar_v(&self, j: usize, big_n: usize, lambda: &Rational) -> Result<Field> {
        let v = self.coeffs.v(big_n - j)?;
        self.tstar(j)?.apply(&self.geom, lambda, v)
    }
}

/// `¼Q₄ = 4v₄ + 2T₂*(n/2-2)(v₂)`.
pub fn q4_holographic(ctx: &NumericContext) -> Result<Field> {
    let n = ctx.n();
    if n < 4 {
        return Err(Error::InvalidParameter(format!("holographic Q4 needs n >= 4, got {n}")));
    }
    let t = ctx.tstar_v(1, 2, &(rat(n, 2) - int(2)))?;
    Ok((&ctx.coeffs().v(2)?.scale(4.0) + &t.scale(2.0)).scale(4.0))
}

/// `Q₆` needs `v₆`, which only the exact settings provide.
pub fn q6_holographic_numeric(_ctx: &NumericContext) -> Result<Field> {
    Err(Error::Unsupported("Q6 on a grid needs v6, which is only known on Einstein metrics".into()))
}

/// `Tₖ*(λ)(1)` for the families with grid formulas, on constant curvature.
fn tstar_on_one_exact(ctx: &SphereContext, j: usize, lambda: &Rational) -> Result<Rational> {
    build_t2n(ctx.n(), j)?.adjoint().on_constant(&ctx.j(), &ctx.p_sq()).eval(lambda)
}

/// `v₂, v₄` from the curvature formulas, on constant curvature.
pub fn holo_coeffs_exact(ctx: &SphereContext) -> [Rational; 3] {
    let j = ctx.j();
    [int(1), -&j / int(2), (&j * &j - ctx.p_sq()) / int(8)]
}

pub fn q2_exact(ctx: &SphereContext) -> Rational {
    ctx.j()
}

pub fn q4_direct_exact(ctx: &SphereContext) -> Rational {
    let j = ctx.j();
    rat(ctx.n(), 2) * &j * &j - int(2) * ctx.p_sq()
}

pub fn q4_holographic_exact(ctx: &SphereContext) -> Result<Rational> {
    let lam = rat(ctx.n(), 2) - int(2);
    let v = holo_coeffs_exact(ctx);
    Ok(int(4) * (int(4) * &v[2] + int(2) * tstar_on_one_exact(ctx, 1, &lam)? * &v[1]))
}

/// `-Q₆/2⁶ = 6v₆ + 4T₂*(n/2-3)(v₄) + 2T₄*(n/2-3)(v₂)` with `v₆` from the
/// closed sphere/Einstein form.
pub fn q6_holographic(ctx: &SphereContext) -> Result<Rational> {
    let lam = rat(ctx.n(), 2) - int(3);
    let sum = int(6) * ctx.v(3)
        + int(4) * tstar_on_one_exact(ctx, 1, &lam)? * ctx.v(2)
        + int(2) * tstar_on_one_exact(ctx, 2, &lam)? * ctx.v(1);
    Ok(int(-64) * sum)
}

/// Exact agreement of both Q-routes and both coefficient routes in a
/// constant-curvature setting.
pub fn exact_checks(ctx: &SphereContext) -> Vec<CheckReport> {
    let tag = |c: CheckReport| c.param("n", ctx.n()).param("J", ctx.j());
    let mut out = Vec::new();
    let v = holo_coeffs_exact(ctx);
    for k in 1..=2 {
        out.push(tag(CheckReport::equality(
            format!("holo.coeffs.v{}", 2 * k),
            format!("v_{} from curvature = closed form", 2 * k),
            &v[k],
            &ctx.v(k),
        )));
    }
    // Sphere traces in the (-r²) orientation, scaled by κ.
    let n = int(ctx.n());
    let kappa = ctx.kappa();
    let (v2, v4) = holo_coeffs_from_expansion(
        &(&n / int(2) * &kappa),
        &(&n / int(4) * &kappa * &kappa),
        &(&n / int(16) * &kappa * &kappa),
    );
    out.push(tag(CheckReport::equality("holo.coeffs.expansion_v2", "v₂ = -½ tr h₂", &v2, &ctx.v(1))));
    out.push(tag(CheckReport::equality(
        "holo.coeffs.expansion_v4",
        "v₄ = ½ tr h₄ - ¼ tr h₂² + ⅛ (tr h₂)²",
        &v4,
        &ctx.v(2),
    )));
    let q4d = q4_direct_exact(ctx);
    out.push(tag(CheckReport::equality("holo.q4.direct", "Q₄ = (n/2)J² - 2|P|² - ΔJ", &q4d, &ctx.q_closed(2))));
    match q4_holographic_exact(ctx) {
        Ok(q) => out.push(tag(CheckReport::equality("holo.q4.holographic", "¼Q₄ = 4v₄ + 2T₂*(n/2-2)(v₂)", &q, &q4d))),
        Err(e) => out.push(tag(CheckReport::errored("holo.q4.holographic", "holographic Q₄", &e))),
    }
    match q6_holographic(ctx) {
        Ok(q) => out.push(tag(CheckReport::equality(
            "holo.q6.holographic",
            "-Q₆/2⁶ = 6v₆ + 4T₂*(n/2-3)(v₄) + 2T₄*(n/2-3)(v₂)",
            &q,
            &ctx.q_closed(3),
        ))),
        Err(e) => out.push(tag(CheckReport::errored("holo.q6.holographic", "holographic Q₆", &e))),
    }
    out
}

/// Scaled residual `max|r| / max(1, max_k max|t_k|)` and the scale.
pub fn scaled_residual(residual: &Field, terms: &[&Field]) -> (f64, f64) {
    let scale = terms.iter().map(|t| t.max_abs()).fold(1.0, f64::max);
    (residual.max_abs() / scale, scale)
}

pub fn numeric_report(id: &str, relation: &str, residual: &Field, terms: &[&Field], tol: f64) -> CheckReport {
    let (r, scale) = scaled_residual(residual, terms);
    CheckReport::numeric(id, relation, r, tol).with_detail(format!("max|residual| {:.3e}, scale {scale:.3e}", residual.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets::preset_metric;
    use crate::geometry::{ConformalMetric, TorusChart};

    fn ctx(n: usize, preset: &str) -> NumericContext {
        let c = TorusChart::square(n, 64).unwrap();
        NumericContext::new(GridGeometry::new(preset_metric(&c, preset, 11).unwrap()))
    }

    #[test]
    fn closed_values() {
        let s4 = SphereContext::new(4).unwrap();
        let s6 = SphereContext::new(6).unwrap();
        assert_eq!(q2_exact(&s4), int(2));
        assert_eq!(q4_direct_exact(&s4), int(6));
        assert_eq!(q4_holographic_exact(&s4).unwrap(), int(6));
        assert_eq!(q4_direct_exact(&s6), int(24));
        assert_eq!(q6_holographic(&s6).unwrap(), int(120));
        assert_eq!(q6_holographic(&SphereContext::new(8).unwrap()).unwrap(), int(720));
        assert_eq!(holo_coeffs_exact(&s4)[1], int(-1));
        assert_eq!(holo_coeffs_exact(&s4)[2], rat(3, 8));
    }

    #[test]
    fn exact_checks_pass_on_spheres_and_einstein_modes() {
        for n in 3..=12 {
            for c in exact_checks(&SphereContext::new(n).unwrap()) {
                assert!(c.passed, "{c:?}");
            }
        }
        for c in exact_checks(&SphereContext::einstein(6, rat(-5, 2)).unwrap()) {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn expansion_substitution() {
        // Substituting J → tr h₂ and |P|² → -4 tr h₄ + 2 tr h₂² in the
        // curvature formula for v₄ gives the expansion formula.
        let (a, b, c) = (rat(3, 7), rat(-2, 5), rat(11, 3));
        let (v2, v4) = holo_coeffs_from_expansion(&a, &b, &c);
        let psq = int(-4) * &c + int(2) * &b;
        assert_eq!(v2, -&a / int(2));
        assert_eq!(v4, (&a * &a - psq) / int(8));
        assert_eq!(holo_coeffs_from_expansion(&int(0), &int(0), &int(0)), (int(0), int(0)));
    }

    #[test]
    fn flat_metric_is_trivial() {
        let c = TorusChart::square(4, 16).unwrap();
        let ctx = NumericContext::new(GridGeometry::new(ConformalMetric::flat(c)));
        assert_eq!(ctx.coeffs().v(1).unwrap().max_abs(), 0.0);
        assert_eq!(ctx.coeffs().v(2).unwrap().max_abs(), 0.0);
        assert_eq!(q4_direct(ctx.geom()).max_abs(), 0.0);
        assert_eq!(q4_holographic(&ctx).unwrap().max_abs(), 0.0);
        assert!(matches!(q6_holographic_numeric(&ctx), Err(Error::Unsupported(_))));
        assert!(ctx.coeffs().v(3).is_err());
    }

    #[test]
    fn holographic_q4_matches_direct() {
        for (n, preset) in [(4, "trig1"), (4, "random"), (6, "trig2"), (5, "random")] {
            let ctx = ctx(n, preset);
            let d = q4_direct(ctx.geom());
            let h = q4_holographic(&ctx).unwrap();
            assert!(d.max_diff(&h) <= 1e-6 * d.max_abs(), "n={n} {preset}");
        }
        let three = ctx(3, "trig1");
        assert!(q4_holographic(&three).is_err());
    }

    #[test]
    fn expansion_fields_match_curvature_route() {
        let ctx = ctx(6, "trig2");
        let g = ctx.geom();
        // h₂ = P, tr h₂² = |P|², tr h₄ = (2|P|² - |P|²)/4 reproduces |P|².
        let (v2, v4) = holo_coeffs_from_expansion_fields(g.j(), g.psq(), &g.psq().scale(0.25));
        assert!(v2.max_diff(ctx.coeffs().v(1).unwrap()) < 1e-14);
        assert!(v4.max_diff(ctx.coeffs().v(2).unwrap()) < 1e-14);
    }
}
