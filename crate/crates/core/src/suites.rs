//! Batch runners: each suite turns a parameter set into a
//! [`QuantitiesReport`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{int, rat, LambdaRat, Rational};
use crate::geometry::presets::{preset_metric, random_test_field};
use crate::geometry::{curvature, oracle_curvature, Field, GridGeometry, LinearOp, Primitive, StencilOrder, TorusChart};
use crate::holographic::{
    conformal_covariance_q4, critical_suite_n4, example_identities, exact_checks, master_check_numeric, numeric_report,
    poly_checks, q4_direct, q4_holographic, NumericContext,
};
use crate::hypergeom;
use crate::operators::{build_t2, build_t4, gjms};
use crate::report::{CheckMode, CheckReport, QuantitiesReport};
use crate::sphere::{c_n, SphereContext};
use crate::{Error, Result};

/// Tolerances of the numeric suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Identity residuals and curvature gaps.
    pub identity: f64,
    /// Discrete inner-product tests.
    pub adjoint: f64,
    /// Agreement of discrete and integrated-by-parts adjoints.
    pub coherence: f64,
    /// Critical-dimension and conformal checks.
    pub critical: f64,
    /// Minimal residual reduction under one grid refinement.
    pub refinement_factor: f64,
    /// Residuals below this on both grids are at roundoff and exempt from
    /// the refinement requirement.
    pub roundoff_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-6,
            adjoint: 1e-8,
            coherence: 1e-6,
            critical: 1e-5,
            refinement_factor: 8.0,
            roundoff_floor: 1e-11,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereParams {
    pub n_min: i64,
    pub n_max: i64,
    pub big_n_max: usize,
    /// Extra Einstein constant modes, given by their `J`.
    pub einstein: Vec<Rational>,
}

impl Default for SphereParams {
    fn default() -> Self {
        SphereParams { n_min: 3, n_max: 12, big_n_max: 6, einstein: Vec::new() }
    }
}

/// `1 ≤ N ≤ min(n/2, N_max)` for even `n`, `N ≤ N_max` for odd `n`.
pub fn sphere_orders(n: i64, big_n_max: usize) -> std::ops::RangeInclusive<usize> {
    let cap = if n % 2 == 0 { big_n_max.min((n / 2) as usize) } else { big_n_max };
    1..=cap
}

fn sphere_context_checks(ctx: &SphereContext, big_n_max: usize) -> Vec<CheckReport> {
    let orders = sphere_orders(ctx.n(), big_n_max);
    let mut out = ctx.check_radial_oracle(*orders.end());
    for big_n in orders {
        out.extend(ctx.checks(big_n));
    }
    out.extend(exact_checks(ctx));
    out
}

/// Exact closed-form checks on round spheres and Einstein constant modes.
pub fn sphere_suite(p: &SphereParams) -> Result<QuantitiesReport> {
    if p.n_min < 3 || p.n_min > p.n_max {
        return Err(Error::InvalidParameter(format!("sphere dimensions {}..{}", p.n_min, p.n_max)));
    }
    let mut contexts = Vec::new();
    for n in p.n_min..=p.n_max {
        contexts.push(SphereContext::new(n)?);
        for j in &p.einstein {
            contexts.push(SphereContext::einstein(n, j.clone())?);
        }
    }
    let checks: Vec<Vec<CheckReport>> = contexts.par_iter().map(|c| sphere_context_checks(c, p.big_n_max)).collect();
    let mut report = QuantitiesReport::new();
    report.metadata.insert("suite".into(), "sphere".into());
    report.metadata.insert("n".into(), format!("{}..{}", p.n_min, p.n_max));
    report.metadata.insert("N_max".into(), p.big_n_max.to_string());
    if !p.einstein.is_empty() {
        let js: Vec<String> = p.einstein.iter().map(|j| j.to_string()).collect();
        report.metadata.insert("einstein_J".into(), js.join(", "));
    }
    report.extend(checks.into_iter().flatten());
    report.extend(spot_checks());
    report.finalize();
    Ok(report)
}

/// Closed values: `Q₂, Q₄, v₂, v₄` on `S⁴`, `Q₄, Q₆` on `S⁶`, `c₁, c₂, c₃`.
pub fn spot_checks() -> Vec<CheckReport> {
    use crate::holographic::{holo_coeffs_exact, q2_exact, q4_direct_exact, q6_holographic};
    let s4 = SphereContext::new(4).expect("n = 4 is valid");
    let s6 = SphereContext::new(6).expect("n = 6 is valid");
    let spot = |id: &str, got: Result<Rational>, want: Rational| match got {
        Ok(v) => CheckReport::equality(format!("spot.{id}"), "closed value", &v, &want),
        Err(e) => CheckReport::errored(format!("spot.{id}"), "closed value", &e),
    };
    let v4 = holo_coeffs_exact(&s4);
    let mut out = vec![
        spot("q2_s4", Ok(q2_exact(&s4)), int(2)),
        spot("q4_s4", Ok(q4_direct_exact(&s4)), int(6)),
        spot("q4_s4_holographic", crate::holographic::q4_holographic_exact(&s4), int(6)),
        spot("q4_s6", Ok(q4_direct_exact(&s6)), int(24)),
        spot("q6_s6", q6_holographic(&s6), int(120)),
        spot("v2_s4", Ok(v4[1].clone()), int(-1)),
        spot("v4_s4", Ok(v4[2].clone()), rat(3, 8)),
        spot("v2_s4_closed", Ok(s4.v(1)), int(-1)),
        spot("v4_s4_closed", Ok(s4.v(2)), rat(3, 8)),
    ];
    for (k, want) in [(1, rat(-1, 4)), (2, rat(1, 32)), (3, rat(-1, 768))] {
        out.push(spot(&format!("c{k}"), c_n(k), want));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergeomParams {
    pub instances: usize,
    pub connection_instances: usize,
    pub max_m: usize,
    pub seed: u64,
    pub series_order: usize,
}

impl Default for HypergeomParams {
    fn default() -> Self {
        HypergeomParams { instances: 200, connection_instances: 50, max_m: 10, seed: 1, series_order: 20 }
    }
}

/// Seeded random batteries of the summation formulas plus the fixed
/// instances behind the sphere sums.
pub fn hypergeom_suite(p: &HypergeomParams) -> QuantitiesReport {
    let mut report = QuantitiesReport::new();
    report.metadata.insert("suite".into(), "hypergeom".into());
    report.metadata.insert("seed".into(), p.seed.to_string());
    report.metadata.insert("instances".into(), p.instances.to_string());
    let (pfaff, (sheppard, connection)) = rayon::join(
        || hypergeom::random_pfaff_saalschutz(p.instances, p.max_m, p.seed),
        || {
            rayon::join(
                || hypergeom::random_sheppard(p.instances, p.max_m, p.seed),
                || hypergeom::random_connection(p.connection_instances, p.max_m, p.seed),
            )
        },
    );
    report.extend(pfaff);
    report.extend(sheppard);
    report.extend(connection);

    let order = p.series_order;
    for (a, b) in [(rat(1, 3), rat(2, 5)), (rat(-7, 4), rat(5, 6)), (int(3), rat(-1, 3)), (rat(1, 2), int(4))] {
        report.checks.push(hypergeom::check_quadratic_transform(&a, &b, order));
    }
    let lam = LambdaRat::lambda();
    let c = |x: Rational| LambdaRat::constant(x);
    for (a, b) in [
        (lam.clone(), c(rat(1, 3))),
        (c(rat(2, 7)), lam.clone()),
        (lam.scale(&int(-1)), &lam + &c(int(1))),
    ] {
        report.checks.push(hypergeom::check_quadratic_transform(&a, &b, order));
    }

    let fixed: Vec<CheckReport> = (3..=12i64)
        .into_par_iter()
        .flat_map_iter(|n| {
            (0..=6usize).flat_map(move |big_n| {
                let mut v = vec![hypergeom::check_binomial_weighted_sum(n, big_n)];
                for l in [rat(1, 3), rat(-5, 7), rat(11, 2)] {
                    v.push(hypergeom::check_sheppard_residual_sum(n, big_n, &l));
                }
                v
            })
        })
        .collect();
    report.extend(fixed);
    report.finalize();
    report
}

/// Settings shared by the grid suites.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericParams {
    pub dims: Vec<usize>,
    pub grid: usize,
    /// Coarser grid for the refinement test; `None` skips it.
    pub coarse_grid: Option<usize>,
    pub presets: Vec<String>,
    pub seed: u64,
    pub lambdas: Vec<Rational>,
    pub order: StencilOrder,
    pub tol: Tolerances,
}

impl Default for NumericParams {
    fn default() -> Self {
        NumericParams {
            dims: vec![4, 6],
            grid: 64,
            coarse_grid: Some(32),
            presets: vec!["trig1".into(), "trig2".into(), "random".into()],
            seed: 7,
            lambdas: crate::holographic::DEFAULT_LAMBDAS.iter().map(|&(p, q)| rat(p, q)).collect(),
            order: StencilOrder::default(),
            tol: Tolerances::default(),
        }
    }
}

impl NumericParams {
    fn context(&self, n: usize, size: usize, preset: &str) -> Result<NumericContext> {
        let chart = TorusChart::square(n, size)?.with_order(self.order);
        Ok(NumericContext::new(GridGeometry::new(preset_metric(&chart, preset, self.seed)?)))
    }

    fn metadata(&self, report: &mut QuantitiesReport, suite: &str) {
        let m = &mut report.metadata;
        m.insert("suite".into(), suite.into());
        m.insert("grid".into(), self.grid.to_string());
        if let Some(c) = self.coarse_grid {
            m.insert("coarse_grid".into(), c.to_string());
        }
        m.insert("presets".into(), self.presets.join(", "));
        m.insert("seed".into(), self.seed.to_string());
        m.insert("stencil_order".into(), self.order.order().to_string());
        let ls: Vec<String> = self.lambdas.iter().map(|l| l.to_string()).collect();
        m.insert("lambdas".into(), ls.join(", "));
    }
}

fn tag(report: CheckReport, preset: &str, size: usize) -> CheckReport {
    report.param("preset", preset).param("grid", size)
}

/// `|⟨Af, h⟩ - ⟨f, Bh⟩| / (‖Af‖‖h‖)`.
fn inner_product_residual(g: &GridGeometry, a: &LinearOp, b: &LinearOp, f: &Field, h: &Field) -> Result<f64> {
    let c = g.chart();
    let af = a.apply(c, f);
    let lhs = g.inner(&af, h)?;
    let rhs = g.inner(f, &b.apply(c, h))?;
    let norm = (g.inner(&af, &af)? * g.inner(h, h)?).sqrt().max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).abs() / norm)
}

fn adjoint_checks(ctx: &NumericContext, p: &NumericParams) -> Result<Vec<CheckReport>> {
    let g = ctx.geom();
    let c = g.chart();
    let n = ctx.n();
    let f = random_test_field(c, p.seed);
    let h = random_test_field(c, p.seed.wrapping_add(1));
    let tol = &p.tol;
    let mut out = Vec::new();
    let prims = [
        Primitive::Lap,
        Primitive::MulJ,
        Primitive::MulPsq,
        Primitive::SchoutenDivGrad,
        Primitive::GradPairJ,
        Primitive::GradPairJAdjoint,
    ];
    for prim in prims {
        let a = g.primitive(prim);
        let r = inner_product_residual(g, a, &g.adjoint(a), &f, &h)?;
        out.push(CheckReport::numeric("numeric.adjoint.primitive", "⟨Af, h⟩ = ⟨f, A*h⟩", r, tol.adjoint).param("op", prim.symbol()));
    }
    for (prim, id) in [(Primitive::Lap, "laplacian"), (Primitive::SchoutenDivGrad, "schouten_div_grad")] {
        let a = g.primitive(prim);
        let r = inner_product_residual(g, a, a, &f, &h)?;
        out.push(CheckReport::numeric(format!("numeric.self_adjoint.{id}"), "⟨Af, h⟩ = ⟨f, Ah⟩", r, tol.adjoint));
    }
    for big_n in [1, 2] {
        if n >= 2 * big_n as i64 {
            let a = gjms(g, big_n)?;
            let r = inner_product_residual(g, &a, &a, &f, &h)?;
            out.push(
                CheckReport::numeric(format!("numeric.self_adjoint.gjms{}", 2 * big_n), "⟨Pf, h⟩ = ⟨f, Ph⟩", r, tol.adjoint),
            );
        }
    }
    // Integrated-by-parts adjoint of (dJ, d·) against the discrete one.
    let gpj = g.primitive(Primitive::GradPairJ);
    let disc = g.adjoint(gpj).apply(c, &f);
    let ana = g.apply(Primitive::GradPairJAdjoint, &f)?;
    out.push(numeric_report(
        "numeric.adjoint_coherence.grad_pair_j",
        "discrete adjoint of (dJ,d) = -(dJ,d) - ΔJ",
        &(&disc - &ana),
        &[&disc, &ana],
        tol.coherence,
    ));
    for (name, fam) in [("t2", build_t2(n)), ("t4", build_t4(n))] {
        let poles = fam.poles();
        let star = fam.adjoint();
        for l in p.lambdas.iter().filter(|l| !poles.contains(l)) {
            let a = fam.at(g, l)?;
            let disc_adj = g.adjoint(&a);
            let r = inner_product_residual(g, &a, &disc_adj, &f, &h)?;
            out.push(
                CheckReport::numeric(format!("numeric.adjoint.{name}"), "⟨T(λ)f, h⟩ = ⟨f, T(λ)*h⟩", r, tol.adjoint)
                    .param("lambda", l),
            );
            let d = disc_adj.apply(c, &f);
            let an = star.apply(g, l, &f)?;
            out.push(
                numeric_report(
                    &format!("numeric.adjoint_coherence.{name}"),
                    "discrete adjoint = word-reversed adjoint",
                    &(&d - &an),
                    &[&d, &an],
                    tol.coherence,
                )
                .param("lambda", l),
            );
        }
    }
    Ok(out)
}

/// Every grid check for one dimension, preset and grid size.
fn numeric_checks(p: &NumericParams, n: usize, preset: &str, size: usize) -> Result<Vec<CheckReport>> {
    let ctx = p.context(n, size, preset)?;
    let g = ctx.geom();
    let tol = &p.tol;
    let mut out = Vec::new();

    let gap = curvature(g.metric()).relative_gap(&oracle_curvature(g.metric()));
    out.push(CheckReport::numeric(
        "numeric.curvature_vs_oracle",
        "conformal curvature formulas = Christoffel route",
        gap,
        tol.identity,
    ));
    let v4 = ctx.coeffs().v(2)?;
    out.push(CheckReport::exact("numeric.holo.v4_finite", "v₄ finite", v4.is_finite()));

    out.extend(adjoint_checks(&ctx, p)?);

    let d = q4_direct(g);
    let h = q4_holographic(&ctx)?;
    out.push(CheckReport::numeric(
        "numeric.q4.holographic_vs_direct",
        "¼Q₄ = 4v₄ + 2T₂*(n/2-2)(v₂) vs (n/2)J² - 2|P|² - ΔJ",
        d.max_diff(&h) / d.max_abs().max(f64::MIN_POSITIVE),
        tol.identity,
    ));

    let t2_poles = build_t2(n as i64).poles();
    let t4_poles = build_t4(n as i64).poles();
    for l in &p.lambdas {
        for big_n in 1..=2usize {
            let poles = if big_n == 1 { &t2_poles } else { &t4_poles };
            if !poles.contains(l) {
                out.push(master_check_numeric(&ctx, big_n, l, tol.identity)?);
            }
        }
        if !t4_poles.contains(l) {
            out.extend(example_identities(&ctx, l, tol.identity)?);
        }
    }
    for big_n in 1..=2 {
        out.extend(poly_checks(&ctx, big_n, &p.lambdas, tol.identity)?);
    }
    Ok(out.into_iter().map(|c| tag(c.param("n", n), preset, size)).collect())
}

/// Key of a check up to its grid size.
fn refinement_key(c: &CheckReport) -> (String, BTreeMap<String, String>) {
    let mut params = c.params.clone();
    params.remove("grid");
    (c.id.clone(), params)
}

/// Residual reduction between a coarse and a fine run of the same checks.
pub fn refinement_checks(coarse: &[CheckReport], fine: &[CheckReport], tol: &Tolerances) -> Vec<CheckReport> {
    let fine: BTreeMap<_, _> = fine.iter().map(|c| (refinement_key(c), c)).collect();
    let mut out = Vec::new();
    for c in coarse.iter().filter(|c| c.mode == CheckMode::Numeric) {
        let key = refinement_key(c);
        let (Some(rc), Some(rf)) = (c.residual, fine.get(&key).and_then(|f| f.residual)) else {
            continue;
        };
        let roundoff = rc <= tol.roundoff_floor && rf <= tol.roundoff_floor;
        let factor = rc / rf;
        let passed = roundoff || factor >= tol.refinement_factor;
        let mut rep = CheckReport::exact("numeric.refinement", "coarse/fine residual ratio ≥ factor", passed)
            .with_detail(if roundoff {
                format!("both at roundoff: {rc:.3e} → {rf:.3e}")
            } else {
                format!("{rc:.3e} → {rf:.3e}, ratio {factor:.1}")
            })
            .param("check", &key.0);
        rep.params.extend(key.1);
        out.push(rep);
    }
    out
}

/// Grid suite for every dimension and preset, with grid refinement.
pub fn numeric_suite(p: &NumericParams) -> Result<QuantitiesReport> {
    let jobs: Vec<(usize, &String)> = p.dims.iter().flat_map(|&n| p.presets.iter().map(move |s| (n, s))).collect();
    let results: Vec<Result<Vec<CheckReport>>> = jobs
        .par_iter()
        .map(|&(n, preset)| {
            let fine = numeric_checks(p, n, preset, p.grid)?;
            let mut out = fine.clone();
            if let Some(cg) = p.coarse_grid {
                let coarse = numeric_checks(p, n, preset, cg)?;
                out.extend(refinement_checks(&coarse, &fine, &p.tol));
            }
            Ok(out)
        })
        .collect();
    let mut report = QuantitiesReport::new();
    p.metadata(&mut report, "numeric");
    report.metadata.insert("dims".into(), join(&p.dims));
    for r in results {
        report.extend(r?);
    }
    report.finalize();
    Ok(report)
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// The critical `n = 4` identities for every preset.
pub fn critical_suite(p: &NumericParams) -> Result<QuantitiesReport> {
    let results: Vec<Result<Vec<CheckReport>>> = p
        .presets
        .par_iter()
        .map(|preset| {
            let ctx = p.context(4, p.grid, preset)?;
            let r = critical_suite_n4(&ctx, &p.lambdas, p.tol.critical)?;
            Ok(r.checks.into_iter().map(|c| tag(c, preset, p.grid)).collect())
        })
        .collect();
    let mut report = QuantitiesReport::new();
    p.metadata(&mut report, "critical-n4");
    for r in results {
        report.extend(r?);
    }
    report.finalize();
    Ok(report)
}

/// Conformal transformation law of `Q₄` for random, zero and constant `ω`.
pub fn conformal_suite(p: &NumericParams) -> Result<QuantitiesReport> {
    let results: Vec<Result<Vec<CheckReport>>> = p
        .presets
        .par_iter()
        .map(|preset| {
            let ctx = p.context(4, p.grid, preset)?;
            let c = ctx.geom().chart().clone();
            let omegas = [
                ("random", random_test_field(&c, p.seed.wrapping_add(17)).scale(0.2)),
                ("zero", c.zeros()),
                ("constant", c.constant(0.3)),
            ];
            omegas
                .iter()
                .map(|(name, w)| {
                    Ok(tag(conformal_covariance_q4(&ctx, w, p.tol.critical)?.param("omega", name), preset, p.grid))
                })
                .collect()
        })
        .collect();
    let mut report = QuantitiesReport::new();
    p.metadata(&mut report, "conformal");
    for r in results {
        report.extend(r?);
    }
    report.finalize();
    Ok(report)
}

/// Concatenate reports, merging metadata under suite-prefixed keys.
pub fn merge(reports: Vec<QuantitiesReport>) -> QuantitiesReport {
    let mut out = QuantitiesReport::new();
    let mut suites = Vec::new();
    for r in reports {
        let suite = r.metadata.get("suite").cloned().unwrap_or_default();
        suites.push(suite.clone());
        for (k, v) in r.metadata {
            if k != "suite" {
                out.metadata.insert(format!("{suite}.{k}"), v);
            }
        }
        out.timing.suites.extend(r.timing.suites);
        out.checks.extend(r.checks);
    }
    if !suites.is_empty() {
        out.metadata.insert("suites".into(), suites.join(", "));
    }
    out.finalize();
    out
}
