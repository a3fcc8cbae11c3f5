use holoq::geometry::presets::{preset_metric, random_test_field, PRESET_NAMES};
use holoq::geometry::{curvature, io, ConformalMetric, GridGeometry, Primitive, TorusChart};
use holoq::operators::gjms;
use holoq::report::QuantitiesReport;
use holoq::suites::{sphere_suite, SphereParams};
use proptest::prelude::*;

#[test]
fn schouten_trace_matches_closed_form() {
    // φ = a sin x cos y: J = e^{-2φ}(-Δφ - (n-2)/2 |dφ|²) with Euclidean Δ, d.
    let a = 0.15;
    for n in [3usize, 4, 6] {
        let c = TorusChart::square(n, 64).unwrap();
        let phi = c.sample(|x, y| a * x.sin() * y.cos());
        let m = ConformalMetric::new(c.clone(), phi).unwrap();
        let want = c.sample(|x, y| {
            let p = a * x.sin() * y.cos();
            let (px, py) = (a * x.cos() * y.cos(), -a * x.sin() * y.sin());
            (-2.0 * p).exp() * (2.0 * p - 0.5 * (n as f64 - 2.0) * (px * px + py * py))
        });
        let j = curvature(&m).j;
        assert!(j.max_diff(&want) < 1e-9 * want.max_abs(), "n={n}: {}", j.max_diff(&want));
    }
}

#[test]
fn yamabe_operator_is_conformally_covariant() {
    // e^{(n/2+1)ω} P₂(e^{2ω}g) f = P₂(g)(e^{(n/2-1)ω} f)
    for n in [3usize, 4, 5] {
        let c = TorusChart::square(n, 64).unwrap();
        let g = GridGeometry::new(preset_metric(&c, "trig2", 3).unwrap());
        let omega = random_test_field(&c, 11).scale(0.1);
        let changed = GridGeometry::new(g.metric().conformal_change(&omega).unwrap());
        let f = random_test_field(&c, 12);
        let h = n as f64 / 2.0;
        let lhs = &gjms(&changed, 1).unwrap().apply(&c, &f) * &omega.map(|w| ((h + 1.0) * w).exp());
        let rhs = gjms(&g, 1).unwrap().apply(&c, &(&f * &omega.map(|w| ((h - 1.0) * w).exp())));
        assert!(lhs.max_diff(&rhs) < 1e-7 * rhs.max_abs(), "n={n}: {}", lhs.max_diff(&rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn laplacian_is_symmetric_for_random_pairs(s1 in 0u64..1000, s2 in 0u64..1000, idx in 0usize..PRESET_NAMES.len()) {
        let c = TorusChart::square(4, 32).unwrap();
        let g = GridGeometry::new(preset_metric(&c, PRESET_NAMES[idx], s1).unwrap());
        let (f, h) = (random_test_field(&c, s1), random_test_field(&c, s2));
        let lap = g.primitive(Primitive::Lap);
        let (lf, lh) = (lap.apply(&c, &f), lap.apply(&c, &h));
        let gap = (g.inner(&lf, &h).unwrap() - g.inner(&f, &lh).unwrap()).abs();
        let scale = g.inner(&lf, &lf).unwrap().sqrt() * g.inner(&h, &h).unwrap().sqrt();
        prop_assert!(gap <= 1e-12 * scale.max(1.0), "gap {gap:e}");
    }
}

#[test]
fn field_files_round_trip() {
    let c = TorusChart::new(5, 16, 24).unwrap();
    let f = random_test_field(&c, 5);
    let path = std::env::temp_dir().join(format!("holoq-roundtrip-{}.hqf", std::process::id()));
    io::save(&path, &c, &f).unwrap();
    let (n, back) = io::load(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(n, 5);
    assert_eq!(back, f);
    assert!(io::read_field(&b"not a field file"[..]).is_err());
}

#[test]
fn reports_survive_json_and_render_markdown() {
    let report = sphere_suite(&SphereParams { n_min: 4, n_max: 5, big_n_max: 2, einstein: vec![] }).unwrap();
    assert!(report.all_passed());
    let back = QuantitiesReport::from_json(&report.to_json()).unwrap();
    assert_eq!(back, report);
    let md = report.to_markdown();
    assert!(md.contains("sphere.master.weighted_form"));
    assert!(md.contains(&format!("{} checks", report.checks.len())));
}
