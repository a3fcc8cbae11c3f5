use holoq::exact::{int, rat, Rational};
use holoq::hypergeom::{
    binomial_weighted_closed, binomial_weighted_closed_rising, binomial_weighted_sum, check_pfaff_saalschutz,
    hyper_terminating, HyperSpec,
};
use holoq::sphere::{c_n, SphereContext};
use proptest::prelude::*;

/// `x (x+1) ⋯ (x+k-1)` by a plain loop.
fn rising(x: &Rational, k: usize) -> Rational {
    (0..k).fold(int(1), |acc, j| acc * (x + int(j as i64)))
}

fn fact(k: usize) -> Rational {
    rising(&int(1), k)
}

fn big_n_range(n: i64) -> std::ops::RangeInclusive<usize> {
    let top = if n % 2 == 0 { (n / 2).min(6) } else { 6 };
    1..=top as usize
}

/// On the unit sphere the GJMS operator is a product of shifted Laplacians,
/// so `Q₂ₙ = (n/2-N+1)(n/2-N+2)⋯(n/2+N-1)`.
fn q_sphere(n: i64, big_n: usize) -> Rational {
    rising(&(rat(n, 2) - int(big_n as i64) + int(1)), 2 * big_n - 1)
}

#[test]
fn q_curvature_of_round_spheres() {
    for n in 3..=12 {
        let ctx = SphereContext::new(n).unwrap();
        for big_n in big_n_range(n) {
            let want = q_sphere(n, big_n);
            assert_eq!(ctx.q(big_n).unwrap(), want, "n={n} N={big_n}");
            assert_eq!(ctx.q_closed(big_n), want, "n={n} N={big_n}");
        }
    }
    // Critical values are (n-1)!.
    assert_eq!(SphereContext::new(4).unwrap().q(2).unwrap(), int(6));
    assert_eq!(SphereContext::new(6).unwrap().q(3).unwrap(), int(120));
    assert_eq!(SphereContext::new(8).unwrap().q(4).unwrap(), int(5040));
}

#[test]
fn volume_coefficients_from_the_warp_factor() {
    // The hyperbolic volume density is (1 - r²/4)ⁿ; expand by repeated products.
    for n in 3..=12i64 {
        let mut density = vec![int(1)];
        for _ in 0..n {
            let mut next = vec![int(0); density.len() + 1];
            for (k, c) in density.iter().enumerate() {
                next[k] += c;
                next[k + 1] -= c * rat(1, 4);
            }
            density = next;
        }
        let ctx = SphereContext::new(n).unwrap();
        for big_n in 0..=6usize.min(n as usize) {
            assert_eq!(ctx.v(big_n), density[big_n], "n={n} N={big_n}");
        }
    }
}

#[test]
fn constant_term_of_gjms_on_spheres() {
    for n in 3..=12 {
        let ctx = SphereContext::new(n).unwrap();
        for big_n in big_n_range(n) {
            let at = rat(n, 2) - int(big_n as i64);
            let sign = if big_n % 2 == 0 { int(1) } else { int(-1) };
            let want = sign * rising(&at, 2 * big_n);
            assert_eq!(ctx.p_on_one(big_n).eval(&at), want, "n={n} N={big_n}");
        }
    }
}

#[test]
fn holographic_constants() {
    let want = |big_n: usize| {
        let sign = if big_n % 2 == 0 { int(1) } else { int(-1) };
        sign / (rising(&int(1), big_n) * fact(big_n - 1) * Rational::from_integer(4.into()).pow(big_n as i32))
    };
    for big_n in 1..=6 {
        assert_eq!(c_n(big_n).unwrap(), want(big_n));
    }
    assert_eq!(c_n(1).unwrap(), rat(-1, 4));
    assert_eq!(c_n(2).unwrap(), rat(1, 32));
    assert_eq!(c_n(3).unwrap(), rat(-1, 768));
    assert!(c_n(0).is_err());
}

#[test]
fn weighted_binomial_sum_needs_falling_factorials() {
    for n in 3..=12 {
        for big_n in 0..=6 {
            assert_eq!(binomial_weighted_sum(n, big_n), binomial_weighted_closed(n, big_n), "n={n} N={big_n}");
        }
    }
    // The rising-factorial variant disagrees as soon as N ≥ 2.
    assert_ne!(binomial_weighted_sum(5, 2), binomial_weighted_closed_rising(5, 2));
}

fn direct_3f2_unit(m: usize, a: &Rational, b: &Rational, c: &Rational, e: &Rational) -> Rational {
    let mm = int(-(m as i64));
    (0..=m)
        .map(|k| rising(&mm, k) * rising(a, k) * rising(b, k) / (rising(c, k) * rising(e, k) * fact(k)))
        .sum()
}

fn param() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=7).prop_map(|(p, q)| rat(p, q))
}

/// Lower parameters must avoid `0, -1, …, -(m-1)`.
fn admissible(x: &Rational, m: usize) -> bool {
    !(x.is_integer() && *x <= int(0) && *x > int(-(m as i64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn balanced_3f2_summation(m in 0usize..=8, a in param(), b in param(), c in param()) {
        let e = int(1) + &a + &b - &c - int(m as i64);
        prop_assume!(admissible(&c, m) && admissible(&e, m));
        let den = rising(&c, m) * rising(&(&c - &a - &b), m);
        prop_assume!(den != int(0));
        let closed = rising(&(&c - &a), m) * rising(&(&c - &b), m) / den;
        let direct = direct_3f2_unit(m, &a, &b, &c, &e);
        prop_assert_eq!(&direct, &closed);
        let spec = HyperSpec::new(vec![int(-(m as i64)), a.clone(), b.clone()], vec![c.clone(), e], int(1));
        prop_assert_eq!(hyper_terminating(&spec).unwrap(), direct);
        prop_assert!(check_pfaff_saalschutz(&a, &b, m, &c).passed);
    }

    #[test]
    fn chu_vandermonde(m in 0usize..=10, b in param(), c in param()) {
        prop_assume!(admissible(&c, m) && rising(&c, m) != int(0));
        let spec = HyperSpec::new(vec![int(-(m as i64)), b.clone()], vec![c.clone()], int(1));
        prop_assert_eq!(hyper_terminating(&spec).unwrap(), rising(&(&c - &b), m) / rising(&c, m));
    }
}

#[test]
fn non_terminating_series_are_rejected() {
    let spec = HyperSpec::new(vec![rat(1, 2), int(1)], vec![int(3)], int(1));
    assert!(hyper_terminating(&spec).is_err());
    let bad_lower = HyperSpec::new(vec![int(-3), int(1)], vec![int(-1)], int(1));
    assert!(hyper_terminating(&bad_lower).is_err());
}
