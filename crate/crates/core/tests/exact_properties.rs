use holoq::exact::{
    falling_factorial, int, interpolate, pochhammer, rat, FormalSeries, LambdaPoly, LambdaRat, Rational,
};
use holoq::hypergeom::binomial_series;
use proptest::prelude::*;

fn poly(coeffs: &[(i64, i64)]) -> LambdaPoly {
    LambdaPoly::new(coeffs.iter().map(|&(p, q)| rat(p, q)).collect())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn small_poly(max_len: usize) -> impl Strategy<Value = LambdaPoly> {
    prop::collection::vec((-6i64..=6, 1i64..=4), 0..=max_len).prop_map(|c| poly(&c))
}

fn nonzero_poly(max_len: usize) -> impl Strategy<Value = LambdaPoly> {
    small_poly(max_len).prop_filter("non-zero", |p| !p.is_zero())
}

fn small_rat() -> impl Strategy<Value = LambdaRat> {
    (small_poly(3), nonzero_poly(3)).prop_map(|(n, d)| LambdaRat::new(n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_functions_form_a_field(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) / &b, a.clone());
        }
        // Normal form makes equality structural.
        prop_assert_eq!(a.reduced(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in small_rat(), b in small_rat(), x in small_rational()) {
        if let (Ok(ax), Ok(bx)) = (a.eval(&x), b.eval(&x)) {
            if let Ok(s) = (&a + &b).eval(&x) {
                prop_assert_eq!(s, &ax + &bx);
            }
            if let Ok(p) = (&a * &b).eval(&x) {
                prop_assert_eq!(p, &ax * &bx);
            }
        }
    }

    #[test]
    fn polynomial_division_reconstructs(a in small_poly(5), d in nonzero_poly(3)) {
        let (q, r) = a.div_rem(&d).unwrap();
        prop_assert_eq!(&(&q * &d) + &r, a);
        prop_assert!(r.is_zero() || r.degree() < d.degree());
    }

    #[test]
    fn gcd_divides_both(a in nonzero_poly(4), b in nonzero_poly(4), f in nonzero_poly(2)) {
        let (fa, fb) = (&a * &f, &b * &f);
        let g = fa.gcd(&fb);
        prop_assert!(g.divides(&fa) && g.divides(&fb));
        prop_assert!(f.divides(&g));
    }

    #[test]
    fn interpolation_recovers_polynomials(p in small_poly(6), start in -5i64..5) {
        let deg = p.degree().unwrap_or(0);
        let points: Vec<_> = (0..=deg as i64).map(|k| {
            let x = rat(2 * (start + k) + 1, 3);
            (x.clone(), p.eval(&x))
        }).collect();
        prop_assert_eq!(interpolate(&points).unwrap(), p);
    }

    #[test]
    fn derivative_obeys_the_product_rule(a in small_rat(), b in small_rat()) {
        prop_assert_eq!((&a * &b).derivative(), &(&a.derivative() * &b) + &(&a * &b.derivative()));
    }

    #[test]
    fn rising_and_falling_factorials(x in small_rational(), k in 0usize..8) {
        let sign = if k % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(pochhammer(&x, k), sign * falling_factorial(&(-x.clone()), k));
        // Direct product as oracle.
        let direct = (0..k).fold(int(1), |acc, j| acc * (&x + int(j as i64)));
        prop_assert_eq!(pochhammer(&x, k), direct);
    }

    #[test]
    fn binomial_series_exponents_add(a in small_rational(), b in small_rational()) {
        let lhs = binomial_series(&a, 10).mul(&binomial_series(&b, 10));
        prop_assert_eq!(lhs, binomial_series(&(&a + &b), 10));
    }
}

#[test]
fn series_composition_inverts_the_mobius_map() {
    // u = s/(1+s) and s = u/(1-u) are compositional inverses.
    let o = 12;
    let u = FormalSeries::from_fn(o, |i| if i == 0 { int(0) } else if i % 2 == 1 { int(1) } else { int(-1) });
    let back = FormalSeries::from_fn(o, |i| if i == 0 { int(0) } else { int(1) });
    assert_eq!(back.compose(&u).unwrap(), FormalSeries::variable(o));
}

#[test]
fn symbolic_series_coefficients() {
    // (1+s)^λ has coefficients binom(λ, k).
    let lam = LambdaRat::lambda();
    let s = binomial_series(&lam, 4);
    let x = int(7);
    for k in 0..=4 {
        let want = falling_factorial(&x, k) / (1..=k as i64).fold(int(1), |a, j| a * int(j));
        assert_eq!(s.coeff(k).eval(&x).unwrap(), want);
    }
}

#[test]
fn poles_are_rational_roots_of_the_denominator() {
    let den = LambdaPoly::from_roots(&[rat(1, 2), int(-3)]);
    let r = LambdaRat::new(LambdaPoly::lambda(), den).unwrap();
    let mut poles = r.poles();
    poles.sort();
    assert_eq!(poles, vec![int(-3), rat(1, 2)]);
    assert!(r.eval(&rat(1, 2)).is_err());
}
