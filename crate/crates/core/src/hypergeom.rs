//! Terminating hypergeometric sums and exact checks of the summation and
//! transformation formulas used on the round sphere.
//!
//! All parameters are generic over [`Field`], so every identity can be run
//! either on rational numbers or symbolically on rational functions of λ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{binomial, factorial, falling_factorial, int, pochhammer, rat, Field, FormalSeries, LambdaRat, Rational};
use crate::report::CheckReport;
use crate::{Error, Result};

/// Parameters of `pFq(upper; lower; argument)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperSpec<C> {
    pub upper: Vec<C>,
    pub lower: Vec<C>,
    pub argument: Rational,
}

impl<C: Field> HyperSpec<C> {
    pub fn new(upper: Vec<C>, lower: Vec<C>, argument: Rational) -> Self {
        HyperSpec { upper, lower, argument }
    }

    /// Smallest `m` such that some upper parameter equals `-m`.
    pub fn termination_index(&self) -> Result<usize> {
        self.upper
            .iter()
            .filter_map(|a| a.as_rational())
            .filter_map(|r| crate::exact::non_positive_integer(&r))
            .min()
            .ok_or(Error::NotTerminating)
    }

    /// The terms `t_0, …, t_m` of the terminating sum.
    pub fn terms(&self) -> Result<Vec<C>> {
        let m = self.termination_index()?;
        for (i, b) in self.lower.iter().enumerate() {
            for j in 0..m {
                if b.add(&C::from_int(j as i64)).is_zero() {
                    return Err(Error::VanishingLowerPochhammer { param: i, index: j + 1 });
                }
            }
        }
        let x = C::from_rational(&self.argument);
        let mut terms = Vec::with_capacity(m + 1);
        let mut t = C::one();
        terms.push(t.clone());
        for j in 0..m {
            let shift = C::from_int(j as i64);
            let mut num = x.clone();
            for a in &self.upper {
                num = num.mul(&a.add(&shift));
            }
            let mut den = C::from_int(j as i64 + 1);
            for b in &self.lower {
                den = den.mul(&b.add(&shift));
            }
            t = t.mul(&num).checked_div(&den).expect("lower Pochhammer checked above");
            terms.push(t.clone());
        }
        Ok(terms)
    }
}

/// Exact value of a terminating `pFq`.
pub fn hyper_terminating<C: Field>(spec: &HyperSpec<C>) -> Result<C> {
    Ok(spec.terms()?.iter().fold(C::zero(), |acc, t| acc.add(t)))
}

/// Same sum accumulated from the highest index down.
pub fn hyper_terminating_reversed<C: Field>(spec: &HyperSpec<C>) -> Result<C> {
    Ok(spec.terms()?.iter().rev().fold(C::zero(), |acc, t| acc.add(t)))
}

fn poch_nonzero<C: Field>(x: &C, m: usize) -> Result<C> {
    let p = pochhammer(x, m);
    if p.is_zero() {
        return Err(Error::InvalidParameter(format!("Pochhammer ({x:?})_{m} vanishes")));
    }
    Ok(p)
}

fn div<C: Field>(a: &C, b: &C) -> Result<C> {
    a.checked_div(b).ok_or(Error::DivisionByZero)
}

fn one_half<C: Field>() -> C {
    C::from_rational(&rat(1, 2))
}

fn show<C: std::fmt::Display>(c: &C) -> String {
    c.to_string()
}

fn exact_report<C: Field>(id: &str, relation: &str, lhs: &C, rhs: &C) -> CheckReport {
    CheckReport::exact(id, relation, lhs == rhs).with_sides(&show(lhs), &show(rhs))
}

/// `3F2(-m, a, b; c, 1+a+b-c-m; 1) = (c-a)_m (c-b)_m / ((c)_m (c-a-b)_m)`.
pub fn check_pfaff_saalschutz<C: Field>(a: &C, b: &C, m: usize, c: &C) -> CheckReport {
    let id = "hypergeom.pfaff_saalschutz";
    let rel = "balanced 3F2 summation";
    let run = || -> Result<(C, C)> {
        let e = C::one().add(a).add(b).sub(c).sub(&C::from_int(m as i64));
        let spec = HyperSpec::new(
            vec![C::from_int(-(m as i64)), a.clone(), b.clone()],
            vec![c.clone(), e],
            int(1),
        );
        let lhs = hyper_terminating(&spec)?;
        let num = pochhammer(&c.sub(a), m).mul(&pochhammer(&c.sub(b), m));
        let den = poch_nonzero(c, m)?.mul(&poch_nonzero(&c.sub(a).sub(b), m)?);
        Ok((lhs, div(&num, &den)?))
    };
    let report = match run() {
        Ok((l, r)) => exact_report(id, rel, &l, &r),
        Err(e) => CheckReport::errored(id, rel, &e),
    };
    report
        .param("m", m)
        .param("a", show(a))
        .param("b", show(b))
        .param("c", show(c))
}

/// Sheppard's transformation of a terminating `3F2` at unit argument:
///
/// `3F2(-m,a,b;d,e;1) = (d-a)_m (e-a)_m / ((d)_m (e)_m)
///   · 3F2(-m, a, a+b-m-d-e+1; a-m-d+1, a-m-e+1; 1)`.
pub fn check_sheppard<C: Field>(m: usize, a: &C, b: &C, d: &C, e: &C) -> CheckReport {
    let id = "hypergeom.sheppard";
    let rel = "terminating 3F2 transformation";
    let run = || -> Result<(C, C)> {
        let mm = C::from_int(m as i64);
        let neg_m = C::from_int(-(m as i64));
        let lhs = hyper_terminating(&HyperSpec::new(
            vec![neg_m.clone(), a.clone(), b.clone()],
            vec![d.clone(), e.clone()],
            int(1),
        ))?;
        let one = C::one();
        let transformed = hyper_terminating(&HyperSpec::new(
            vec![neg_m, a.clone(), a.add(b).sub(&mm).sub(d).sub(e).add(&one)],
            vec![a.sub(&mm).sub(d).add(&one), a.sub(&mm).sub(e).add(&one)],
            int(1),
        ))?;
        let pre = div(
            &pochhammer(&d.sub(a), m).mul(&pochhammer(&e.sub(a), m)),
            &poch_nonzero(d, m)?.mul(&poch_nonzero(e, m)?),
        )?;
        Ok((lhs, pre.mul(&transformed)))
    };
    let report = match run() {
        Ok((l, r)) => exact_report(id, rel, &l, &r),
        Err(e) => CheckReport::errored(id, rel, &e),
    };
    report
        .param("m", m)
        .param("a", show(a))
        .param("b", show(b))
        .param("d", show(d))
        .param("e", show(e))
}

/// Terminating case of the `x ↔ 1-x` connection formula:
///
/// `2F1(-m,b;c;x) = (c-b)_m/(c)_m · 2F1(-m,b;-m+b-c+1;1-x)`.
pub fn check_connection_terminating<C: Field>(m: usize, b: &C, c: &C, x: &Rational) -> CheckReport {
    let id = "hypergeom.connection";
    let rel = "terminating 2F1 connection x -> 1-x";
    let run = || -> Result<(C, C)> {
        let neg_m = C::from_int(-(m as i64));
        let lhs = hyper_terminating(&HyperSpec::new(
            vec![neg_m.clone(), b.clone()],
            vec![c.clone()],
            x.clone(),
        ))?;
        let lower = neg_m.add(b).sub(c).add(&C::one());
        let rhs_sum = hyper_terminating(&HyperSpec::new(
            vec![neg_m, b.clone()],
            vec![lower],
            int(1) - x,
        ))?;
        let alpha = div(&pochhammer(&c.sub(b), m), &poch_nonzero(c, m)?)?;
        Ok((lhs, alpha.mul(&rhs_sum)))
    };
    let report = match run() {
        Ok((l, r)) => exact_report(id, rel, &l, &r),
        Err(e) => CheckReport::errored(id, rel, &e),
    };
    report.param("m", m).param("b", show(b)).param("c", show(c)).param("x", x)
}

/// Power series of `2F1(a, b; c; z)` in `z`, truncated at `order`.
pub fn gauss_series<C: Field>(a: &C, b: &C, c: &C, order: usize) -> Result<FormalSeries<C>> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut t = C::one();
    coeffs.push(t.clone());
    for k in 0..order {
        let kk = C::from_int(k as i64);
        let den = c.add(&kk).mul(&C::from_int(k as i64 + 1));
        if den.is_zero() {
            return Err(Error::VanishingLowerPochhammer { param: 0, index: k + 1 });
        }
        t = div(&t.mul(&a.add(&kk)).mul(&b.add(&kk)), &den)?;
        coeffs.push(t.clone());
    }
    Ok(FormalSeries::new(order, coeffs))
}

/// Binomial series `(1 + x)^α`.
pub fn binomial_series<C: Field>(alpha: &C, order: usize) -> FormalSeries<C> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut t = C::one();
    coeffs.push(t.clone());
    for k in 0..order {
        let kk = C::from_int(k as i64);
        t = t
            .mul(&alpha.sub(&kk))
            .checked_div(&C::from_int(k as i64 + 1))
            .expect("k + 1 > 0");
        coeffs.push(t.clone());
    }
    FormalSeries::new(order, coeffs)
}

/// Both sides of the quadratic transformation
/// `2F1(a,b;2b;4x/(1+x)²) = (1+x)^{2a} 2F1(a, a+1/2-b; b+1/2; x²)`
/// as power series in `x`.
pub fn quadratic_transform_sides<C: Field>(
    a: &C,
    b: &C,
    order: usize,
) -> Result<(FormalSeries<C>, FormalSeries<C>)> {
    let two = C::from_int(2);
    // 4x/(1+x)^2 = 4 Σ_{j≥0} (-1)^j (j+1) x^{j+1}
    let z = FormalSeries::from_fn(order, |i| {
        if i == 0 {
            C::zero()
        } else {
            let sign = if (i - 1) % 2 == 0 { 1 } else { -1 };
            C::from_int(4 * sign * i as i64)
        }
    });
    let lhs = gauss_series(a, b, &two.mul(b), order)?.compose(&z)?;
    let half = one_half::<C>();
    let inner = gauss_series(a, &a.add(&half).sub(b), &b.add(&half), order)?
        .compose_with_monomial(2)?;
    let rhs = binomial_series(&two.mul(a), order).mul(&inner);
    if lhs.order() != rhs.order() {
        return Err(Error::OrderMismatch(lhs.order(), rhs.order()));
    }
    Ok((lhs, rhs))
}

pub fn check_quadratic_transform<C: Field>(a: &C, b: &C, order: usize) -> CheckReport {
    let id = "hypergeom.quadratic_transform";
    let rel = "quadratic 2F1 transformation (series)";
    let report = match quadratic_transform_sides(a, b, order) {
        Ok((l, r)) => {
            let first_diff = (0..=order).find(|&i| l.coeff(i) != r.coeff(i));
            let mut rep = CheckReport::exact(id, rel, first_diff.is_none());
            if let Some(i) = first_diff {
                rep = rep
                    .with_sides(&show(&l.coeff(i)), &show(&r.coeff(i)))
                    .with_detail(format!("first differing coefficient at x^{i}"));
            }
            rep
        }
        Err(e) => CheckReport::errored(id, rel, &e),
    };
    report.param("a", show(a)).param("b", show(b)).param("order", order)
}

/// Draw a rational `p/q` with `|p| ≤ height`, `1 ≤ q ≤ height`.
pub fn random_rational<R: Rng>(rng: &mut R, height: i64) -> Rational {
    let p = rng.gen_range(-height..=height);
    let q = rng.gen_range(1..=height);
    rat(p, q)
}

/// `Σ_j C(n, N-j) (-1)^j (n/2)_j (λ)_j / ((λ-n/2+1)_j j!)`, the alternating
/// sum behind the sphere summation formula, summed term by term.
pub fn binomial_weighted_sum(n: i64, big_n: usize) -> LambdaRat {
    let lam = LambdaRat::lambda();
    let low = &lam + &LambdaRat::constant(int(1) - rat(n, 2));
    (0..=big_n)
        .map(|j| {
            let sign = if j % 2 == 0 { int(1) } else { int(-1) };
            let c = binomial(n, (big_n - j) as i64) * sign * pochhammer(&rat(n, 2), j)
                / factorial(j as u64);
            (&pochhammer(&lam, j) / &pochhammer(&low, j)).scale(&c)
        })
        .fold(LambdaRat::zero(), |acc, t| &acc + &t)
}

/// The same sum as `C(n, N) · 3F2(n/2, λ, -N; λ-n/2+1, n-N+1; 1)`. Only
/// defined for `N ≤ n`, where the lower parameter `n-N+1` stays positive.
pub fn binomial_weighted_hyper(n: i64, big_n: usize) -> Result<LambdaRat> {
    let half_n = rat(n, 2);
    let lam = LambdaRat::lambda();
    let spec = HyperSpec::new(
        vec![
            LambdaRat::constant(half_n.clone()),
            lam.clone(),
            LambdaRat::constant(int(-(big_n as i64))),
        ],
        vec![
            &lam + &LambdaRat::constant(int(1) - &half_n),
            LambdaRat::constant(int(n - big_n as i64 + 1)),
        ],
        int(1),
    );
    Ok(hyper_terminating(&spec)?.scale(&binomial(n, big_n as i64)))
}

/// Closed form of [`binomial_weighted_sum`]:
/// `[n/2]_N / N! · (λ-n+2N)(λ-n+1)_{N-1} / (λ-n/2+1)_N`
/// with `[x]_N = x(x-1)⋯(x-N+1)` the falling factorial.
pub fn binomial_weighted_closed(n: i64, big_n: usize) -> LambdaRat {
    weighted_closed_with(n, big_n, falling_factorial(&rat(n, 2), big_n))
}

/// The same expression with the rising factorial `(n/2)_N` in front. Kept
/// for comparison: it agrees with the direct sum only for `N ≤ 1`.
pub fn binomial_weighted_closed_rising(n: i64, big_n: usize) -> LambdaRat {
    weighted_closed_with(n, big_n, pochhammer(&rat(n, 2), big_n))
}

fn weighted_closed_with(n: i64, big_n: usize, front: Rational) -> LambdaRat {
    if big_n == 0 {
        return LambdaRat::one();
    }
    let lam = LambdaRat::lambda();
    let shifted = |c: Rational| &lam + &LambdaRat::constant(c);
    let num = &shifted(int(2 * big_n as i64 - n)) * &pochhammer(&shifted(int(1 - n)), big_n - 1);
    let den = pochhammer(&shifted(int(1) - rat(n, 2)), big_n);
    (&num / &den).scale(&(front / factorial(big_n as u64)))
}

/// Exact check of the binomial-weighted summation formula as an identity of
/// rational functions in λ, together with its 2-balance bookkeeping.
pub fn check_binomial_weighted_sum(n: i64, big_n: usize) -> CheckReport {
    let id = "hypergeom.binomial_weighted_sum";
    let rel = "binomial-weighted 3F2 summation";
    let lam = LambdaRat::lambda();
    let half = LambdaRat::constant(rat(n, 2));
    let low0 = &(&lam - &half) + &LambdaRat::one();
    let low1 = LambdaRat::constant(int(n - big_n as i64 + 1));
    let balanced = &(&half + &lam) + &LambdaRat::constant(int(2 - big_n as i64)) == &low0 + &low1;
    let direct = binomial_weighted_sum(n, big_n);
    let closed = binomial_weighted_closed(n, big_n);
    let mut ok = balanced && direct == closed;
    let mut rep = CheckReport::exact(id, rel, false);
    if !balanced {
        rep = rep.with_detail("balance condition violated");
    }
    if big_n as i64 <= n {
        match binomial_weighted_hyper(n, big_n) {
            Ok(h) if h == direct => {}
            Ok(h) => {
                ok = false;
                rep = rep.with_detail(format!("3F2 form differs: {h}"));
            }
            Err(e) => return CheckReport::errored(id, rel, &e).param("n", n).param("N", big_n),
        }
    }
    rep.passed = ok;
    let report = rep.with_sides(&direct.to_string(), &closed.to_string());
    report.param("n", n).param("N", big_n)
}

/// Lower-minus-upper parameter sum of a `3F2` at unit argument (the balance).
pub fn balance<C: Field>(spec: &HyperSpec<C>) -> C {
    let up = spec.upper.iter().fold(C::zero(), |s, a| s.add(a));
    let low = spec.lower.iter().fold(C::zero(), |s, b| s.add(b));
    low.sub(&up)
}

/// The value `3F2(-N, n/2, -1; n-N-λ, -n/2; 1)` appearing after Sheppard's
/// transformation, compared with `1 + N/(λ-n+N)`.
pub fn check_sheppard_residual_sum(n: i64, big_n: usize, lambda: &Rational) -> CheckReport {
    let id = "hypergeom.sheppard_residual";
    let rel = "two-term 3F2 after Sheppard transformation";
    let nn = int(big_n as i64);
    let spec = HyperSpec::new(
        vec![-nn.clone(), rat(n, 2), int(-1)],
        vec![int(n) - &nn - lambda, rat(-n, 2)],
        int(1),
    );
    let report = match hyper_terminating(&spec) {
        Ok(v) => {
            let closed = int(1) + &nn / (lambda - int(n) + &nn);
            CheckReport::equality(id, rel, &v, &closed)
        }
        Err(e) => CheckReport::errored(id, rel, &e),
    };
    report.param("n", n).param("N", big_n).param("lambda", lambda)
}

/// Whether `(x)_m ≠ 0` for every `x`.
fn pochhammers_nonzero(xs: &[Rational], m: usize) -> bool {
    xs.iter().all(|x| pochhammer(x, m) != int(0))
}

fn numbered(mut report: CheckReport, i: usize) -> CheckReport {
    report.id = format!("{}.random.{i:04}", report.id);
    report
}

const HEIGHT: i64 = 20;

/// Pfaff–Saalschütz on `count` seeded random instances with `m ≤ max_m`.
/// Parameter draws whose Pochhammer denominators vanish are redrawn.
pub fn random_pfaff_saalschutz(count: usize, max_m: usize, seed: u64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5041_4646);
    (0..count)
        .map(|i| loop {
            let m = rng.gen_range(0..=max_m);
            let (a, b, c) = (
                random_rational(&mut rng, HEIGHT),
                random_rational(&mut rng, HEIGHT),
                random_rational(&mut rng, HEIGHT),
            );
            let e = int(1) + &a + &b - &c - int(m as i64);
            if pochhammers_nonzero(&[c.clone(), e, &c - &a - &b], m) {
                break numbered(check_pfaff_saalschutz(&a, &b, m, &c), i);
            }
        })
        .collect()
}

/// Sheppard's transformation on seeded random instances.
pub fn random_sheppard(count: usize, max_m: usize, seed: u64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5348_4550);
    (0..count)
        .map(|i| loop {
            let m = rng.gen_range(0..=max_m);
            let p: Vec<Rational> = (0..4).map(|_| random_rational(&mut rng, HEIGHT)).collect();
            let (a, b, d, e) = (&p[0], &p[1], &p[2], &p[3]);
            let mm = int(m as i64);
            let lowers = [
                d.clone(),
                e.clone(),
                a - &mm - d + int(1),
                a - &mm - e + int(1),
            ];
            if pochhammers_nonzero(&lowers, m) {
                break numbered(check_sheppard(m, a, b, d, e), i);
            }
        })
        .collect()
}

/// Terminating connection formula on seeded random instances.
pub fn random_connection(count: usize, max_m: usize, seed: u64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x434f_4e4e);
    (0..count)
        .map(|i| loop {
            let m = rng.gen_range(0..=max_m);
            let (b, c, x) = (
                random_rational(&mut rng, HEIGHT),
                random_rational(&mut rng, HEIGHT),
                random_rational(&mut rng, HEIGHT),
            );
            let lower = int(-(m as i64)) + &b - &c + int(1);
            if pochhammers_nonzero(&[c.clone(), lower], m) {
                break numbered(check_connection_terminating(m, &b, &c, &x), i);
            }
        })
        .collect()
}
