//! λ-dependent operator families as exact term lists.
//!
//! An operator is `Σ c(λ) · w` where `c` is a rational function of λ and `w`
//! a word in the geometric [`Primitive`]s. Coefficients stay exact until the
//! operator is applied at a concrete λ, so pole bookkeeping, normalisation,
//! λ-derivatives and formal adjoints are all done symbolically.

use std::collections::BTreeMap;
use std::fmt;

use crate::exact::{int, rat, to_f64, LambdaPoly, LambdaRat, Rational};
use crate::geometry::{Field, GridGeometry, LinearOp, Primitive};
use crate::sphere::tp_prefactor;
use crate::{Error, Result};

/// A word of primitives, outermost first: `[A, B]` acts as `A ∘ B`. The
/// empty word is the identity.
pub type Word = Vec<Primitive>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaOperator {
    n: i64,
    terms: BTreeMap<Word, LambdaRat>,
}

impl LambdaOperator {
    pub fn zero(n: i64) -> Self {
        LambdaOperator { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: i64) -> Self {
        Self::zero(n).with_term(LambdaRat::one(), vec![])
    }

    /// Adds `c · word`, merging with an existing term of the same word.
    pub fn with_term(mut self, c: LambdaRat, word: Word) -> Self {
        let sum = match self.terms.remove(&word) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(word, sum);
        }
        self
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LambdaRat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        other.terms.iter().fold(self.clone(), |acc, (w, c)| acc.with_term(c.clone(), w.clone()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&LambdaRat::constant(int(-1))))
    }

    /// Multiply every coefficient by `r(λ)`.
    pub fn scale(&self, r: &LambdaRat) -> Self {
        self.map_coeffs(|c| c * r)
    }

    /// The family `λ ↦ self(λ + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        self.map_coeffs(|r| r.shift(c))
    }

    /// Exact `d/dλ`; words carry no λ so this is coefficient-wise.
    pub fn derivative(&self) -> Self {
        self.map_coeffs(|c| c.derivative())
    }

    /// Formal adjoint: reverse every word and replace each primitive by its
    /// integrated-by-parts adjoint.
    pub fn adjoint(&self) -> Self {
        self.terms.iter().fold(Self::zero(self.n), |acc, (w, c)| {
            acc.with_term(c.clone(), w.iter().rev().map(|p| p.analytic_adjoint()).collect())
        })
    }

    fn map_coeffs(&self, f: impl Fn(&LambdaRat) -> LambdaRat) -> Self {
        self.terms.iter().fold(Self::zero(self.n), |acc, (w, c)| acc.with_term(f(c), w.clone()))
    }

    /// Sorted, de-duplicated rational poles of all coefficients.
    pub fn poles(&self) -> Vec<Rational> {
        let mut p: Vec<Rational> = self.terms.values().flat_map(|c| c.poles()).collect();
        p.sort();
        p.dedup();
        p
    }

    /// Whether every coefficient is a polynomial in λ.
    pub fn is_polynomial(&self) -> bool {
        self.terms.values().all(|c| c.as_poly().is_some())
    }

    /// Coefficients evaluated at λ; refuses poles.
    pub fn coefficients_at(&self, lambda: &Rational) -> Result<Vec<(&Word, f64)>> {
        self.terms.iter().map(|(w, c)| Ok((w, to_f64(&c.eval(lambda)?)))).collect()
    }

    /// Apply the operator at λ to a field.
    pub fn apply(&self, geom: &GridGeometry, lambda: &Rational, f: &Field) -> Result<Field> {
        self.check_dim(geom)?;
        geom.chart().check(f)?;
        let coeffs = self.coefficients_at(lambda)?;
        let mut out = geom.chart().zeros();
        for (w, c) in coeffs {
            out = &out + &apply_word(geom, w, f).scale(c);
        }
        Ok(out)
    }

    /// The operator at λ as a matrix-free grid operator.
    pub fn at(&self, geom: &GridGeometry, lambda: &Rational) -> Result<LinearOp> {
        self.check_dim(geom)?;
        let terms = self
            .coefficients_at(lambda)?
            .into_iter()
            .map(|(w, c)| {
                let ops = w.iter().map(|p| geom.primitive(*p).clone()).collect();
                LinearOp::Compose(ops).scaled(c)
            })
            .collect();
        Ok(LinearOp::Sum(terms))
    }

    /// Discrete adjoint of [`at`](Self::at) for the grid inner product.
    pub fn discrete_adjoint_at(&self, geom: &GridGeometry, lambda: &Rational) -> Result<LinearOp> {
        Ok(geom.adjoint(&self.at(geom, lambda)?))
    }

    /// `d/dλ` of the family at `λ₀` as a grid operator.
    pub fn lambda_derivative(&self, geom: &GridGeometry, lambda0: &Rational) -> Result<LinearOp> {
        self.derivative().at(geom, lambda0)
    }

    /// Applies the family to `f` keeping λ symbolic.
    pub fn apply_symbolic(&self, geom: &GridGeometry, f: &Field) -> Result<RatField> {
        self.check_dim(geom)?;
        geom.chart().check(f)?;
        let denom = self.terms.values().fold(LambdaPoly::one(), |acc, c| lcm(&acc, c.denom()));
        let mut numer: Vec<Field> = Vec::new();
        for (w, c) in &self.terms {
            let (mult, _) = denom.div_rem(c.denom())?;
            let p = c.numer() * &mult;
            let wf = apply_word(geom, w, f);
            for (k, a) in p.coeffs().iter().enumerate() {
                if numer.len() <= k {
                    numer.resize(k + 1, geom.chart().zeros());
                }
                numer[k] = &numer[k] + &wf.scale(to_f64(a));
            }
        }
        Ok(RatField { numer, denom })
    }

    /// Exact value on the constant function 1 when `J` and `|P|²` are
    /// constant: every derivative primitive annihilates constants.
    pub fn on_constant(&self, j: &Rational, psq: &Rational) -> LambdaRat {
        self.terms.iter().fold(LambdaRat::zero(), |acc, (w, c)| {
            let value = w.iter().try_fold(int(1), |v, p| match p {
                Primitive::MulJ => Some(v * j),
                Primitive::MulPsq => Some(v * psq),
                _ => None,
            });
            match value {
                Some(v) => &acc + &c.scale(&v),
                None => acc,
            }
        })
    }

    fn check_dim(&self, geom: &GridGeometry) -> Result<()> {
        if geom.n() as i64 != self.n {
            return Err(Error::ChartMismatch(format!(
                "operator built for n={} applied on an n={} geometry",
                self.n,
                geom.n()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for LambdaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let word: Vec<&str> = w.iter().map(|p| p.symbol()).collect();
            let word = if word.is_empty() { "Id".to_string() } else { word.join("∘") };
            write!(f, "({c})·{word}")?;
        }
        Ok(())
    }
}

fn apply_word(geom: &GridGeometry, word: &Word, f: &Field) -> Field {
    word.iter().rev().fold(f.clone(), |acc, p| geom.primitive(*p).apply(geom.chart(), &acc))
}

fn lcm(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let g = a.gcd(b);
    let (q, _) = (a * b).div_rem(&g).expect("gcd of non-zero polynomials is non-zero");
    q.monic()
}

/// `(λ - a)` as a rational function.
fn lin(a: Rational) -> LambdaRat {
    LambdaPoly::shifted_lambda(-a).into()
}

/// `T₂(λ) = (Δ - λJ) / (2(n-2-2λ))`.
pub fn build_t2(n: i64) -> LambdaOperator {
    let lam = LambdaRat::lambda();
    let pre = LambdaPoly::linear(int(-4), int(2 * (n - 2))).into();
    let pre = (&LambdaRat::one() / &pre).reduced();
    LambdaOperator::zero(n)
        .with_term(LambdaRat::one(), vec![Primitive::Lap])
        .with_term(-lam, vec![Primitive::MulJ])
        .scale(&pre)
}

/// `T₄(λ) = [(Δ-(λ+2)J)(Δ-λJ) + λ(2λ-n+2)|P|² + 2(2λ-n+2)δ(Pd)
///          + (2λ-n+2)(dJ,d)] / (8(n-2-2λ)(n-4-2λ))`.
pub fn build_t4(n: i64) -> LambdaOperator {
    use Primitive::*;
    let lam = LambdaRat::lambda();
    let lam2 = lin(int(-2));
    let s = lin(rat(n - 2, 2)).scale(&int(2)); // 2λ - n + 2
    let bracket = LambdaOperator::zero(n)
        .with_term(LambdaRat::one(), vec![Lap, Lap])
        .with_term(-lam.clone(), vec![Lap, MulJ])
        .with_term(-lam2.clone(), vec![MulJ, Lap])
        .with_term(&lam2 * &lam, vec![MulJ, MulJ])
        .with_term(&lam * &s, vec![MulPsq])
        .with_term(s.scale(&int(2)), vec![SchoutenDivGrad])
        .with_term(s, vec![GradPairJ]);
    let den = (&lin(rat(n - 2, 2)) * &lin(rat(n - 4, 2))).scale(&int(32));
    bracket.scale(&(&LambdaRat::one() / &den))
}

/// `T₂ₙ(λ)` for `N ∈ {0, 1, 2}`; `T₀ = Id`.
pub fn build_t2n(n: i64, big_n: usize) -> Result<LambdaOperator> {
    match big_n {
        0 => Ok(LambdaOperator::identity(n)),
        1 => Ok(build_t2(n)),
        2 => Ok(build_t4(n)),
        _ => Err(Error::Unsupported(format!(
            "T_{} is only available in the exact sphere/Einstein setting",
            2 * big_n
        ))),
    }
}

/// `P₂ₙ(λ) = 2^{2N} N! (n/2-λ-1)⋯(n/2-λ-N) · T₂ₙ(λ)`, asserting that all
/// denominators cancel.
pub fn build_p2n(n: i64, big_n: usize) -> Result<LambdaOperator> {
    if !(1..=2).contains(&big_n) {
        return Err(Error::InvalidParameter(format!("P_2N needs N in {{1, 2}}, got {big_n}")));
    }
    let p = build_t2n(n, big_n)?.scale(&tp_prefactor(n, big_n).into());
    if let Some((w, c)) = p.terms().find(|(_, c)| c.as_poly().is_none()) {
        return Err(Error::ResidualDenominator(format!("P_{} term {w:?}: {c}", 2 * big_n)));
    }
    Ok(p)
}

/// The GJMS operator `P₂ₙ = P₂ₙ(n/2 - N)` on a grid.
pub fn gjms(geom: &GridGeometry, big_n: usize) -> Result<LinearOp> {
    let n = geom.n() as i64;
    if n < 2 * big_n as i64 {
        return Err(Error::InvalidParameter(format!("GJMS P_{} needs n >= {}", 2 * big_n, 2 * big_n)));
    }
    build_p2n(n, big_n)?.at(geom, &(rat(n, 2) - int(big_n as i64)))
}

/// A field depending rationally on λ: `Σ_k λᵏ F_k / D(λ)` with an exact
/// denominator.
#[derive(Clone, Debug)]
pub struct RatField {
    numer: Vec<Field>,
    denom: LambdaPoly,
}

impl RatField {
    pub fn denom(&self) -> &LambdaPoly {
        &self.denom
    }

    pub fn numer_at(&self, lambda: f64) -> Option<Field> {
        let mut it = self.numer.iter().rev();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, c| &acc.scale(lambda) + c))
    }

    fn numer_derivative_at(&self, lambda: f64) -> Option<Field> {
        let d: Vec<Field> = self.numer.iter().enumerate().skip(1).map(|(k, c)| c.scale(k as f64)).collect();
        RatField { numer: d, denom: LambdaPoly::one() }.numer_at(lambda)
    }

    fn denom_at(&self, lambda: &Rational) -> Result<f64> {
        let d = self.denom.eval(lambda);
        if d == int(0) {
            return Err(Error::Pole(lambda.to_string()));
        }
        Ok(to_f64(&d))
    }

    pub fn eval(&self, lambda: &Rational, zero: &Field) -> Result<Field> {
        let d = self.denom_at(lambda)?;
        Ok(self.numer_at(to_f64(lambda)).unwrap_or_else(|| zero.clone()).scale(1.0 / d))
    }

    /// `d/dλ` by the quotient rule; refuses poles.
    pub fn derivative_at(&self, lambda: &Rational, zero: &Field) -> Result<Field> {
        let d = self.denom_at(lambda)?;
        let dd = to_f64(&self.denom.derivative().eval(lambda));
        let x = to_f64(lambda);
        let num = self.numer_at(x).unwrap_or_else(|| zero.clone());
        let dnum = self.numer_derivative_at(x).unwrap_or_else(|| zero.clone());
        Ok(&dnum.scale(1.0 / d) - &num.scale(dd / (d * d)))
    }

    /// Cancels a root `λ₀` of the denominator against the numerator.
    /// Returns the reduced field and the numerator's remainder at `λ₀`,
    /// which is zero exactly when the singularity is removable.
    pub fn cancel_root(&self, lambda0: &Rational, zero: &Field) -> Result<(RatField, Field)> {
        let (denom, r) = self.denom.div_rem(&LambdaPoly::shifted_lambda(-lambda0.clone()))?;
        if !r.is_zero() {
            return Err(Error::InvalidParameter(format!("λ = {lambda0} is not a pole")));
        }
        let x0 = to_f64(lambda0);
        let Some((top, rest)) = self.numer.split_last() else {
            return Ok((RatField { numer: vec![], denom }, zero.clone()));
        };
        // Synthetic division from the top coefficient down.
        let mut q = vec![top.clone()];
        for c in rest.iter().rev() {
            let next = c + &q.last().expect("non-empty").scale(x0);
            q.push(next);
        }
        let remainder = q.pop().expect("non-empty");
        q.reverse();
        Ok((RatField { numer: q, denom }, remainder))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets::{preset_metric, random_test_field};
    use crate::geometry::TorusChart;
    use crate::sphere::SphereContext;

    fn geom(n: usize, size: usize, preset: &str) -> GridGeometry {
        let c = TorusChart::square(n, size).unwrap();
        GridGeometry::new(preset_metric(&c, preset, 3).unwrap())
    }

    fn rel(a: &Field, b: &Field) -> f64 {
        a.max_diff(b) / a.max_abs().max(b.max_abs()).max(1e-300)
    }

    #[test]
    fn t2_examples() {
        let g = geom(4, 32, "trig1");
        let one = g.chart().constant(1.0);
        assert!(build_t2(4).apply(&g, &int(0), &one).unwrap().max_abs() < 1e-13);
        let s = SphereContext::new(4).unwrap();
        let t = build_t2(4).on_constant(&s.j(), &s.p_sq());
        assert_eq!(t, s.t_on_one(1));
        assert_eq!(t.eval(&int(3)).unwrap(), rat(3, 4));

        let flat = geom(5, 64, "flat");
        let f = flat.chart().sample(|x, _| x.sin());
        let got = build_t2(5).apply(&flat, &int(1), &f).unwrap();
        assert!(rel(&got, &f.scale(-0.5)) < 1e-7);
    }

    #[test]
    fn t4_examples() {
        let flat = geom(6, 64, "flat");
        let f = flat.chart().sample(|x, _| x.sin());
        let lam = rat(1, 3);
        let l = 1.0 / 3.0;
        let got = build_t4(6).apply(&flat, &lam, &f).unwrap();
        let want = f.scale(1.0 / (8.0 * (4.0 - 2.0 * l) * (2.0 - 2.0 * l)));
        assert!(rel(&got, &want) < 1e-7);

        let g = geom(4, 32, "trig2");
        let one = g.chart().constant(1.0);
        assert!(build_t4(4).apply(&g, &rat(-1, 2), &one).is_ok());
        let zero_at_0 = build_t4(5).apply(&geom(5, 32, "trig2"), &int(0), &geom(5, 32, "trig2").chart().constant(1.0));
        assert!(zero_at_0.unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn constant_values_match_sphere() {
        for n in 3..=12 {
            for big_n in 0..=2 {
                let s = SphereContext::new(n).unwrap();
                let t = build_t2n(n, big_n).unwrap();
                assert_eq!(t.on_constant(&s.j(), &s.p_sq()), s.t_on_one(big_n), "n={n} N={big_n}");
                assert!(t.poles().iter().all(|p| (1..=big_n as i64).any(|j| *p == rat(n, 2) - int(j))));
                if big_n > 0 {
                    let p = build_p2n(n, big_n).unwrap();
                    assert_eq!(p.on_constant(&s.j(), &s.p_sq()), s.p_on_one(big_n).into());
                }
            }
        }
        // Einstein scaling
        let e = SphereContext::einstein(5, rat(7, 3)).unwrap();
        assert_eq!(build_t4(5).on_constant(&e.j(), &e.p_sq()), e.t_on_one(2));
    }

    #[test]
    fn p2n_is_the_bracket() {
        use Primitive::*;
        let n = 7;
        let lam = LambdaRat::lambda();
        let p2 = LambdaOperator::zero(n)
            .with_term(LambdaRat::one(), vec![Lap])
            .with_term(-lam.clone(), vec![MulJ]);
        assert_eq!(build_p2n(n, 1).unwrap(), p2);
        let p4 = build_p2n(n, 2).unwrap();
        assert!(p4.is_polynomial());
        let lead = p4.terms().find(|(w, _)| **w == vec![Lap, Lap]).unwrap().1;
        assert_eq!(*lead, LambdaRat::one());
        // (2λ - n + 2) coefficient of (dJ, d)
        let gpj = p4.terms().find(|(w, _)| **w == vec![GradPairJ]).unwrap().1;
        assert_eq!(*gpj, LambdaPoly::linear(int(2), int(2 - n)).into());
        assert!(build_p2n(n, 3).is_err());
    }

    #[test]
    fn tp_consistency() {
        for n in [3, 4, 5, 8] {
            for big_n in 1..=2 {
                let pre: LambdaRat = tp_prefactor(n, big_n).into();
                let t = build_t2n(n, big_n).unwrap();
                let p = build_p2n(n, big_n).unwrap();
                assert_eq!(t.scale(&pre), p);
                assert_eq!(p.scale(&(&LambdaRat::one() / &pre)), t);
            }
        }
    }

    #[test]
    fn poles_are_refused() {
        let g = geom(6, 16, "flat");
        let one = g.chart().constant(1.0);
        assert!(matches!(build_t2(6).apply(&g, &int(2), &one), Err(Error::Pole(_))));
        assert!(matches!(build_t4(6).apply(&g, &int(1), &one), Err(Error::Pole(_))));
        assert!(build_t4(6).apply(&g, &rat(3, 2), &one).is_ok());
        assert!(matches!(build_t2(5).apply(&g, &int(0), &one), Err(Error::ChartMismatch(_))));
    }

    #[test]
    fn gjms_examples() {
        let c = TorusChart::square(4, 32).unwrap();
        let flat = GridGeometry::new(crate::geometry::ConformalMetric::flat(c.clone()));
        let f = random_test_field(&c, 1);
        let p4 = gjms(&flat, 2).unwrap().apply(&c, &f);
        let lap2 = flat.laplacian(&flat.laplacian(&f).unwrap()).unwrap();
        assert!(rel(&p4, &lap2) < 1e-12);

        // Yamabe operator on sphere constants: -(n/2-1)(n/2)
        for n in 3..=8 {
            let s = SphereContext::new(n).unwrap();
            let lam = rat(n, 2) - int(1);
            let v = build_p2n(n, 1).unwrap().on_constant(&s.j(), &s.p_sq()).eval(&lam).unwrap();
            assert_eq!(v, -(rat(n, 2) - int(1)) * rat(n, 2));
        }
    }

    #[test]
    fn lambda_derivative_matches_finite_differences() {
        let g = geom(5, 32, "trig2");
        let f = random_test_field(g.chart(), 2);
        let t4 = build_t4(5);
        let h = 1e-5;
        for lam in [rat(1, 3), int(5), int(-2), rat(7, 2), rat(-5, 7)] {
            let d = t4.lambda_derivative(&g, &lam).unwrap().apply(g.chart(), &f);
            let x = to_f64(&lam);
            let at = |x: f64| {
                let coeffs: Vec<(Word, f64)> =
                    t4.terms().map(|(w, c)| (w.clone(), c.eval_f64(x))).collect();
                coeffs.iter().fold(g.chart().zeros(), |acc, (w, c)| &acc + &apply_word(&g, w, &f).scale(*c))
            };
            let fd = (&at(x + h) - &at(x - h)).scale(0.5 / h);
            assert!(rel(&d, &fd) < 1e-6, "λ={lam}: {}", rel(&d, &fd));
        }
        let dp2 = build_p2n(5, 1).unwrap().derivative();
        assert_eq!(dp2, LambdaOperator::zero(5).with_term(LambdaRat::constant(int(-1)), vec![Primitive::MulJ]));
    }

    #[test]
    fn p4_dot_on_one_at_zero_in_dimension_four() {
        let g = geom(4, 64, "trig1");
        let one = g.chart().constant(1.0);
        let got = build_p2n(4, 2).unwrap().lambda_derivative(&g, &int(0)).unwrap().apply(g.chart(), &one);
        let j = g.j();
        let want = &(&(j * j).scale(2.0) - &g.psq().scale(2.0)) - g.lap_j();
        assert!(rel(&got, &want) < 1e-12);
    }

    #[test]
    fn symbolic_application_and_removable_pole() {
        let g = geom(4, 32, "trig2");
        let one = g.chart().constant(1.0);
        let zero = g.chart().zeros();
        let t4s = build_t4(4).adjoint();
        let sym = t4s.apply_symbolic(&g, &one).unwrap();
        let lam = rat(1, 3);
        assert!(rel(&sym.eval(&lam, &zero).unwrap(), &t4s.apply(&g, &lam, &one).unwrap()) < 1e-12);
        assert!(matches!(sym.eval(&int(0), &zero), Err(Error::Pole(_))));

        let (reg, rem) = sym.cancel_root(&int(0), &zero).unwrap();
        let scale = sym.numer_at(1.0).unwrap().max_abs();
        assert!(rem.max_abs() < 1e-12 * scale);
        let d0 = reg.derivative_at(&int(0), &zero).unwrap();
        let h = 1e-3;
        let fd = (&sym.eval(&rat(1, 1000), &zero).unwrap() - &sym.eval(&rat(-1, 1000), &zero).unwrap()).scale(0.5 / h);
        assert!(rel(&d0, &fd) < 1e-5);
        assert!(reg.cancel_root(&int(0), &zero).is_err());
    }

    #[test]
    fn adjoint_is_word_reversal() {
        use Primitive::*;
        let t = LambdaOperator::zero(4)
            .with_term(LambdaRat::one(), vec![Lap, MulJ])
            .with_term(LambdaRat::lambda(), vec![GradPairJ, MulPsq]);
        let want = LambdaOperator::zero(4)
            .with_term(LambdaRat::one(), vec![MulJ, Lap])
            .with_term(LambdaRat::lambda(), vec![MulPsq, GradPairJAdjoint]);
        assert_eq!(t.adjoint(), want);
        assert_eq!(t.adjoint().adjoint(), t);
    }
}
