//! Exact closed forms on the round sphere `Sⁿ`.
//!
//! Everything here is symbolic in λ: families are [`LambdaRat`] and the
//! Q-curvature and V polynomials are [`LambdaPoly`]. Because the holographic
//! coefficients are constant on the sphere and each `T₂ⱼ(λ)` is a polynomial
//! in Δ with constant coefficients, `T₂ⱼ*(λ)(c) = c·T₂ⱼ(λ)(1)`, so every sum
//! reduces to sums of rational functions.
//!
//! An Einstein constant mode (constant `J`, `v(r) = (1 - J r²/(2n))ⁿ`) is also
//! available. It is an extension: every order-`2N` quantity picks up the
//! factor `κᴺ` with `κ = 2J/n`, and the radial oracle checks this scaling
//! independently.

use crate::exact::{
    binomial, factorial, falling_factorial, int, pochhammer, rat, LambdaPoly, LambdaRat, Rational,
};
use crate::hypergeom::binomial_weighted_closed;
use crate::report::CheckReport;
use crate::{Error, Result};

/// `c_N = (-1)ᴺ / (2^{2N} N! (N-1)!)`, the constant in the holographic formula.
pub fn c_n(big_n: usize) -> Result<Rational> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("c_N needs N >= 1".into()));
    }
    let sign = if big_n % 2 == 0 { int(1) } else { int(-1) };
    Ok(sign / (four_pow(big_n) * factorial(big_n as u64) * factorial(big_n as u64 - 1)))
}

fn four_pow(k: usize) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(4u8).pow(k as u32))
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn shifted(c: Rational) -> LambdaRat {
    &LambdaRat::lambda() + &LambdaRat::constant(c)
}

fn poly_shifted(c: Rational) -> LambdaPoly {
    LambdaPoly::shifted_lambda(c)
}

/// Round sphere of radius one, or an Einstein metric with constant `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereContext {
    n: i64,
    j: Rational,
}

impl SphereContext {
    /// Unit round sphere `Sⁿ`: `J = n/2`.
    pub fn new(n: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("sphere dimension {n} < 2")));
        }
        Ok(SphereContext { n, j: rat(n, 2) })
    }

    /// Einstein constant mode with Schouten trace `J` (extension, not part of
    /// the sphere setting). `J = n/2` is the unit sphere.
    pub fn einstein(n: i64, j: Rational) -> Result<Self> {
        let mut ctx = Self::new(n)?;
        ctx.j = j;
        Ok(ctx)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn is_round(&self) -> bool {
        self.j == rat(self.n, 2)
    }

    pub fn j(&self) -> Rational {
        self.j.clone()
    }

    /// `|P|² = J²/n` since `P = (J/n) g`.
    pub fn p_sq(&self) -> Rational {
        &self.j * &self.j / int(self.n)
    }

    pub fn scal(&self) -> Rational {
        int(2 * (self.n - 1)) * &self.j
    }

    /// `κ = 2J/n`; one on the unit sphere.
    pub fn kappa(&self) -> Rational {
        int(2) * &self.j / int(self.n)
    }

    fn kappa_pow(&self, k: usize) -> Rational {
        let kap = self.kappa();
        (0..k).fold(int(1), |acc, _| acc * &kap)
    }

    fn half_n(&self) -> Rational {
        rat(self.n, 2)
    }

    fn in_range(&self, big_n: usize) -> bool {
        self.n % 2 == 1 || 2 * big_n as i64 <= self.n
    }

    /// Holographic coefficient `v_{2N} = (-1)ᴺ C(n, N) / 2^{2N}` (times `κᴺ`).
    pub fn v(&self, big_n: usize) -> Rational {
        sign(big_n) * binomial(self.n, big_n as i64) / four_pow(big_n) * self.kappa_pow(big_n)
    }

    /// `T₂ₙ(λ)(1) = (n/2)_N (λ)_N / (2^{2N} N! (λ-n/2+1)_N)`.
    pub fn t_on_one(&self, big_n: usize) -> LambdaRat {
        let num = pochhammer(&LambdaRat::lambda(), big_n);
        let den = pochhammer(&shifted(int(1) - self.half_n()), big_n);
        let c = pochhammer(&self.half_n(), big_n) * self.kappa_pow(big_n)
            / (four_pow(big_n) * factorial(big_n as u64));
        (&num / &den).scale(&c)
    }

    /// `P₂ₙ(λ)(1) = (-1)ᴺ (n/2)_N (λ)_N`.
    pub fn p_on_one(&self, big_n: usize) -> LambdaPoly {
        let c = sign(big_n) * pochhammer(&self.half_n(), big_n) * self.kappa_pow(big_n);
        pochhammer(&LambdaPoly::lambda(), big_n).scale(&c)
    }

    /// The normalising polynomial `2^{2N} N! (n/2-λ-1)⋯(n/2-λ-N)` relating
    /// `T₂ₙ(λ)` to `P₂ₙ(λ)`.
    pub fn tp_prefactor(&self, big_n: usize) -> LambdaPoly {
        tp_prefactor(self.n, big_n)
    }

    /// Coefficients `a₀, a₁, …, a_{2·order}` of the formal radial solution
    /// `r^λ Σ a_k r^k` of `-Δu = λ(n-λ)u` for the metric
    /// `r⁻²(dr² + w(r)² h)` with `w = 1 - κr²/4`.
    ///
    /// Substituting the series into
    /// `Δu = r^{n+1} w⁻ⁿ (r^{1-n} wⁿ u')'` and multiplying by `w` gives
    /// `D(k) a_k = κ (D(k-2)/4 + (n/2)(λ+k-2)) a_{k-2}` with
    /// `D(k) = k(k+2λ-n)`, and `D(1) a₁ = 0`.
    pub fn radial_oracle(&self, order: usize) -> Result<Vec<LambdaRat>> {
        if order > 16 {
            return Err(Error::InvalidParameter(format!("radial order {order} > 16")));
        }
        let lam = LambdaRat::lambda();
        let n = int(self.n);
        let d = |k: i64| -> LambdaRat {
            // k (k + 2λ - n)
            (&lam.scale(&int(2)) + &LambdaRat::constant(int(k) - &n)).scale(&int(k))
        };
        let kap = LambdaRat::constant(self.kappa());
        let mut a = vec![LambdaRat::one()];
        for k in 1..=(2 * order) as i64 {
            let dk = d(k);
            if dk.is_zero() {
                return Err(Error::DivisionByZero);
            }
            if k == 1 {
                // D(1) a₁ = 0 with D(1) ≢ 0.
                a.push(LambdaRat::zero());
                continue;
            }
            let prev = &a[k as usize - 2];
            let coeff = &d(k - 2).scale(&rat(1, 4))
                + &(&lam + &LambdaRat::constant(int(k - 2))).scale(&self.half_n());
            a.push(&(&(&kap * &coeff) * prev) / &dk);
        }
        Ok(a)
    }

    /// `Σ_{j=0}^N T₂ⱼ*(λ)(v_{2N-2j})` in closed form:
    /// `(-1)ᴺ [n/2]_N / (2^{2N} N!) · (λ-n+2N)(λ-n+1)_{N-1} / (λ-n/2+1)_N`,
    /// where `[x]_N` is the falling factorial.
    pub fn sum_tstar_v(&self, big_n: usize) -> LambdaRat {
        let c = sign(big_n) * self.kappa_pow(big_n) / four_pow(big_n);
        binomial_weighted_closed(self.n, big_n).scale(&c)
    }

    /// The same sum, term by term.
    pub fn sum_tstar_v_direct(&self, big_n: usize) -> LambdaRat {
        (0..=big_n).fold(LambdaRat::zero(), |acc, j| {
            &acc + &self.t_on_one(j).scale(&self.v(big_n - j))
        })
    }

    /// `Σ_{j=0}^N j T₂ⱼ*(λ)(v_{2N-2j})` in closed form:
    /// `(-1)^{N-1}/2^{2N} · [n/2]_N/(N-1)! · λ(λ-n+1)_{N-1}/(λ-n/2+1)_N`.
    pub fn weighted_sum(&self, big_n: usize) -> LambdaRat {
        if big_n == 0 {
            return LambdaRat::zero();
        }
        let c = sign(big_n - 1) * falling_factorial(&self.half_n(), big_n) * self.kappa_pow(big_n)
            / (four_pow(big_n) * factorial(big_n as u64 - 1));
        let num = &LambdaRat::lambda() * &pochhammer(&shifted(int(1 - self.n)), big_n - 1);
        let den = pochhammer(&shifted(int(1) - self.half_n()), big_n);
        (&num / &den).scale(&c)
    }

    pub fn weighted_sum_direct(&self, big_n: usize) -> LambdaRat {
        (0..=big_n).fold(LambdaRat::zero(), |acc, j| {
            &acc + &self.t_on_one(j).scale(&(self.v(big_n - j) * int(j as i64)))
        })
    }

    /// `Π_{k=1}^{N} (λ + n/2 - 2N + k)`, the factor in front of the Q and V
    /// polynomials.
    fn qv_front(&self, big_n: usize) -> LambdaPoly {
        let base = self.half_n() - int(2 * big_n as i64);
        (1..=big_n as i64).fold(LambdaPoly::one(), |acc, k| &acc * &poly_shifted(&base + int(k)))
    }

    fn shift_arg(&self, big_n: usize) -> Rational {
        int(self.n - 2 * big_n as i64)
    }

    /// Q-curvature polynomial from its defining sum:
    /// `-2^{2N} N! Π_{k=1}^N(λ+n/2-2N+k) · Σ_j T₂ⱼ*(λ+n-2N)(v_{2N-2j})`.
    pub fn qres_assembled(&self, big_n: usize) -> Result<LambdaPoly> {
        let sum = self.sum_tstar_v_direct(big_n).shift(&self.shift_arg(big_n));
        let front: LambdaRat = self.qv_front(big_n).into();
        let full = (&front * &sum).scale(&(-four_pow(big_n) * factorial(big_n as u64)));
        full.as_poly()
            .ok_or_else(|| Error::ResidualDenominator(format!("Q-polynomial N={big_n}: {full}")))
    }

    /// Closed form `(-1)^{N-1} Π_{j=0}^{N-1}(n/2-j) · λ · Π_{j=1}^{N-1}(λ-N-j)`.
    pub fn qres(&self, big_n: usize) -> Result<LambdaPoly> {
        if big_n == 0 {
            return Err(Error::InvalidParameter("Q-polynomial needs N >= 1".into()));
        }
        let c = sign(big_n - 1) * falling_factorial(&self.half_n(), big_n) * self.kappa_pow(big_n);
        let roots = (1..big_n as i64).fold(LambdaPoly::lambda(), |acc, j| {
            &acc * &poly_shifted(int(-(big_n as i64) - j))
        });
        Ok(roots.scale(&c))
    }

    /// `V₂ₙ(λ) = Π_{k=1}^N(λ+n/2-2N+k) · Σ_j (2N+2j) T₂ⱼ*(λ+n-2N)(v_{2N-2j})`.
    pub fn v_poly(&self, big_n: usize) -> Result<LambdaPoly> {
        let s = self.sum_tstar_v_direct(big_n).scale(&int(2 * big_n as i64));
        let w = self.weighted_sum_direct(big_n).scale(&int(2));
        let sum = (&s + &w).shift(&self.shift_arg(big_n));
        let full = &LambdaRat::from(self.qv_front(big_n)) * &sum;
        full.as_poly()
            .ok_or_else(|| Error::ResidualDenominator(format!("V-polynomial N={big_n}: {full}")))
    }

    /// `Q₂ₙ` through `P₂ₙ(n/2-N)(1) = (-1)ᴺ (n/2-N) Q₂ₙ`; subcritical only.
    pub fn q_subcritical(&self, big_n: usize) -> Result<Rational> {
        if big_n == 0 {
            return Err(Error::InvalidParameter("Q-curvature needs N >= 1".into()));
        }
        let gap = self.half_n() - int(big_n as i64);
        if gap == int(0) {
            return Err(Error::Unsupported(format!(
                "Q_{} is critical on S^{}; use the critical route",
                2 * big_n,
                self.n
            )));
        }
        let p = self.p_on_one(big_n).eval(&gap);
        Ok(sign(big_n) * p / gap)
    }

    /// `Q₂ₙ` from the holographic formula
    /// `4N c_N Q₂ₙ = Σ_{j<N} (2N-2j) T₂ⱼ*(n/2-N)(v_{2N-2j})`, which at `2N = n`
    /// is the critical formula evaluated at λ = 0.
    pub fn q_holographic(&self, big_n: usize) -> Result<Rational> {
        if !self.in_range(big_n) {
            return Err(Error::InvalidParameter(format!("N={big_n} beyond n/2 for even n={}", self.n)));
        }
        let lam0 = self.half_n() - int(big_n as i64);
        let mut sum = int(0);
        for j in 0..big_n {
            let t = self.t_on_one(j).eval(&lam0)?;
            sum += int(2 * (big_n - j) as i64) * t * self.v(big_n - j);
        }
        Ok(sum / (int(4 * big_n as i64) * c_n(big_n)?))
    }

    /// `Q₂ₙ`: subcritical route where it applies, critical route otherwise.
    pub fn q(&self, big_n: usize) -> Result<Rational> {
        if 2 * big_n as i64 == self.n {
            self.q_holographic(big_n)
        } else {
            self.q_subcritical(big_n)
        }
    }

    /// Expected `Q₂ₙ = (n/2)_N (n/2-N+1)_{N-1}` (times `κᴺ`).
    pub fn q_closed(&self, big_n: usize) -> Rational {
        let h = self.half_n();
        pochhammer(&h, big_n)
            * pochhammer(&(&h - int(big_n as i64) + int(1)), big_n.saturating_sub(1))
            * self.kappa_pow(big_n)
    }

    fn tag(&self, report: CheckReport, big_n: usize) -> CheckReport {
        let report = report.param("n", self.n).param("N", big_n);
        if self.is_round() {
            report
        } else {
            report.param("J", &self.j)
        }
    }

    /// Radial recursion versus the closed form of `T₂ₙ(λ)(1)` for every
    /// `N ≤ max_n`; also confirms the odd coefficients vanish and the poles
    /// lie in `{n/2-1, …, n/2-N}`.
    pub fn check_radial_oracle(&self, max_n: usize) -> Vec<CheckReport> {
        let id = "sphere.radial_recursion";
        let rel = "radial eigenfunction recursion vs closed form of T(λ)(1)";
        let coeffs = match self.radial_oracle(max_n) {
            Ok(c) => c,
            Err(e) => return vec![self.tag(CheckReport::errored(id, rel, &e), max_n)],
        };
        (0..=max_n)
            .map(|big_n| {
                let oracle = &coeffs[2 * big_n];
                let closed = self.t_on_one(big_n);
                let odd_ok = big_n == 0 || coeffs[2 * big_n - 1].is_zero();
                let allowed: Vec<Rational> =
                    (1..=big_n as i64).map(|j| self.half_n() - int(j)).collect();
                let poles_ok = closed.poles_within(&allowed);
                let mut rep = CheckReport::exact(id, rel, oracle == &closed && odd_ok && poles_ok)
                    .with_sides(&oracle.to_string(), &closed.to_string());
                if !odd_ok {
                    rep = rep.with_detail("odd coefficient non-zero");
                } else if !poles_ok {
                    rep = rep.with_detail("pole outside {n/2-1, ..., n/2-N}");
                }
                self.tag(rep, big_n)
            })
            .collect()
    }

    /// `P₂ₙ(λ)(1) = prefactor · T₂ₙ(λ)(1)` as rational functions.
    pub fn check_tp_normalisation(&self, big_n: usize) -> CheckReport {
        let lhs = LambdaRat::from(self.p_on_one(big_n));
        let rhs = &LambdaRat::from(self.tp_prefactor(big_n)) * &self.t_on_one(big_n);
        self.tag(
            CheckReport::equality("sphere.tp_normalisation", "P(λ)(1) = normaliser · T(λ)(1)", &lhs, &rhs),
            big_n,
        )
    }

    pub fn check_sum_tstar_v(&self, big_n: usize) -> CheckReport {
        self.tag(
            CheckReport::equality(
                "sphere.sum_tstar_v",
                "closed form of Σ T*(λ)(v)",
                &self.sum_tstar_v_direct(big_n),
                &self.sum_tstar_v(big_n),
            ),
            big_n,
        )
    }

    pub fn check_weighted_sum(&self, big_n: usize) -> CheckReport {
        self.tag(
            CheckReport::equality(
                "sphere.weighted_sum",
                "closed form of Σ j T*(λ)(v)",
                &self.weighted_sum_direct(big_n),
                &self.weighted_sum(big_n),
            ),
            big_n,
        )
    }

    /// The master relations in all three forms, the degree bound on `V₂ₙ`,
    /// and its vanishing in the critical case.
    pub fn master_check(&self, big_n: usize) -> Vec<CheckReport> {
        let mut out = Vec::new();
        let lam = LambdaRat::lambda();
        let s = self.sum_tstar_v_direct(big_n);
        let w = self.weighted_sum_direct(big_n);
        let nn = int(big_n as i64);
        let gap = shifted(int(2 * big_n as i64 - self.n));

        // λN S + (λ-n+2N) W = 0
        let m3 = &(&lam * &s).scale(&nn) + &(&gap * &w);
        out.push(self.tag(
            CheckReport::equality("sphere.master.weighted_form", "λN·S + (λ-n+2N)·W = 0", &m3, &LambdaRat::zero()),
            big_n,
        ));

        // (λ-n+2N) Σ(2N+2j)T*(v) = -2N(n-2N) S
        let lhs = &gap * &(&s.scale(&int(2 * big_n as i64)) + &w.scale(&int(2)));
        let rhs = s.scale(&(int(-2 * big_n as i64) * int(self.n - 2 * big_n as i64)));
        out.push(self.tag(
            CheckReport::equality("sphere.master.split_form", "(λ-n+2N)·Σ(2N+2j)T*(v) = -2N(n-2N)·S", &lhs, &rhs),
            big_n,
        ));

        let polys = self.qres_assembled(big_n).and_then(|q| Ok((q, self.v_poly(big_n)?)));
        match polys {
            Ok((q, v)) => {
                // 2^{2N-2} (N-1)! λ V = (n/2-N) Q
                let c = four_pow(big_n - 1) * factorial(big_n as u64 - 1);
                let lhs = (&LambdaPoly::lambda() * &v).scale(&c);
                let rhs = q.scale(&(self.half_n() - &nn));
                out.push(self.tag(
                    CheckReport::equality("sphere.master.polynomial_form", "2^{2N-2}(N-1)! λ V(λ) = (n/2-N) Q(λ)", &lhs, &rhs),
                    big_n,
                ));
                let deg_ok = v.degree().map_or(true, |d| d + 1 <= big_n);
                out.push(self.tag(
                    CheckReport::exact("sphere.v_poly.degree", "deg V ≤ N-1", deg_ok)
                        .with_detail(format!("V(λ) = {v}")),
                    big_n,
                ));
                out.push(self.tag(
                    CheckReport::equality("sphere.qres.vanishes_at_zero", "Q(0) = 0", &q.eval(&int(0)), &int(0)),
                    big_n,
                ));
                if 2 * big_n as i64 == self.n {
                    out.push(self.tag(
                        CheckReport::equality("sphere.v_poly.critical_vanishing", "V_n(λ) ≡ 0", &v, &LambdaPoly::zero()),
                        big_n,
                    ));
                }
            }
            Err(e) => out.push(self.tag(CheckReport::errored("sphere.master.polynomial_form", "polynomial assembly", &e), big_n)),
        }
        out
    }

    /// The closed product form of the Q-polynomial against its defining sum,
    /// plus the root structure `{0, N+1, …, 2N-1}`.
    pub fn check_qres(&self, big_n: usize) -> Vec<CheckReport> {
        let id = "sphere.qres.closed_form";
        let rel = "closed product form of Q(λ) vs defining sum";
        let (closed, assembled) = match self.qres(big_n).and_then(|c| Ok((c, self.qres_assembled(big_n)?))) {
            Ok(p) => p,
            Err(e) => return vec![self.tag(CheckReport::errored(id, rel, &e), big_n)],
        };
        let mut roots: Vec<Rational> = vec![int(0)];
        roots.extend((big_n as i64 + 1..2 * big_n as i64).map(int));
        let mut found = closed.rational_roots();
        found.sort();
        let root_ok = closed.degree() == Some(big_n) && found == roots;
        vec![
            self.tag(CheckReport::equality(id, rel, &assembled, &closed), big_n),
            self.tag(
                CheckReport::exact("sphere.qres.roots", "roots of Q(λ) are 0, N+1, …, 2N-1", root_ok)
                    .with_detail(format!("Q(λ) = {closed}")),
                big_n,
            ),
        ]
    }

    /// All routes to `Q₂ₙ` against the closed value.
    pub fn check_q(&self, big_n: usize) -> Vec<CheckReport> {
        let closed = self.q_closed(big_n);
        let mut out = Vec::new();
        let routes: [(&str, &str, Result<Rational>); 2] = [
            ("sphere.q.constant_term", "Q from P(n/2-N)(1)", if 2 * big_n as i64 == self.n {
                Err(Error::Unsupported("critical".into()))
            } else {
                self.q_subcritical(big_n)
            }),
            ("sphere.q.holographic", "Q from the holographic formula", self.q_holographic(big_n)),
        ];
        for (id, rel, val) in routes {
            match val {
                Ok(v) => out.push(self.tag(CheckReport::equality(id, rel, &v, &closed), big_n)),
                Err(Error::Unsupported(_)) => {}
                Err(e) => out.push(self.tag(CheckReport::errored(id, rel, &e), big_n)),
            }
        }
        out
    }

    /// Every exact sphere check for one `N`.
    pub fn checks(&self, big_n: usize) -> Vec<CheckReport> {
        let mut out = vec![
            self.check_tp_normalisation(big_n),
            self.check_sum_tstar_v(big_n),
            self.check_weighted_sum(big_n),
        ];
        out.extend(self.master_check(big_n));
        out.extend(self.check_qres(big_n));
        out.extend(self.check_q(big_n));
        out
    }
}

/// `2^{2N} N! (n/2-λ-1)⋯(n/2-λ-N)`.
pub fn tp_prefactor(n: i64, big_n: usize) -> LambdaPoly {
    let half = rat(n, 2);
    (1..=big_n as i64).fold(LambdaPoly::constant(four_pow(big_n) * factorial(big_n as u64)), |acc, j| {
        // n/2 - j - λ
        &acc * &LambdaPoly::new(vec![&half - int(j), int(-1)])
    })
}
