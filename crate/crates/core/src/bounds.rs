//! Right-hand-side shapes of the moment and smooth-sum estimates, the regime
//! comparison between the improved and the standard moment bound, the
//! major-arc classifier, and exact left-hand sides for the two sum lemmas.
//!
//! Every shape is evaluated literally: `epsilon` and the implicit constant
//! are explicit inputs (defaults 0 and 1), and `log` is the natural log.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::{convergents, dist_to_nearest_int, nearest_for_denominator, Rational, RationalApprox};
use crate::error::{Error, Result};
use crate::summation::Neumaier;
use crate::vinogradov::Budget;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentSet {
    pub k: u32,
    pub s0: u32,
    pub s1: u32,
    pub s2: u32,
    /// `1 - s0/s1`, defined for `k >= 3`.
    pub sigma: Option<Rational>,
    /// `1/((k-2)(k-3)+2)`, defined for `k >= 3`.
    pub rho: Option<Rational>,
    /// `1/((k-1)(k-2))`, defined for `k >= 3`.
    pub tau: Option<Rational>,
    /// `1/((k-1)(k-2)+2)`.
    pub omega: Rational,
}

pub fn exponents(k: u32) -> Result<ExponentSet> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be >= 2")));
    }
    let ki = k as i128;
    let s0 = (ki - 1) * (ki - 2) / 2 + 1;
    let s1 = ki * (ki - 1) / 2;
    let s2 = s1 + 1;
    let ge3 = |v: Result<Rational>| -> Result<Option<Rational>> {
        if k >= 3 {
            v.map(Some)
        } else {
            Ok(None)
        }
    };
    let sigma = ge3(Rational::new(s1 - s0, s1))?;
    let rho = ge3(Rational::new(1, (ki - 2) * (ki - 3) + 2))?;
    let tau = ge3(Rational::new(1, (ki - 1) * (ki - 2).max(1)))?;
    let omega = Rational::new(1, (ki - 1) * (ki - 2) + 2)?;
    debug_assert_eq!(2 * s0, ki * (ki - 1) - 2 * ki + 4);
    Ok(ExponentSet {
        k,
        s0: s0 as u32,
        s1: s1 as u32,
        s2: s2 as u32,
        sigma,
        rho,
        tau,
        omega,
    })
}

/// Estimates whose right-hand sides are available. The order is the tie
/// break order used by [`best_theorem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Classical Weyl sum estimate for a single sum.
    WeylClassic,
    /// Moment estimate with the modified Weyl step, exponent `1/(2 s0)`.
    Improved,
    /// Moment estimate by the standard approach, exponent `1/(2 s1)`.
    Standard,
    /// Moment estimate using a second approximation `v/w`, exponent `1/(2 s2)`.
    SecondImproved,
    /// Conjectured moment bound.
    Conjectured,
    /// Smooth-sum moment bound built on the improved estimate.
    SmoothImproved,
    /// Smooth-sum moment bound built on the standard estimate.
    SmoothStandard,
    /// Single smooth sum, `k`-th derivative test.
    HeathBrown,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::WeylClassic,
        Theorem::Improved,
        Theorem::Standard,
        Theorem::SecondImproved,
        Theorem::Conjectured,
        Theorem::SmoothImproved,
        Theorem::SmoothStandard,
        Theorem::HeathBrown,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::WeylClassic => "weyl_classic",
            Theorem::Improved => "improved",
            Theorem::Standard => "standard",
            Theorem::SecondImproved => "second_improved",
            Theorem::Conjectured => "conjectured",
            Theorem::SmoothImproved => "smooth_improved",
            Theorem::SmoothStandard => "smooth_standard",
            Theorem::HeathBrown => "heath_brown",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeInput {
    pub k: u32,
    pub x: f64,
    pub t: f64,
    pub z: u64,
    pub q: u64,
    pub w: Option<u64>,
    pub epsilon: f64,
    pub constant: f64,
}

impl RegimeInput {
    pub fn new(k: u32, x: f64, t: f64, z: u64, q: u64) -> Self {
        RegimeInput {
            k,
            x,
            t,
            z,
            q,
            w: None,
            epsilon: 0.0,
            constant: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.x > 1.0) || !self.x.is_finite() {
            return bad("x must be > 1");
        }
        if !(self.t >= 1.0) || !self.t.is_finite() {
            return bad("T must be >= 1");
        }
        if self.z == 0 || self.q == 0 {
            return bad("z and q must be positive");
        }
        check_eps_const(self.epsilon, self.constant)
    }
}

fn check_eps_const(epsilon: f64, constant: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter("epsilon must be >= 0".into()));
    }
    if !(constant > 0.0) || !constant.is_finite() {
        return Err(Error::InvalidParameter("constant must be > 0".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketTerm {
    pub label: &'static str,
    pub value: f64,
}

fn term(label: &'static str, value: f64) -> BracketTerm {
    BracketTerm { label, value }
}

/// `value = constant * leading * (sum of bracket terms)^exponent * eps_factor`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub theorem: Theorem,
    pub value: f64,
    pub leading: f64,
    pub bracket_terms: Vec<BracketTerm>,
    pub exponent: f64,
    pub eps_factor: f64,
    pub constant: f64,
    pub applicable: bool,
    pub reason: String,
}

impl BoundValue {
    fn assemble(
        theorem: Theorem,
        leading: f64,
        bracket_terms: Vec<BracketTerm>,
        exponent: f64,
        eps_factor: f64,
        constant: f64,
        applicable: bool,
        reason: impl Into<String>,
    ) -> Self {
        let mut b = BoundValue {
            theorem,
            value: 0.0,
            leading,
            bracket_terms,
            exponent,
            eps_factor,
            constant,
            applicable,
            reason: reason.into(),
        };
        b.value = b.recompute();
        b
    }

    pub fn bracket(&self) -> f64 {
        self.bracket_terms.iter().map(|t| t.value).sum()
    }

    pub fn recompute(&self) -> f64 {
        self.constant * self.leading * self.bracket().powf(self.exponent) * self.eps_factor
    }
}

const APPROX_Q2: &str = "requires |alpha_k - u/q| < q^-2 with (u,q)=1 (caller certificate)";

/// Right-hand side of a moment (or single Weyl sum) estimate.
pub fn rhs_moment(input: &RegimeInput, theorem: Theorem) -> Result<BoundValue> {
    input.validate()?;
    let RegimeInput {
        k,
        x,
        t,
        z,
        q,
        w,
        epsilon: eps,
        constant,
    } = *input;
    let ex = exponents(k)?;
    let need_k3 = || -> Result<()> {
        if k < 3 {
            Err(Error::InvalidParameter(format!("{} needs k >= 3", theorem.name())))
        } else {
            Ok(())
        }
    };
    let (z, q) = (z as f64, q as f64);
    let kf = k as f64;
    let lq = q.ln();
    let xk1 = x.powf(kf - 1.0);
    let xk = x.powf(kf);
    let txz_eps = (t * x * z).powf(eps);
    let x_eps = x.powf(eps);
    let b = match theorem {
        Theorem::WeylClassic => BoundValue::assemble(
            theorem,
            x,
            vec![term("1/q", 1.0 / q), term("1/x", 1.0 / x), term("q/x^k", q / xk)],
            1.0 / (kf * (kf - 1.0)),
            x_eps,
            constant,
            true,
            APPROX_Q2,
        ),
        Theorem::Improved => {
            need_k3()?;
            BoundValue::assemble(
                theorem,
                t * x,
                vec![
                    term("z x^(k-1)/q", z * xk1 / q),
                    term("z x^(k-1) log q/T", z * xk1 * lq / t),
                    term("1/x", 1.0 / x),
                    term("q log q/(T x)", q * lq / (t * x)),
                ],
                1.0 / (2.0 * ex.s0 as f64),
                x_eps,
                constant,
                true,
                APPROX_Q2,
            )
        }
        Theorem::Standard => BoundValue::assemble(
            theorem,
            t * x,
            vec![
                term("z/q", z / q),
                term("z/x", z / x),
                term("q/(T x^k)", q / (t * xk)),
            ],
            1.0 / (2.0 * ex.s1 as f64),
            txz_eps,
            constant,
            true,
            APPROX_Q2,
        ),
        Theorem::SecondImproved => {
            let w = w.ok_or_else(|| {
                Error::InvalidParameter("second_improved needs w".into())
            })? as f64;
            if w < 1.0 || w > xk1 * z {
                return Err(Error::InvalidParameter(format!(
                    "w = {w} outside [1, x^(k-1) z]"
                )));
            }
            BoundValue::assemble(
                theorem,
                t * x,
                vec![
                    term("x^(k-1)/(q w)", xk1 / (q * w)),
                    term("x^(k-1)/T", xk1 / t),
                    term("1/(x w)", 1.0 / (x * w)),
                    term("q/(T x)", q / (t * x)),
                ],
                1.0 / (2.0 * ex.s2 as f64),
                x_eps,
                constant,
                true,
                "requires |alpha_k - u/q| < 1/(q T) and |z q alpha_(k-1) - v/w| < w^-2 (caller certificates)",
            )
        }
        Theorem::Conjectured => {
            need_k3()?;
            BoundValue::assemble(
                theorem,
                t * x,
                vec![
                    term("z/q", z / q),
                    term("z log q/T", z * lq / t),
                    term("1/x^k", 1.0 / xk),
                    term("q log q/(T x^k)", q * lq / (t * xk)),
                ],
                1.0 / (2.0 * ex.s0 as f64),
                txz_eps,
                constant,
                true,
                "conjectural",
            )
        }
        Theorem::SmoothImproved | Theorem::SmoothStandard | Theorem::HeathBrown => {
            return Err(Error::InvalidParameter(format!(
                "{} is a smooth-sum bound, use rhs_smooth",
                theorem.name()
            )))
        }
    };
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImprovementRange {
    pub sigma: f64,
    /// `z^sigma x^(k - sigma)`, which is also the critical value for `T`.
    pub q_lo: f64,
    /// `T x^sigma z^(1 - sigma)`.
    pub q_hi: f64,
    pub nonempty: bool,
    pub critical_t: f64,
    pub t_above_critical: bool,
}

/// Range of `q` in which the improved estimate beats the standard one,
/// ignoring logs and constants. `nonempty` uses the strict comparison
/// `q_lo < q_hi`.
pub fn improvement_range(k: u32, x: f64, t: f64, z: u64) -> Result<ImprovementRange> {
    if k < 3 {
        return Err(Error::InvalidParameter("improvement range needs k >= 3".into()));
    }
    let sigma = exponents(k)?.sigma.expect("k >= 3").to_f64();
    let z = z as f64;
    let q_lo = z.powf(sigma) * x.powf(k as f64 - sigma);
    let q_hi = t * x.powf(sigma) * z.powf(1.0 - sigma);
    Ok(ImprovementRange {
        sigma,
        q_lo,
        q_hi,
        nonempty: q_lo < q_hi,
        critical_t: q_lo,
        t_above_critical: t >= q_lo,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub input: RegimeInput,
    pub improved: BoundValue,
    pub standard: BoundValue,
    /// Evaluated only when `w` is given; not part of the argmin.
    pub second_improved: Option<BoundValue>,
    /// Not part of the argmin.
    pub conjectured: BoundValue,
    pub argmin: Theorem,
    pub predicted: Theorem,
    pub agree: bool,
    pub range: ImprovementRange,
}

/// Compares the improved and the standard moment bound at one point. The
/// evaluated argmin and the asymptotic prediction (improved iff `T` is at
/// least critical and `q_lo < q < q_hi`) are both reported.
pub fn best_theorem(input: &RegimeInput) -> Result<RegimeReport> {
    if input.k < 3 {
        return Err(Error::InvalidParameter("regime comparison needs k >= 3".into()));
    }
    let improved = rhs_moment(input, Theorem::Improved)?;
    let standard = rhs_moment(input, Theorem::Standard)?;
    let second_improved = match input.w {
        Some(_) => Some(rhs_moment(input, Theorem::SecondImproved)?),
        None => None,
    };
    let conjectured = rhs_moment(input, Theorem::Conjectured)?;
    let argmin = if improved.value <= standard.value {
        Theorem::Improved
    } else {
        Theorem::Standard
    };
    let range = improvement_range(input.k, input.x, input.t, input.z)?;
    let q = input.q as f64;
    let predicted = if range.t_above_critical && range.q_lo < q && q < range.q_hi {
        Theorem::Improved
    } else {
        Theorem::Standard
    };
    Ok(RegimeReport {
        input: *input,
        improved,
        standard,
        second_improved,
        conjectured,
        argmin,
        predicted,
        agree: argmin == predicted,
        range,
    })
}

/// [`best_theorem`] over many points, results in input order.
pub fn regime_sweep(inputs: &[RegimeInput]) -> Vec<Result<RegimeReport>> {
    inputs.par_iter().map(best_theorem).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumLemmaReport {
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
    /// `log q` was replaced by `max(log q, 1)` in the ratio denominator.
    pub log_substituted: bool,
    /// Nearest-fraction approximation with denominator `q` and whether it
    /// satisfies the lemma's hypothesis.
    pub approx: RationalApprox,
    pub certified: bool,
}

/// `min(X, ‖v‖^{-1})` with the convention that `‖v‖ = 0` gives `X`.
fn capped_recip(v: &Rational, cap: f64) -> f64 {
    let d = dist_to_nearest_int(v);
    if d.is_zero() {
        cap
    } else {
        let r = Rational::new(d.denom(), d.numer()).expect("positive distance").to_f64();
        r.min(cap)
    }
}

fn approx_for(alpha: &Rational, q: u64) -> Result<RationalApprox> {
    let q = q as i128;
    let u = alpha.checked_mul_int(q)?.round_nearest();
    RationalApprox::for_alpha(alpha, u, q)
}

fn check_cap(x_cap: f64) -> Result<()> {
    if !(x_cap > 0.0) || !x_cap.is_finite() {
        return Err(Error::InvalidParameter("X must be positive".into()));
    }
    Ok(())
}

/// `sum_{Z <= h <= Y} min(X, ‖alpha h + beta‖^{-1})` against
/// `(X + q log q)((Y - Z)/q + 1)`.
pub fn sum_lemma_pair(
    alpha: &Rational,
    beta: &Rational,
    x_cap: f64,
    z_lo: i128,
    y_hi: i128,
    q: u64,
) -> Result<SumLemmaReport> {
    check_cap(x_cap)?;
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let approx = approx_for(alpha, q)?;
    let certified = approx.u.gcd(&approx.q) == 1 && approx.certifies_q_squared()?;
    let qf = q as f64;
    let span = (y_hi - z_lo) as f64;
    let rhs_shape = (x_cap + qf * qf.ln()) * (span / qf + 1.0);
    let log_substituted = qf.ln() < 1.0;
    if y_hi < z_lo {
        return Ok(SumLemmaReport {
            lhs: 0.0,
            rhs_shape,
            ratio: 0.0,
            log_substituted: false,
            approx,
            certified,
        });
    }
    let n_terms = (y_hi - z_lo) as u128 + 1;
    Budget::default().check(n_terms)?;
    let mut acc = Neumaier::new();
    for h in z_lo..=y_hi {
        let v = alpha.checked_mul_int(h)?.checked_add(beta)?;
        acc.add(capped_recip(&v, x_cap));
    }
    let lhs = acc.value();
    let denom = (x_cap + qf * qf.ln().max(1.0)) * (span / qf + 1.0);
    Ok(SumLemmaReport {
        lhs,
        rhs_shape,
        ratio: lhs / denom,
        log_substituted,
        approx,
        certified,
    })
}

/// `sum_{1 <= j <= q} min(X, ‖alpha j + beta‖^{-1})` against
/// `min(X, q/‖beta q‖) + q log q`.
pub fn var_sum_lemma_pair(alpha: &Rational, beta: &Rational, x_cap: f64, q: u64) -> Result<SumLemmaReport> {
    check_cap(x_cap)?;
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    Budget::default().check(q as u128)?;
    let approx = approx_for(alpha, q)?;
    let certified = approx.u.gcd(&approx.q) == 1
        && approx.certifies_q_t(&Rational::from_f64_exact(x_cap)?)?;
    let mut acc = Neumaier::new();
    for j in 1..=q as i128 {
        let v = alpha.checked_mul_int(j)?.checked_add(beta)?;
        acc.add(capped_recip(&v, x_cap));
    }
    let lhs = acc.value();
    let qf = q as f64;
    let bq = beta.checked_mul_int(q as i128)?;
    let d = dist_to_nearest_int(&bq);
    let first = if d.is_zero() {
        x_cap
    } else {
        x_cap.min(qf / d.to_f64())
    };
    let rhs_shape = first + qf * qf.ln();
    Ok(SumLemmaReport {
        lhs,
        rhs_shape,
        ratio: lhs / rhs_shape,
        log_substituted: false,
        approx,
        certified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcClassification {
    pub is_major: bool,
    /// `floor(z x^(k-1))`, the largest admissible denominator.
    pub q0: i128,
    pub witness: Option<RationalApprox>,
}

/// Decides whether `alpha` (taken mod 1) lies on a major arc
/// `|alpha - u/q| <= 1/(q T)` with `q <= z x^(k-1)`, exactly.
///
/// Such an arc exists iff `min_{q <= Q0} ‖q alpha‖ <= 1/T`; the minimum is
/// attained at the largest convergent denominator not exceeding `Q0`.
pub fn major_arc_classify(alpha: &Rational, k: u32, x: &Rational, t: &Rational, z: u64) -> Result<ArcClassification> {
    if k < 1 || t.numer() <= 0 || x.numer() <= 0 || z == 0 {
        return Err(Error::InvalidParameter("need k >= 1, x > 0, T > 0, z > 0".into()));
    }
    let alpha = alpha.fract();
    let q0 = x.checked_pow(k - 1)?.checked_mul_int(z as i128)?.floor();
    if q0 < 1 {
        return Ok(ArcClassification {
            is_major: false,
            q0,
            witness: None,
        });
    }
    let best = convergents(&alpha)?
        .into_iter()
        .rfind(|c| c.q <= q0)
        .expect("first convergent has q = 1");
    let cand = nearest_for_denominator(&alpha, best.q)?;
    let scaled = cand.error.checked_mul_int(cand.q)?.checked_mul(t)?;
    let is_major = scaled <= Rational::ONE;
    Ok(ArcClassification {
        is_major,
        q0,
        witness: is_major.then_some(cand),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothInput {
    pub k: u32,
    pub n: f64,
    pub t: f64,
    pub z: u64,
    pub a: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub constant: f64,
}

impl SmoothInput {
    pub fn new(k: u32, n: f64, t: f64, z: u64, a: f64, lambda: f64) -> Self {
        SmoothInput {
            k,
            n,
            t,
            z,
            a,
            lambda,
            epsilon: 0.0,
            constant: 1.0,
        }
    }

    /// `1 + A lambda N`.
    pub fn mu(&self) -> f64 {
        1.0 + self.a * self.lambda * self.n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothBound {
    pub bound: BoundValue,
    /// `T` window `[N^-k (z A lambda)^-1, (z A lambda)^-1]`.
    pub t_window: Option<(f64, f64)>,
    /// Lower bounds on `T` for a nontrivial result.
    pub thresholds: Vec<BracketTerm>,
    /// `N T` for the moment bounds, `N` for the single-sum bound.
    pub trivial: f64,
    pub nontrivial: bool,
}

/// Right-hand side of a smooth-sum bound.
pub fn rhs_smooth(input: &SmoothInput, theorem: Theorem) -> Result<SmoothBound> {
    let SmoothInput {
        k,
        n,
        t,
        z,
        a,
        lambda,
        epsilon: eps,
        constant,
    } = *input;
    check_eps_const(eps, constant)?;
    if k < 3 {
        return Err(Error::InvalidParameter("smooth bounds need k >= 3".into()));
    }
    if !(lambda > 0.0) || !(a >= 1.0) || !(n >= 1.0) || z == 0 {
        return Err(Error::InvalidParameter(
            "need lambda > 0, A >= 1, N >= 1, z >= 1".into(),
        ));
    }
    let ex = exponents(k)?;
    let kf = k as f64;
    let zf = z as f64;
    let mu = input.mu();
    if theorem == Theorem::HeathBrown {
        let kk1 = kf * (kf - 1.0);
        let bound = BoundValue::assemble(
            theorem,
            n,
            vec![
                term("lambda^(1/k(k-1))", lambda.powf(1.0 / kk1)),
                term("N^(-1/k(k-1))", n.powf(-1.0 / kk1)),
                term(
                    "N^(-2/k(k-1)) lambda^(-2/k^2(k-1))",
                    n.powf(-2.0 / kk1) * lambda.powf(-2.0 / (kf * kk1)),
                ),
            ],
            1.0,
            n.powf(eps),
            constant,
            true,
            "requires lambda <= f^(k) <= A lambda on (0, N) (caller certificate)",
        );
        let nontrivial = bound.value < n;
        return Ok(SmoothBound {
            bound,
            t_window: None,
            thresholds: vec![],
            trivial: n,
            nontrivial,
        });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("T must be positive".into()));
    }
    let zal = zf * a * lambda;
    let hi = 1.0 / zal;
    let lo = hi * n.powf(-kf);
    let in_window = lo <= t && t <= hi;
    let reason = if in_window {
        "requires lambda <= f^(k) <= A lambda on (0, 3N) (caller certificate)".to_string()
    } else {
        format!("T = {t} outside [{lo}, {hi}]")
    };
    let u = zal * t;
    let (terms, thresholds) = match theorem {
        Theorem::SmoothImproved => {
            let rho = ex.rho.expect("k >= 3").to_f64();
            (
                vec![
                    term("N T (z A lambda T)^(rho/k+eps)", n * t * u.powf(rho / kf + eps)),
                    term("T (z A lambda T)^(-1/k)", t * u.powf(-1.0 / kf)),
                    term("T mu z^2 (z A lambda T)^(2/k-2)", t * mu * zf * zf * u.powf(2.0 / kf - 2.0)),
                    term(
                        "mu z (z A lambda T)^(1/k-1)/lambda",
                        mu * zf * u.powf(1.0 / kf - 1.0) / lambda,
                    ),
                ],
                vec![
                    term(
                        "t1",
                        mu.powf(kf / (2.0 * kf - 2.0)) * zf.powf(1.0 / (kf - 1.0)) / (a * lambda)
                            * n.powf(kf / (2.0 - 2.0 * kf)),
                    ),
                    term(
                        "t2",
                        mu.powf(kf / (2.0 * kf - 1.0))
                            * zf.powf(1.0 / (2.0 * kf - 1.0))
                            * a.powf((1.0 - kf) / (2.0 * kf - 1.0))
                            / lambda
                            * n.powf(kf / (1.0 - 2.0 * kf)),
                    ),
                ],
            )
        }
        Theorem::SmoothStandard => {
            let tau = ex.tau.expect("k >= 3").to_f64();
            (
                vec![
                    term("N T (z A lambda T)^(tau/k+eps)", n * t * u.powf(tau / kf + eps)),
                    term("T (z A lambda T)^(-1/k)", t * u.powf(-1.0 / kf)),
                    term("A mu T (z A lambda T)^(-2/k)", a * mu * t * u.powf(-2.0 / kf)),
                ],
                vec![term(
                    "tt1",
                    mu.powf(kf / 2.0) * a.powf(kf / 2.0 - 1.0) / (zf * lambda) * n.powf(-kf / 2.0),
                )],
            )
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "{} is a moment bound, use rhs_moment",
                theorem.name()
            )))
        }
    };
    let bound = BoundValue::assemble(theorem, 1.0, terms, 1.0, 1.0, constant, in_window, reason);
    let trivial = n * t;
    let nontrivial = bound.value < trivial;
    Ok(SmoothBound {
        bound,
        t_window: Some((lo, hi)),
        thresholds,
        trivial,
        nontrivial,
    })
}
