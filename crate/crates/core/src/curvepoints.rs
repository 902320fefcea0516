//! Integer points close to smooth curves.
//!
//! A [`SmoothCurve`] is a black-box real function with derivative evaluators
//! and caller-declared derivative bounds ("certificates"). Certificates are
//! spot-checked on a 64-point grid of the counting window `[N, 2N]` before
//! any bound shape is evaluated; nothing here is an interval proof.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::{dist_to_nearest_int, Rational};
use crate::error::{Error, Result};
use crate::summation::{neumaier_sum, unit, ComplexNeumaier};
use crate::vinogradov::Budget;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Values within this distance of `delta` are flagged as undecidable in
/// floating point.
pub const AMBIGUITY_BAND: f64 = 1e-9;
pub const SPOT_CHECK_POINTS: usize = 64;
const CERT_SLACK: f64 = 1e-9;

/// `lambda <= sign * f^(order)(x) <= A lambda` on the window. The sign lets
/// decreasing families carry a certificate; every count and moment here is
/// invariant under `f -> -f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub order: u32,
    pub lambda: f64,
    pub a: f64,
    pub sign: f64,
}

impl Certificate {
    pub fn new(order: u32, lambda: f64, a: f64, sign: f64) -> Result<Self> {
        if order == 0 || !(lambda > 0.0) || !(a >= 1.0) || !lambda.is_finite() || !a.is_finite() {
            return Err(Error::Certificate(format!(
                "need order >= 1, lambda > 0, A >= 1 (got order {order}, lambda {lambda}, A {a})"
            )));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::Certificate("sign must be +1 or -1".into()));
        }
        Ok(Certificate { order, lambda, a, sign })
    }

    pub fn a_lambda(&self) -> f64 {
        self.a * self.lambda
    }

    /// From `|f^(order)|` decreasing on the window: `lambda` at `2N`, `A` the
    /// ratio to the value at `N`.
    fn from_decreasing(order: u32, at_n: f64, at_2n: f64) -> Result<Self> {
        let sign = if at_n < 0.0 { -1.0 } else { 1.0 };
        Certificate::new(order, at_2n.abs(), at_n.abs() / at_2n.abs(), sign)
    }
}

/// Families with closed-form derivatives.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurvePreset {
    /// `t log x`
    Log { t: f64 },
    /// `B / x^r`
    InversePower { b: f64, r: f64 },
    /// `(B / x)^(1/r)`
    InverseRoot { b: f64, r: f64 },
    /// `c_0 + c_1 x + ... + c_d x^d`, exact rational coefficients.
    Polynomial { coeffs: Vec<Rational> },
}

/// `c x^-e` and its derivatives.
fn power_law(c: f64, e: f64) -> (RealFn, impl Fn(u32) -> f64) {
    let coeff = move |j: u32| (0..j).fold(c, |acc, i| acc * (-e - i as f64));
    let f: RealFn = Arc::new(move |x: f64| c * x.powf(-e));
    (f, coeff)
}

#[derive(Clone)]
pub struct SmoothCurve {
    pub name: String,
    pub k: u32,
    f: RealFn,
    derivs: Vec<RealFn>,
    pub order_k: Option<Certificate>,
    pub first_order: Option<Certificate>,
    pub lambda1: Option<f64>,
    pub sup: Option<f64>,
    exact: Option<Vec<Rational>>,
}

impl std::fmt::Debug for SmoothCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothCurve")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("order_k", &self.order_k)
            .field("first_order", &self.first_order)
            .field("lambda1", &self.lambda1)
            .field("sup", &self.sup)
            .finish()
    }
}

impl SmoothCurve {
    /// A black-box curve. `derivs[j-1]` evaluates `f^(j)`.
    pub fn new(name: impl Into<String>, k: u32, f: RealFn, derivs: Vec<RealFn>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        Ok(SmoothCurve {
            name: name.into(),
            k,
            f,
            derivs,
            order_k: None,
            first_order: None,
            lambda1: None,
            sup: None,
            exact: None,
        })
    }

    pub fn with_order_k(mut self, lambda: f64, a: f64, sign: f64) -> Result<Self> {
        self.order_k = Some(Certificate::new(self.k, lambda, a, sign)?);
        Ok(self)
    }

    pub fn with_first_order(mut self, lambda: f64, a: f64, sign: f64) -> Result<Self> {
        self.first_order = Some(Certificate::new(1, lambda, a, sign)?);
        Ok(self)
    }

    pub fn with_lambda1(mut self, lambda1: f64) -> Self {
        self.lambda1 = Some(lambda1);
        self
    }

    pub fn with_sup(mut self, m: f64) -> Self {
        self.sup = Some(m);
        self
    }

    /// Preset curve with certificates derived in closed form on `[N, 2N]`.
    pub fn preset(p: &CurvePreset, k: u32, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        let (lo, hi) = (n as f64, 2.0 * n as f64);
        match p {
            CurvePreset::Log { t } => {
                let t = *t;
                if t == 0.0 || !t.is_finite() {
                    return Err(Error::InvalidParameter("t must be nonzero".into()));
                }
                let deriv = move |j: u32| -> RealFn {
                    let c = t * (1..j).fold(1.0, |acc, i| acc * -(i as f64));
                    Arc::new(move |x: f64| c * x.powi(-(j as i32)))
                };
                let derivs = (1..=k.max(1)).map(deriv).collect::<Vec<_>>();
                let mut curve = SmoothCurve::new(format!("{t}*log(x)"), k, Arc::new(move |x: f64| t * x.ln()), derivs)?;
                curve.order_k = Some(Certificate::from_decreasing(k, (curve.derivs[k as usize - 1])(lo), (curve.derivs[k as usize - 1])(hi))?);
                curve.first_order = Some(Certificate::from_decreasing(1, (curve.derivs[0])(lo), (curve.derivs[0])(hi))?);
                curve.lambda1 = Some((t / lo).abs());
                curve.sup = Some((t * lo.ln()).abs().max((t * hi.ln()).abs()));
                Ok(curve)
            }
            CurvePreset::InversePower { b, r } => Self::power_preset(format!("{b}/x^{r}"), *b, *r, k, lo, hi),
            CurvePreset::InverseRoot { b, r } => {
                if !(*b > 0.0) || !(*r > 0.0) {
                    return Err(Error::InvalidParameter("B and r must be positive".into()));
                }
                Self::power_preset(format!("({b}/x)^(1/{r})"), b.powf(1.0 / r), 1.0 / r, k, lo, hi)
            }
            CurvePreset::Polynomial { coeffs } => Self::poly_preset(coeffs, k, hi),
        }
    }

    fn power_preset(name: String, c: f64, e: f64, k: u32, lo: f64, hi: f64) -> Result<Self> {
        if c == 0.0 || !(e > 0.0) || !c.is_finite() || !e.is_finite() {
            return Err(Error::InvalidParameter("need nonzero coefficient and positive exponent".into()));
        }
        let (f, coeff) = power_law(c, e);
        let derivs: Vec<RealFn> = (1..=k)
            .map(|j| {
                let cj = coeff(j);
                let ej = e + j as f64;
                Arc::new(move |x: f64| cj * x.powf(-ej)) as RealFn
            })
            .collect();
        let mut curve = SmoothCurve::new(name, k, f.clone(), derivs)?;
        let dk = curve.derivs[k as usize - 1].clone();
        curve.order_k = Some(Certificate::from_decreasing(k, dk(lo), dk(hi))?);
        let d1 = curve.derivs[0].clone();
        curve.first_order = Some(Certificate::from_decreasing(1, d1(lo), d1(hi))?);
        curve.lambda1 = Some(d1(lo).abs());
        curve.sup = Some(f(lo).abs());
        Ok(curve)
    }

    fn poly_preset(coeffs: &[Rational], k: u32, hi: f64) -> Result<Self> {
        let mut coeffs = coeffs.to_vec();
        while coeffs.len() > 1 && coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        let d = coeffs.len().saturating_sub(1);
        if d == 0 {
            return Err(Error::InvalidParameter("polynomial must be nonconstant".into()));
        }
        if k as usize != d {
            return Err(Error::InvalidParameter(format!(
                "polynomial certificates need k = degree ({d})"
            )));
        }
        let cf: Vec<f64> = coeffs.iter().map(Rational::to_f64).collect();
        let deriv_coeffs = |j: usize| -> Vec<f64> {
            (j..=d)
                .map(|i| cf[i] * ((i - j + 1)..=i).map(|v| v as f64).product::<f64>())
                .collect()
        };
        let horner = |c: Vec<f64>| -> RealFn { Arc::new(move |x: f64| c.iter().rev().fold(0.0, |acc, &v| acc * x + v)) };
        let derivs = (1..=d).map(|j| horner(deriv_coeffs(j))).collect();
        let name = coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let mut curve = SmoothCurve::new(format!("poly[{name}]"), k, horner(cf.clone()), derivs)?;
        let lead = deriv_coeffs(d)[0];
        curve.order_k = Some(Certificate::new(k, lead.abs(), 1.0, lead.signum())?);
        if d == 1 {
            curve.first_order = curve.order_k;
        }
        curve.lambda1 = Some((1..=d).map(|j| j as f64 * cf[j].abs() * hi.powi(j as i32 - 1)).sum());
        curve.sup = Some((0..=d).map(|j| cf[j].abs() * hi.powi(j as i32)).sum());
        curve.exact = Some(coeffs);
        Ok(curve)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, order: u32, x: f64) -> Result<f64> {
        match order {
            0 => Ok(self.eval(x)),
            j => self
                .derivs
                .get(j as usize - 1)
                .map(|d| d(x))
                .ok_or_else(|| Error::InvalidParameter(format!("no derivative of order {j}"))),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn grid(n: u64) -> impl Iterator<Item = f64> {
        let (lo, hi) = (n as f64, 2.0 * n as f64);
        (0..SPOT_CHECK_POINTS).map(move |i| lo + (hi - lo) * i as f64 / (SPOT_CHECK_POINTS - 1) as f64)
    }

    /// Spot-checks every declared certificate on `[N, 2N]`.
    pub fn spot_check(&self, n: u64) -> Result<()> {
        for cert in self.order_k.iter().chain(self.first_order.iter()) {
            for x in Self::grid(n) {
                let v = cert.sign * self.derivative(cert.order, x).map_err(|e| Error::Certificate(e.to_string()))?;
                let lo = cert.lambda * (1.0 - CERT_SLACK);
                let hi = cert.a_lambda() * (1.0 + CERT_SLACK);
                if !(lo <= v && v <= hi) {
                    return Err(Error::Certificate(format!(
                        "{}: order-{} bound [{}, {}] violated at x = {x} (value {v})",
                        self.name, cert.order, cert.lambda, cert.a_lambda()
                    )));
                }
            }
        }
        if let Some(l1) = self.lambda1 {
            for x in Self::grid(n) {
                let v = self.derivative(1, x).map_err(|e| Error::Certificate(e.to_string()))?;
                if v.abs() > l1 * (1.0 + CERT_SLACK) {
                    return Err(Error::Certificate(format!("{}: |f'({x})| = {} > lambda1 = {l1}", self.name, v.abs())));
                }
            }
        }
        if let Some(m) = self.sup {
            for x in Self::grid(n) {
                if self.eval(x).abs() > m * (1.0 + CERT_SLACK) {
                    return Err(Error::Certificate(format!("{}: |f({x})| exceeds M = {m}", self.name)));
                }
            }
        }
        Ok(())
    }

    fn need_order_k(&self) -> Result<Certificate> {
        self.order_k
            .ok_or_else(|| Error::Certificate(format!("{}: no order-{} certificate", self.name, self.k)))
    }

    /// Exact `t f(n) mod 1` for polynomial curves, centered in `(-1/2, 1/2]`.
    fn exact_phase(&self, n: i128, twist: i128) -> Option<Result<f64>> {
        let coeffs = self.exact.as_ref()?;
        let phase = (|| {
            let mut acc = Rational::ZERO;
            for c in coeffs.iter().skip(1).rev() {
                acc = acc.checked_add(&c.checked_mul_int(twist)?.fract())?.checked_mul_int(n)?.fract();
            }
            let v = acc.checked_add(&coeffs[0].checked_mul_int(twist)?.fract())?.fract();
            let f = v.to_f64();
            Ok(if f > 0.5 { f - 1.0 } else { f })
        })();
        Some(phase)
    }

    fn exact_distance(&self, n: i128) -> Option<Result<Rational>> {
        let coeffs = self.exact.as_ref()?;
        let mut acc = Rational::ZERO;
        for c in coeffs.iter().rev() {
            acc = match acc.checked_mul_int(n).and_then(|v| v.checked_add(c)) {
                Ok(v) => v,
                Err(e) => return Some(Err(e)),
            };
        }
        Some(Ok(dist_to_nearest_int(&acc)))
    }
}

fn fdist(v: f64) -> f64 {
    (v - v.round()).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloseCount {
    pub count: u64,
    pub points: Vec<i64>,
    /// Counted points whose distance lies within [`AMBIGUITY_BAND`] of `delta`,
    /// plus uncounted ones in the band.
    pub ambiguous: Vec<i64>,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidParameter(format!("delta = {delta} outside (0, 1/2]")));
    }
    Ok(())
}

/// `R(f, N, delta) = #{n in [N, 2N] : ‖f(n)‖ < delta}`, strict.
pub fn count_close(f: &SmoothCurve, n: u64, delta: f64, budget: &Budget) -> Result<CloseCount> {
    check_delta(delta)?;
    if n == 0 || n > 1 << 52 {
        return Err(Error::InvalidParameter("N must lie in [1, 2^52]".into()));
    }
    budget.check(n as u128 + 1)?;
    let delta_exact = Rational::from_f64_exact(delta)?;
    // (n, close, ambiguous)
    let hits: Vec<(i64, bool, bool)> = (n as i64..=2 * n as i64)
        .into_par_iter()
        .map(|m| match f.exact_distance(m as i128) {
            Some(d) => d.map(|d| (m, d < delta_exact, false)),
            None => {
                let d = fdist(f.eval(m as f64));
                Ok((m, d < delta, (d - delta).abs() < AMBIGUITY_BAND))
            }
        })
        .collect::<Result<_>>()?;
    let points: Vec<i64> = hits.iter().filter(|h| h.1).map(|h| h.0).collect();
    Ok(CloseCount {
        count: points.len() as u64,
        points,
        ambiguous: hits.iter().filter(|h| h.2).map(|h| h.0).collect(),
    })
}

/// Greedy left-to-right selection: a point is kept iff it exceeds the last
/// kept point by more than `h_prime`.
pub fn greedy_spaced_subset(points: &[i64], h_prime: f64) -> Result<Vec<i64>> {
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("points must be strictly increasing".into()));
    }
    let mut out: Vec<i64> = Vec::new();
    for &p in points {
        if out.last().is_none_or(|&l| (p - l) as f64 > h_prime) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpacingCheck {
    pub r: u64,
    pub subset_size: u64,
    pub h_prime: f64,
    pub holds: bool,
}

/// `H' = (A lambda)^(-2/(k(k+1)))`.
pub fn spacing_h_prime(k: u32, a_lambda: f64) -> f64 {
    let kf = k as f64;
    a_lambda.powf(-2.0 / (kf * (kf + 1.0)))
}

/// `R <= (k+1)(1 + #subset)` for a given set of close points.
pub fn spacing_check_points(points: &[i64], k: u32, a_lambda: f64) -> Result<SpacingCheck> {
    if !(a_lambda > 0.0 && a_lambda <= 0.25) {
        return Err(Error::Certificate(format!("A lambda = {a_lambda} must lie in (0, 1/4]")));
    }
    let h_prime = spacing_h_prime(k, a_lambda);
    let subset = greedy_spaced_subset(points, h_prime)?;
    let r = points.len() as u64;
    let subset_size = subset.len() as u64;
    Ok(SpacingCheck {
        r,
        subset_size,
        h_prime,
        holds: r <= (k as u64 + 1) * (1 + subset_size),
    })
}

pub fn spacing_inequality_check(f: &SmoothCurve, n: u64, delta: f64, budget: &Budget) -> Result<SpacingCheck> {
    f.spot_check(n)?;
    let cert = f.need_order_k()?;
    let close = count_close(f, n, delta, budget)?;
    spacing_check_points(&close.points, f.k, cert.a_lambda())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveBound {
    FirstDerivative,
    HuxleySargos,
    Thr,
}

impl CurveBound {
    pub const ALL: [CurveBound; 3] = [CurveBound::FirstDerivative, CurveBound::HuxleySargos, CurveBound::Thr];

    pub fn name(&self) -> &'static str {
        match self {
            CurveBound::FirstDerivative => "first_derivative",
            CurveBound::HuxleySargos => "huxley_sargos",
            CurveBound::Thr => "thr",
        }
    }
}

/// `(1 + A lambda N)(1 + delta/lambda)`, from `lambda <= f' <= A lambda`.
pub fn first_derivative_shape(lambda: f64, a: f64, n: f64, delta: f64) -> f64 {
    (1.0 + a * lambda * n) * (1.0 + delta / lambda)
}

/// `N (A lambda)^(2/(k(k+1))) + N (A delta)^(2/(k(k-1))) + (delta/lambda)^(1/k) + 1`.
pub fn huxley_sargos_terms(k: u32, n: f64, a: f64, lambda: f64, delta: f64) -> [f64; 4] {
    let kf = k as f64;
    [
        n * (a * lambda).powf(2.0 / (kf * (kf + 1.0))),
        n * (a * delta).powf(2.0 / (kf * (kf - 1.0))),
        (delta / lambda).powf(1.0 / kf),
        1.0,
    ]
}

/// `1 + A (1 + A lambda N) ((delta + lambda1)/(A lambda))^(1/(k-1))`.
pub fn thr_shape(k: u32, a: f64, lambda: f64, n: f64, delta: f64, lambda1: f64) -> f64 {
    let kf = k as f64;
    1.0 + a * (1.0 + a * lambda * n) * ((delta + lambda1) / (a * lambda)).powf(1.0 / (kf - 1.0))
}

pub fn rhs_curve(f: &SmoothCurve, n: u64, delta: f64, which: CurveBound) -> Result<f64> {
    check_delta(delta)?;
    f.spot_check(n)?;
    let nf = n as f64;
    match which {
        CurveBound::FirstDerivative => {
            let c = f
                .first_order
                .ok_or_else(|| Error::Certificate(format!("{}: no first-derivative certificate", f.name)))?;
            Ok(first_derivative_shape(c.lambda, c.a, nf, delta))
        }
        CurveBound::HuxleySargos => {
            let c = f.need_order_k()?;
            if f.k < 2 {
                return Err(Error::InvalidParameter("huxley_sargos needs k >= 2".into()));
            }
            Ok(huxley_sargos_terms(f.k, nf, c.a, c.lambda, delta).iter().sum())
        }
        CurveBound::Thr => {
            let c = f.need_order_k()?;
            if f.k < 2 {
                return Err(Error::InvalidParameter("thr needs k >= 2".into()));
            }
            let l1 = f
                .lambda1
                .ok_or_else(|| Error::Certificate(format!("{}: no lambda1 certificate", f.name)))?;
            Ok(thr_shape(f.k, c.a, c.lambda, nf, delta, l1))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThrCondition {
    pub holds: bool,
    pub lower: f64,
    pub upper: f64,
    /// `(A lambda)^(-2/(k(k+1))) <= N`.
    pub n_large_enough: bool,
}

/// `A lambda <= delta + lambda1 <= (A lambda)^(1 - 2(k-1)/(k(k+1)))`, constants 1.
pub fn thr_condition_shape(k: u32, a_lambda: f64, delta_plus_lambda1: f64, n: f64) -> ThrCondition {
    let kf = k as f64;
    let lower = a_lambda;
    let upper = a_lambda.powf(1.0 - 2.0 * (kf - 1.0) / (kf * (kf + 1.0)));
    ThrCondition {
        holds: lower <= delta_plus_lambda1 && delta_plus_lambda1 <= upper,
        lower,
        upper,
        n_large_enough: spacing_h_prime(k, a_lambda) <= n,
    }
}

pub fn condition_thr(f: &SmoothCurve, n: u64, delta: f64) -> Result<ThrCondition> {
    f.spot_check(n)?;
    let c = f.need_order_k()?;
    let l1 = f
        .lambda1
        .ok_or_else(|| Error::Certificate(format!("{}: no lambda1 certificate", f.name)))?;
    Ok(thr_condition_shape(f.k, c.a_lambda(), delta + l1, n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GornyBound {
    pub bound_fprime: f64,
    pub admissible: bool,
}

/// `M/N + M^(1-1/k) (A lambda)^(1/k)`, admissible iff `M <= (A lambda)^(1-2/(k+1))`.
pub fn gorny_shape(k: u32, m: f64, n: f64, a_lambda: f64) -> GornyBound {
    let kf = k as f64;
    GornyBound {
        bound_fprime: m / n + m.powf(1.0 - 1.0 / kf) * a_lambda.powf(1.0 / kf),
        admissible: m <= a_lambda.powf(1.0 - 2.0 / (kf + 1.0)),
    }
}

pub fn gorny(f: &SmoothCurve, n: u64) -> Result<GornyBound> {
    f.spot_check(n)?;
    let c = f.need_order_k()?;
    let m = f
        .sup
        .ok_or_else(|| Error::Certificate(format!("{}: no sup |f| certificate", f.name)))?;
    Ok(gorny_shape(f.k, m, n as f64, c.a_lambda()))
}

/// `L_f = sum_{a <= T} |sum_{N < m < 2N} e(a z f(m))|`.
///
/// Polynomial curves are reduced exactly. Black-box curves are reduced in
/// floating point: `f(m)` is taken mod 1 first and then scaled by `a z`, so
/// the phase error is of order `a z |f(m)| ulp`.
pub fn smooth_moment_lhs(f: &SmoothCurve, n: u64, t: u64, z: u64, budget: &Budget) -> Result<f64> {
    if n == 0 || t == 0 || z == 0 || n > 1 << 52 {
        return Err(Error::InvalidParameter("need N in [1, 2^52], T >= 1, z >= 1".into()));
    }
    budget.check((n as u128 - 1) * t as u128)?;
    let (lo, hi) = (n as i64 + 1, 2 * n as i64 - 1);
    let frac: Vec<f64> = if f.is_exact() {
        Vec::new()
    } else {
        (lo..=hi).map(|m| f.eval(m as f64).rem_euclid(1.0)).collect()
    };
    let mags: Vec<f64> = (1..=t)
        .into_par_iter()
        .map(|a| -> Result<f64> {
            let tw = (a as i128)
                .checked_mul(z as i128)
                .ok_or(Error::Overflow("twist a*z"))?;
            let mut acc = ComplexNeumaier::new();
            for (i, m) in (lo..=hi).enumerate() {
                let phase = match f.exact_phase(m as i128, tw) {
                    Some(p) => p?,
                    None => (tw as f64 * frac[i]).rem_euclid(1.0),
                };
                acc.add(unit(phase));
            }
            Ok(acc.value().norm())
        })
        .collect::<Result<_>>()?;
    Ok(neumaier_sum(mags))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Taylor {
    /// `f^(j)(m)/j!` for `j = 1..k-1`.
    pub coeffs: Vec<f64>,
    pub k: u32,
    /// `A lambda` from the order-`k` certificate, when present.
    pub a_lambda: Option<f64>,
}

impl Taylor {
    /// `A lambda |h|^k / k!`.
    pub fn remainder_bound(&self, h: f64) -> Option<f64> {
        let fact: f64 = (1..=self.k).map(|i| i as f64).product();
        self.a_lambda.map(|al| al * h.abs().powi(self.k as i32) / fact)
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * h)
    }
}

/// `Q_m(h) = h f'(m) + ... + h^(k-1) f^(k-1)(m)/(k-1)!`.
pub fn taylor_poly(f: &SmoothCurve, m: f64, k: u32) -> Result<Taylor> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be >= 2".into()));
    }
    let mut fact = 1.0;
    let mut coeffs = Vec::with_capacity(k as usize - 1);
    for j in 1..k {
        fact *= j as f64;
        coeffs.push(f.derivative(j, m)? / fact);
    }
    let a_lambda = f.order_k.filter(|c| c.order == k).map(|c| c.a_lambda());
    Ok(Taylor { coeffs, k, a_lambda })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveCountReport {
    pub n: u64,
    pub delta: f64,
    pub count: u64,
    pub ambiguous: u64,
    pub spaced_subset_size: Option<u64>,
    pub h_prime: Option<f64>,
    pub bound_values: BTreeMap<String, f64>,
    pub conditions: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

/// Count plus every bound shape and condition available from the curve's
/// certificates. Missing certificates become notes, violated ones errors.
pub fn curve_report(f: &SmoothCurve, n: u64, delta: f64, budget: &Budget) -> Result<CurveCountReport> {
    f.spot_check(n)?;
    let close = count_close(f, n, delta, budget)?;
    let mut notes = Vec::new();
    if !close.ambiguous.is_empty() {
        notes.push(format!("{} boundary-ambiguous points", close.ambiguous.len()));
    }
    let mut bound_values = BTreeMap::new();
    for which in CurveBound::ALL {
        match rhs_curve(f, n, delta, which) {
            Ok(v) => {
                bound_values.insert(which.name().to_string(), v);
            }
            Err(e) if !e.is_violation() && !matches!(e, Error::InvalidParameter(_)) => return Err(e),
            Err(e) => notes.push(format!("{}: {e}", which.name())),
        }
    }
    let mut conditions = BTreeMap::new();
    if let Ok(c) = condition_thr(f, n, delta) {
        conditions.insert("thr_window".to_string(), c.holds);
        conditions.insert("thr_n_large_enough".to_string(), c.n_large_enough);
    }
    if let Ok(g) = gorny(f, n) {
        bound_values.insert("gorny_fprime".to_string(), g.bound_fprime);
        conditions.insert("gorny_admissible".to_string(), g.admissible);
    }
    let (mut spaced_subset_size, mut h_prime) = (None, None);
    match f.order_k.map(|c| spacing_check_points(&close.points, f.k, c.a_lambda())) {
        Some(Ok(s)) => {
            spaced_subset_size = Some(s.subset_size);
            h_prime = Some(s.h_prime);
            conditions.insert("spacing_inequality".to_string(), s.holds);
        }
        Some(Err(e)) => notes.push(format!("spacing: {e}")),
        None => notes.push("spacing: no order-k certificate".into()),
    }
    Ok(CurveCountReport {
        n,
        delta,
        count: close.count,
        ambiguous: close.ambiguous.len() as u64,
        spaced_subset_size,
        h_prime,
        bound_values,
        conditions,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[&str]) -> CurvePreset {
        CurvePreset::Polynomial {
            coeffs: cs.iter().map(|c| c.parse().unwrap()).collect(),
        }
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn linear_counts() {
        let f = SmoothCurve::preset(&poly(&["0", "1/3"]), 1, 3).unwrap();
        assert_eq!(count_close(&f, 3, 0.1, &b()).unwrap().count, 2);
        let f = SmoothCurve::preset(&poly(&["0", "1/2"]), 1, 4).unwrap();
        assert_eq!(count_close(&f, 4, 0.25, &b()).unwrap().count, 3);
        let f = SmoothCurve::preset(&poly(&["5", "3", "0", "2"]), 3, 17).unwrap();
        assert_eq!(count_close(&f, 17, 1e-6, &b()).unwrap().count, 18);
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_spaced_subset(&[3, 4, 5, 9], 2.0).unwrap(), vec![3, 9]);
        assert!(greedy_spaced_subset(&[], 3.0).unwrap().is_empty());
        assert_eq!(greedy_spaced_subset(&[1, 2, 3], 0.5).unwrap(), vec![1, 2, 3]);
        assert!(greedy_spaced_subset(&[2, 1], 0.5).is_err());
    }

    #[test]
    fn spacing_examples() {
        let s = spacing_check_points(&[3, 6], 3, 0.1).unwrap();
        assert!(s.holds && s.r == 2);
        let s = spacing_check_points(&[1, 2, 3, 40, 41], 3, 1e-3).unwrap();
        assert_eq!((s.r, s.holds), (5, true));
        assert!(spacing_check_points(&[], 3, 1e-3).unwrap().holds);
        assert!(spacing_check_points(&[1], 3, 0.3).is_err());
    }

    #[test]
    fn curve_shape_examples() {
        assert!((first_derivative_shape(0.01, 2.0, 100.0, 0.005) - 4.5).abs() < 1e-12);
        let t = huxley_sargos_terms(3, 1e6, 2.0, 1e-9, 1e-4);
        assert!((t[0] / 3.55e4 - 1.0).abs() < 2e-3);
        assert!((t[1] / 5.85e4 - 1.0).abs() < 2e-3);
        assert!((t[2] / 46.4 - 1.0).abs() < 2e-3);
        let v = thr_shape(3, 2.0, 1e-9, 1e6, 1e-6, 1e-6);
        assert!((v - (1.0 + 2.0 * 1.002 * 1000f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn thr_condition_examples() {
        let c = thr_condition_shape(3, 2e-9, 1e-6, 1e6);
        assert!(c.holds && (c.upper / 1.587e-6 - 1.0).abs() < 1e-3);
        assert!(!thr_condition_shape(3, 2e-9, 1e-3, 1e6).holds);
        assert!(thr_condition_shape(3, 2e-9, 2e-9, 1e6).holds);
    }

    #[test]
    fn gorny_examples() {
        assert!((gorny_shape(2, 1.0, 100.0, 1e-4).bound_fprime - 0.02).abs() < 1e-12);
        assert!(gorny_shape(3, 0.005, 100.0, 1e-4).admissible);
        let g = gorny_shape(3, 0.0, 100.0, 1e-4);
        assert_eq!((g.bound_fprime, g.admissible), (0.0, true));
    }

    #[test]
    fn smooth_moment_examples() {
        let half = SmoothCurve::preset(&poly(&["0", "1/2"]), 1, 2).unwrap();
        assert!((smooth_moment_lhs(&half, 2, 2, 1, &b()).unwrap() - 2.0).abs() < 1e-12);
        assert!((smooth_moment_lhs(&half, 3, 2, 1, &b()).unwrap() - 2.0).abs() < 1e-12);
        let int = SmoothCurve::preset(&poly(&["0", "0", "3"]), 2, 2).unwrap();
        assert!((smooth_moment_lhs(&int, 2, 7, 1, &b()).unwrap() - 7.0).abs() < 1e-12);
        // black-box path on the same data
        let bb = SmoothCurve::new("m/2", 1, Arc::new(|x: f64| x / 2.0), vec![]).unwrap();
        assert!((smooth_moment_lhs(&bb, 3, 2, 1, &b()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_examples() {
        let cube = SmoothCurve::preset(&poly(&["0", "0", "0", "1"]), 3, 1).unwrap();
        let t = taylor_poly(&cube, 1.0, 3).unwrap();
        assert_eq!(t.coeffs, vec![3.0, 3.0]);
        assert_eq!(t.remainder_bound(2.0), Some(8.0));
        assert_eq!(taylor_poly(&cube, 0.0, 3).unwrap().coeffs, vec![0.0, 0.0]);
    }

    #[test]
    fn preset_certificates_pass_spot_check() {
        let presets = [
            CurvePreset::Log { t: 1e3 },
            CurvePreset::InversePower { b: 1e6, r: 1.5 },
            CurvePreset::InverseRoot { b: 1e9, r: 2.0 },
            poly(&["0", "1/7", "0", "1/1000"]),
        ];
        for p in &presets {
            let c = SmoothCurve::preset(p, 3, 100).unwrap();
            c.spot_check(100).unwrap();
            assert!(c.order_k.is_some() && c.first_order.is_some() || c.is_exact());
        }
    }

    #[test]
    fn bad_certificate_rejected() {
        let f = SmoothCurve::new("x^3", 3, Arc::new(|x: f64| x * x * x), vec![
            Arc::new(|x: f64| 3.0 * x * x),
            Arc::new(|x: f64| 6.0 * x),
            Arc::new(|_| 6.0),
        ])
        .unwrap()
        .with_order_k(7.0, 2.0, 1.0)
        .unwrap();
        assert!(matches!(f.spot_check(10), Err(Error::Certificate(_))));
    }
}
