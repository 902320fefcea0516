//! Weyl sums `S_{az}(alpha) = sum_{m <= x} e(az P(m))` of polynomials with
//! rational coefficients and their discrete moments over the twist `a`.
//!
//! Phases are reduced mod 1 exactly: the twisted coefficients are brought to
//! a common denominator `D` and `az P(m) mod 1` is evaluated by Horner's rule
//! modulo `D`. Only the final residue `r / D` is converted to floating point,
//! so large `a` or `m` never erode precision.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::Rational;
use crate::error::{Error, Result};
use crate::summation::{neumaier_sum, unit, ComplexNeumaier};

/// Modular Horner evaluation keeps products below `D^2`; this keeps them in i128.
const MAX_COMMON_DENOMINATOR: i128 = 1 << 62;

/// Coefficients `(alpha_1, ..., alpha_k)` of `P(X) = alpha_k X^k + ... + alpha_1 X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyCoeffs {
    coeffs: Vec<Rational>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "degree {} < 2",
                coeffs.len()
            )));
        }
        if coeffs.last().is_some_and(Rational::is_zero) {
            return Err(Error::InvalidParameter(
                "leading coefficient must be nonzero".into(),
            ));
        }
        Ok(PolyCoeffs { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `alpha_1, ..., alpha_k`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rational {
        self.coeffs[self.coeffs.len() - 1]
    }

    /// Exact value `P(m)`.
    pub fn eval(&self, m: i128) -> Result<Rational> {
        let mut acc = Rational::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_add(c)?.checked_mul_int(m)?;
        }
        Ok(acc)
    }
}

/// Exact phase evaluator for `t * P(m) mod 1` with a fixed integer twist `t`.
#[derive(Clone, Debug)]
pub(crate) struct PhaseEvaluator {
    // numerators over the common denominator, index j-1 <-> degree j
    numerators: Vec<i128>,
    denominator: i128,
}

impl PhaseEvaluator {
    pub(crate) fn new(poly: &PolyCoeffs, twist: i128) -> Result<Self> {
        let reduced = poly
            .coeffs()
            .iter()
            .map(|c| c.checked_mul_int(twist).map(|v| v.fract()))
            .collect::<Result<Vec<_>>>()?;
        let mut den: i128 = 1;
        for c in &reduced {
            den = den.lcm(&c.denom());
            if den > MAX_COMMON_DENOMINATOR {
                return Err(Error::Overflow("common phase denominator exceeds 2^62"));
            }
        }
        let numerators = reduced
            .iter()
            .map(|c| c.numer() * (den / c.denom()))
            .collect();
        Ok(PhaseEvaluator {
            numerators,
            denominator: den,
        })
    }

    /// Residue `r` in `[0, D)` with `t P(m) = r/D mod 1`.
    #[inline]
    pub(crate) fn residue(&self, m: i128) -> i128 {
        let d = self.denominator;
        let mm = m.rem_euclid(d);
        let mut r = 0i128;
        for &c in self.numerators.iter().rev() {
            r = ((r + c) % d) * mm % d;
        }
        r
    }

    /// Phase represented in `(-1/2, 1/2]`.
    #[inline]
    pub(crate) fn centered_phase(&self, m: i128) -> f64 {
        let d = self.denominator;
        let mut r = self.residue(m);
        if 2 * r > d {
            r -= d;
        }
        r as f64 / d as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylSumValue {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

impl WeylSumValue {
    fn from_parts(re: f64, im: f64) -> Self {
        WeylSumValue {
            re,
            im,
            magnitude: re.hypot(im),
        }
    }
}

fn floor_len(x: &Rational) -> i128 {
    x.floor().max(0)
}

fn twist(a: u64, z: u64) -> Result<i128> {
    let t = (a as i128)
        .checked_mul(z as i128)
        .ok_or(Error::Overflow("twist a*z"))?;
    if t < 1 {
        return Err(Error::InvalidParameter("a*z must be >= 1".into()));
    }
    Ok(t)
}

/// `sum_{1 <= m <= floor(x)} e(a z P(m))`, summed in ascending `m` with
/// compensation.
pub fn weyl_sum(poly: &PolyCoeffs, x: &Rational, a: u64, z: u64) -> Result<WeylSumValue> {
    let eval = PhaseEvaluator::new(poly, twist(a, z)?)?;
    Ok(weyl_sum_with(&eval, floor_len(x)))
}

fn weyl_sum_with(eval: &PhaseEvaluator, len: i128) -> WeylSumValue {
    let mut acc = ComplexNeumaier::new();
    for m in 1..=len {
        acc.add(unit(eval.centered_phase(m)));
    }
    let v = acc.value();
    WeylSumValue::from_parts(v.re, v.im)
}

/// Upper limit on `floor(x)` for the quadratic oracle.
pub const ORACLE_MAX_LEN: i128 = 2000;

/// `|S_{az}|^2` through the double sum `sum_{m,n} e(az (P(m) - P(n)))`.
///
/// Independent of [`weyl_sum`]: phases come from direct rational evaluation
/// of `P(m)` rather than the modular Horner scheme.
pub fn weyl_sum_sq_oracle(poly: &PolyCoeffs, x: &Rational, a: u64, z: u64) -> Result<f64> {
    let len = floor_len(x);
    if len > ORACLE_MAX_LEN {
        return Err(Error::SizeGuard(format!(
            "floor(x) = {len} exceeds oracle limit {ORACLE_MAX_LEN}"
        )));
    }
    let t = twist(a, z)?;
    let phases = (1..=len)
        .map(|m| Ok(poly.eval(m)?.checked_mul_int(t)?.fract()))
        .collect::<Result<Vec<Rational>>>()?;
    let mut total = 0.0;
    for pm in &phases {
        for pn in &phases {
            let diff = pm.checked_sub(pn)?.fract();
            total += (std::f64::consts::TAU * diff.to_f64()).cos();
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub x: Rational,
    pub t: u64,
    pub z: u64,
    pub s: u32,
    /// `sum_{a <= T} |S_{az}|^{2s}`
    pub moment_2s: f64,
    /// `sum_{a <= T} |S_{az}|`
    pub first_moment: f64,
    /// `T floor(x)`
    pub trivial_first: f64,
    /// `T floor(x)^{2s}`
    pub trivial_2s: f64,
}

/// Magnitudes `|S_{az}|` for `a = 1..=T` in index order. The `a` loop runs
/// on the current rayon pool; collection preserves order.
pub fn twisted_magnitudes(poly: &PolyCoeffs, x: &Rational, t: u64, z: u64) -> Result<Vec<f64>> {
    let len = floor_len(x);
    (1..=t)
        .into_par_iter()
        .map(|a| {
            let eval = PhaseEvaluator::new(poly, twist(a, z)?)?;
            Ok(weyl_sum_with(&eval, len).magnitude)
        })
        .collect()
}

pub fn discrete_moment(
    poly: &PolyCoeffs,
    x: &Rational,
    t: u64,
    z: u64,
    s: u32,
) -> Result<MomentReport> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    let mags = twisted_magnitudes(poly, x, t, z)?;
    let len = floor_len(x) as f64;
    let power = 2 * s as i32;
    Ok(MomentReport {
        x: *x,
        t,
        z,
        s,
        moment_2s: neumaier_sum(mags.iter().map(|m| m.powi(power))),
        first_moment: neumaier_sum(mags.iter().copied()),
        trivial_first: t as f64 * len,
        trivial_2s: t as f64 * len.powi(power),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// First moment against `T^{1 - 1/(2s)} (moment_2s)^{1/(2s)}`.
pub fn holder_check(report: &MomentReport) -> HolderCheck {
    if report.t == 0 {
        return HolderCheck {
            lhs: 0.0,
            rhs: 0.0,
            holds: true,
        };
    }
    let inv = 1.0 / (2.0 * report.s as f64);
    let lhs = report.first_moment;
    let rhs = (report.t as f64).powf(1.0 - inv) * report.moment_2s.powf(inv);
    HolderCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[(i128, i128)]) -> PolyCoeffs {
        PolyCoeffs::new(c.iter().map(|&(n, d)| Rational::new(n, d).unwrap()).collect()).unwrap()
    }

    fn half_square() -> PolyCoeffs {
        poly(&[(0, 1), (1, 2)])
    }

    fn x(n: i128) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn integer_polynomial_sums_to_length() {
        let p = poly(&[(3, 1), (-2, 1), (5, 1)]);
        let v = weyl_sum(&p, &x(5), 1, 1).unwrap();
        assert!((v.re - 5.0).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn half_square_fixtures() {
        let v = weyl_sum(&half_square(), &x(4), 1, 1).unwrap();
        assert!(v.magnitude < 1e-12);
        let v = weyl_sum(&half_square(), &x(4), 2, 1).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn real_x_uses_floor() {
        let p = poly(&[(1, 3), (1, 7)]);
        let a = weyl_sum(&p, &"9.99".parse().unwrap(), 3, 2).unwrap();
        let b = weyl_sum(&p, &x(9), 3, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_fixtures() {
        assert!(weyl_sum_sq_oracle(&half_square(), &x(2), 1, 1).unwrap().abs() < 1e-12);
        let p = poly(&[(1, 1), (4, 1)]);
        assert!((weyl_sum_sq_oracle(&p, &x(3), 1, 1).unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(weyl_sum_sq_oracle(&p, &"0.5".parse().unwrap(), 1, 1).unwrap(), 0.0);
        assert!(matches!(
            weyl_sum_sq_oracle(&p, &x(2001), 1, 1),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn moment_fixtures() {
        let r = discrete_moment(&half_square(), &x(2), 2, 1, 1).unwrap();
        assert!((r.moment_2s - 4.0).abs() < 1e-12);
        assert!((r.first_moment - 2.0).abs() < 1e-12);

        let p = poly(&[(2, 1), (1, 1)]);
        let r = discrete_moment(&p, &x(3), 2, 1, 1).unwrap();
        assert!((r.moment_2s - 18.0).abs() < 1e-12);

        let r = discrete_moment(&p, &x(3), 0, 1, 2).unwrap();
        assert_eq!((r.moment_2s, r.first_moment), (0.0, 0.0));
    }

    #[test]
    fn holder_fixtures() {
        let r = discrete_moment(&half_square(), &x(2), 2, 1, 1).unwrap();
        let h = holder_check(&r);
        assert!((h.lhs - 2.0).abs() < 1e-12);
        assert!((h.rhs - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(h.holds);

        let p = poly(&[(2, 1), (1, 1)]);
        let h = holder_check(&discrete_moment(&p, &x(3), 2, 1, 1).unwrap());
        assert!((h.lhs - 6.0).abs() < 1e-12 && (h.rhs - 6.0).abs() < 1e-12);
        assert!(h.holds);

        let h = holder_check(&discrete_moment(&p, &x(3), 0, 1, 1).unwrap());
        assert_eq!((h.lhs, h.rhs, h.holds), (0.0, 0.0, true));
    }

    #[test]
    fn huge_twist_keeps_precision() {
        // a z alpha_k integral for a = 10^12: every phase vanishes
        let p = poly(&[(1, 1_000_000), (1, 1_000_000_000_000)]);
        let v = weyl_sum(&p, &x(100), 1_000_000_000_000, 1).unwrap();
        assert!((v.re - 100.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(PolyCoeffs::new(vec![Rational::ONE]).is_err());
        assert!(PolyCoeffs::new(vec![Rational::ONE, Rational::ZERO]).is_err());
        assert!(weyl_sum(&half_square(), &x(3), 0, 1).is_err());
    }
}
