//! Exact rationals, nearest-integer distance, continued fractions and
//! certified Dirichlet approximation.
//!
//! All arithmetic is carried out on reduced `i128` fractions with checked
//! operations. Overflow surfaces as [`Error::Overflow`]; nothing wraps.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const OVERFLOW: Error = Error::Overflow("i128 rational arithmetic");

/// A reduced fraction `num / den` with `den >= 1` and `gcd(|num|, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg().ok_or(OVERFLOW)?;
            d = d.checked_neg().ok_or(OVERFLOW)?;
        }
        Ok(Rational { num: n, den: d })
    }

    pub const fn from_int(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn checked_add(&self, rhs: &Rational) -> Result<Rational> {
        // Work over lcm(den) to keep intermediates small.
        let g = self.den.gcd(&rhs.den);
        let l = (self.den / g).checked_mul(rhs.den).ok_or(OVERFLOW)?;
        let a = self.num.checked_mul(l / self.den).ok_or(OVERFLOW)?;
        let b = rhs.num.checked_mul(l / rhs.den).ok_or(OVERFLOW)?;
        Rational::new(a.checked_add(b).ok_or(OVERFLOW)?, l)
    }

    pub fn checked_neg(&self) -> Result<Rational> {
        Ok(Rational {
            num: self.num.checked_neg().ok_or(OVERFLOW)?,
            den: self.den,
        })
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Result<Rational> {
        self.checked_add(&rhs.checked_neg()?)
    }

    pub fn checked_mul(&self, rhs: &Rational) -> Result<Rational> {
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (g1, g2) = (g1.max(1), g2.max(1));
        let n = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or(OVERFLOW)?;
        let d = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or(OVERFLOW)?;
        Rational::new(n, d)
    }

    pub fn checked_mul_int(&self, k: i128) -> Result<Rational> {
        self.checked_mul(&Rational::from_int(k))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.num == 0 {
            return Err(Error::InvalidParameter("division by zero".into()));
        }
        self.checked_mul(&rhs.recip()?)
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::new(self.den, self.num)
    }

    pub fn checked_pow(&self, exp: u32) -> Result<Rational> {
        let n = self.num.checked_pow(exp).ok_or(OVERFLOW)?;
        let d = self.den.checked_pow(exp).ok_or(OVERFLOW)?;
        Ok(Rational { num: n, den: d })
    }

    pub fn abs(&self) -> Result<Rational> {
        Ok(Rational {
            num: self.num.checked_abs().ok_or(OVERFLOW)?,
            den: self.den,
        })
    }

    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i128 {
        -((-self.num).div_euclid(self.den))
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        Rational {
            num: self.num.rem_euclid(self.den),
            den: self.den,
        }
    }

    /// Nearest integer; ties go to the smaller integer.
    pub fn round_nearest(&self) -> i128 {
        let f = self.floor();
        let r = self.num.rem_euclid(self.den);
        // r / den > 1/2  <=>  2r > den ; den <= i128::MAX so 2r stays in u128.
        if (r as u128) * 2 > self.den as u128 {
            f + 1
        } else {
            f
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact decimal-literal conversion is handled by `FromStr`; this maps a
    /// finite `f64` onto the exact dyadic rational it stores.
    pub fn from_f64_exact(v: f64) -> Result<Rational> {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite value {v}")));
        }
        if v == 0.0 {
            return Ok(Rational::ZERO);
        }
        let bits = v.to_bits();
        let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac as i128, -1074)
        } else {
            ((frac | (1u64 << 52)) as i128, exp - 1075)
        };
        if e >= 0 {
            let scale = 1i128.checked_shl(e as u32).filter(|_| e < 126).ok_or(OVERFLOW)?;
            Rational::new(sign * mant.checked_mul(scale).ok_or(OVERFLOW)?, 1)
        } else {
            let tz = mant.trailing_zeros() as i32;
            let shift = (-e).min(tz);
            let m = mant >> shift;
            let e2 = -e - shift;
            if e2 >= 126 {
                return Err(OVERFLOW);
            }
            Rational::new(sign * m, 1i128 << e2)
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // Overflow-free comparison by simultaneous continued-fraction descent.
        let (mut a, mut b, mut c, mut d) = (self.num, self.den, other.num, other.den);
        let mut flip = false;
        loop {
            let (qa, ra) = (a.div_euclid(b), a.rem_euclid(b));
            let (qc, rc) = (c.div_euclid(d), c.rem_euclid(d));
            let ord = qa.cmp(&qc);
            if ord != Ordering::Equal {
                return if flip { ord.reverse() } else { ord };
            }
            match (ra == 0, rc == 0) {
                (true, true) => return Ordering::Equal,
                (true, false) => {
                    return if flip { Ordering::Greater } else { Ordering::Less };
                }
                (false, true) => {
                    return if flip { Ordering::Less } else { Ordering::Greater };
                }
                (false, false) => {
                    // ra/b vs rc/d is the reverse of b/ra vs d/rc
                    (a, b, c, d) = (b, ra, d, rc);
                    flip = !flip;
                }
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_int(s: &str) -> Result<i128> {
    s.trim()
        .parse::<i128>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, integers, and decimal literals with an optional
    /// exponent (`-1.25`, `1e-9`, `2.5E3`). Decimals convert exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            return Rational::new(parse_int(p)?, parse_int(q)?);
        }
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], parse_int(&s[i + 1..])?),
            None => (s, 0),
        };
        let (neg, body) = match mant.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse(format!("{s:?}: empty number")));
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("{s:?}: not a rational literal")));
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: i128 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("{s:?}: too many digits")))?;
        if neg {
            num = -num;
        }
        let shift = exp - frac_part.len() as i128;
        let pow = |e: i128| -> Result<i128> {
            u32::try_from(e)
                .ok()
                .and_then(|e| 10i128.checked_pow(e))
                .ok_or(OVERFLOW)
        };
        if shift >= 0 {
            Rational::new(num.checked_mul(pow(shift)?).ok_or(OVERFLOW)?, 1)
        } else {
            Rational::new(num, pow(-shift)?)
        }
    }
}

/// `‖α‖`, the distance from `alpha` to the nearest integer, in `[0, 1/2]`.
pub fn dist_to_nearest_int(alpha: &Rational) -> Rational {
    let f = alpha.fract();
    // 1 - f = (den - num)/den, no overflow since 0 <= num < den.
    let g = Rational {
        num: f.den - f.num,
        den: f.den,
    };
    if f.num == 0 {
        Rational::ZERO
    } else {
        f.min(g)
    }
}

/// A rational approximation `u/q` of some `alpha`, together with the exact
/// error `|alpha - u/q|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RationalApprox {
    pub u: i128,
    pub q: i128,
    pub error: Rational,
}

impl RationalApprox {
    pub fn for_alpha(alpha: &Rational, u: i128, q: i128) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidParameter(format!("denominator {q} < 1")));
        }
        let error = alpha.checked_sub(&Rational::new(u, q)?)?.abs()?;
        Ok(RationalApprox { u, q, error })
    }

    pub fn as_rational(&self) -> Result<Rational> {
        Rational::new(self.u, self.q)
    }

    /// Re-derives the error from scratch and checks coprimality.
    pub fn verify(&self, alpha: &Rational) -> Result<bool> {
        let fresh = RationalApprox::for_alpha(alpha, self.u, self.q)?;
        Ok(fresh.error == self.error && self.u.gcd(&self.q) == 1)
    }

    /// `|alpha - u/q| < q^{-2}`.
    pub fn certifies_q_squared(&self) -> Result<bool> {
        let bound = Rational::new(1, self.q.checked_mul(self.q).ok_or(OVERFLOW)?)?;
        Ok(self.error < bound)
    }

    /// `|alpha - u/q| < 1/(q t)`.
    pub fn certifies_q_t(&self, t: &Rational) -> Result<bool> {
        if t.numer() <= 0 {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        let scaled = self.error.checked_mul_int(self.q)?.checked_mul(t)?;
        Ok(scaled < Rational::ONE)
    }
}

/// Partial quotients `[a0; a1, a2, ...]` of `alpha` (canonical finite form).
pub fn partial_quotients(alpha: &Rational) -> Vec<i128> {
    let (mut n, mut d) = (alpha.numer(), alpha.denom());
    let mut out = Vec::new();
    while d != 0 {
        let a = n.div_euclid(d);
        let r = n.rem_euclid(d);
        out.push(a);
        n = d;
        d = r;
    }
    out
}

/// All continued-fraction convergents of `alpha`, in order. The last one is
/// `alpha` itself with zero error.
pub fn convergents(alpha: &Rational) -> Result<Vec<RationalApprox>> {
    let (mut p_prev, mut p) = (0i128, 1i128);
    let (mut q_prev, mut q) = (1i128, 0i128);
    let mut out = Vec::new();
    for a in partial_quotients(alpha) {
        let p_next = a.checked_mul(p).and_then(|v| v.checked_add(p_prev)).ok_or(OVERFLOW)?;
        let q_next = a.checked_mul(q).and_then(|v| v.checked_add(q_prev)).ok_or(OVERFLOW)?;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
        out.push(RationalApprox::for_alpha(alpha, p, q)?);
    }
    Ok(out)
}

/// Best approximation with denominator `q`: `u` is the integer nearest to
/// `q alpha`, reduced so that `gcd(u, q) = 1` is part of the result.
pub(crate) fn nearest_for_denominator(alpha: &Rational, q: i128) -> Result<RationalApprox> {
    let u = alpha.checked_mul_int(q)?.round_nearest();
    let g = u.gcd(&q).max(1);
    RationalApprox::for_alpha(alpha, u / g, q / g)
}

/// Dirichlet approximation: `1 <= q <= big_q`, `gcd(u, q) = 1` and
/// `|alpha - u/q| <= 1/(q (big_q + 1))`, certified exactly.
///
/// Returns the smallest admissible `q`. The smallest denominator with
/// `‖q alpha‖ <= 1/(Q+1)` beats every smaller denominator, so it is a
/// convergent denominator; scanning convergents in order therefore finds it.
pub fn dirichlet_approx(alpha: &Rational, big_q: i128) -> Result<RationalApprox> {
    if big_q < 1 {
        return Err(Error::InvalidParameter(format!("Q = {big_q} must be >= 1")));
    }
    let q_plus_one = big_q.checked_add(1).ok_or(OVERFLOW)?;
    for conv in convergents(alpha)? {
        if conv.q > big_q {
            break;
        }
        let cand = nearest_for_denominator(alpha, conv.q)?;
        if cand.q != conv.q {
            continue;
        }
        if satisfies_dirichlet(&cand, q_plus_one)? {
            debug_assert!(cand.verify(alpha)?);
            return Ok(cand);
        }
    }
    Err(Error::Overflow("no certified Dirichlet approximation found"))
}

/// `error <= 1/(q (Q+1))`, exactly.
fn satisfies_dirichlet(approx: &RationalApprox, q_plus_one: i128) -> Result<bool> {
    let scaled = approx
        .error
        .checked_mul_int(approx.q)?
        .checked_mul_int(q_plus_one)?;
    Ok(scaled <= Rational::ONE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn nearest_int_distance_examples() {
        assert_eq!(dist_to_nearest_int(&r(7, 3)), r(1, 3));
        assert_eq!(dist_to_nearest_int(&r(1, 2)), r(1, 2));
        assert_eq!(dist_to_nearest_int(&r(-5, 4)), r(1, 4));
        assert_eq!(dist_to_nearest_int(&r(4, 1)), Rational::ZERO);
    }

    #[test]
    fn convergent_examples() {
        let pairs = |a: Rational| -> Vec<(i128, i128)> {
            convergents(&a).unwrap().iter().map(|c| (c.u, c.q)).collect()
        };
        assert_eq!(pairs(r(7, 3)), vec![(2, 1), (7, 3)]);
        assert_eq!(pairs(r(13, 40)), vec![(0, 1), (1, 3), (13, 40)]);
        assert_eq!(pairs(r(1, 2)), vec![(0, 1), (1, 2)]);
        let last = *convergents(&r(-17, 5)).unwrap().last().unwrap();
        assert_eq!((last.u, last.q, last.error), (-17, 5, Rational::ZERO));
    }

    #[test]
    fn dirichlet_examples() {
        let a = dirichlet_approx(&r(13, 40), 6).unwrap();
        assert_eq!((a.u, a.q, a.error), (1, 3, r(1, 120)));
        let a = dirichlet_approx(&r(1, 2), 10).unwrap();
        assert_eq!((a.u, a.q, a.error), (1, 2, Rational::ZERO));
        let a = dirichlet_approx(&Rational::ZERO, 5).unwrap();
        assert_eq!((a.u, a.q, a.error), (0, 1, Rational::ZERO));
        assert!(dirichlet_approx(&r(1, 3), 0).is_err());
    }

    #[test]
    fn parse_literals() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), r(1, 2));
        assert_eq!("-1.25".parse::<Rational>().unwrap(), r(-5, 4));
        assert_eq!("1e-9".parse::<Rational>().unwrap(), r(1, 1_000_000_000));
        assert_eq!("2.5E3".parse::<Rational>().unwrap(), r(2500, 1));
        assert_eq!("7".parse::<Rational>().unwrap(), r(7, 1));
        assert!("abc".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let big = Rational::from_int(i128::MAX / 2 + 1);
        assert_eq!(big.checked_add(&big), Err(OVERFLOW));
        assert!(big.checked_mul_int(3).is_err());
    }

    #[test]
    fn ordering_matches_cross_multiplication() {
        let vals = [r(1, 3), r(-2, 7), r(5, 2), r(1, 2), r(-1, 1), r(10, 3), r(0, 1)];
        for a in vals {
            for b in vals {
                let cross = (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()));
                assert_eq!(a.cmp(&b), cross, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn exact_f64_conversion() {
        assert_eq!(Rational::from_f64_exact(0.75).unwrap(), r(3, 4));
        assert_eq!(Rational::from_f64_exact(-3.0).unwrap(), r(-3, 1));
        assert_eq!(Rational::from_f64_exact(1e4).unwrap(), r(10000, 1));
    }

    #[test]
    fn certificates() {
        let alpha = r(13, 40);
        let a = RationalApprox::for_alpha(&alpha, 1, 3).unwrap();
        assert!(a.certifies_q_squared().unwrap()); // 1/120 < 1/9
        assert!(a.certifies_q_t(&r(39, 1)).unwrap()); // 1/120 < 1/117
        assert!(!a.certifies_q_t(&r(40, 1)).unwrap()); // 1/120 = 1/120
        assert!(a.verify(&alpha).unwrap());
    }
}
