//! The polynomial large-sieve quantity
//! `Sigma_P = sum_{q <= Q} sum_{a mod P(q), (a, P(q)) = 1} |sum_{M < n <= M+N} v_n e(a n / P(q))|^2`
//! by brute force, and the shapes of its upper bounds.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::exponents;
use crate::diophantine::Rational;
use crate::error::{Error, Result};
use crate::summation::{neumaier_sum, unit, ComplexNeumaier};
use crate::vinogradov::Budget;

/// `P(x) = x^k + c_{k-1} x^{k-1} + ... + c_1 x`: monic with `P(0) = 0` by
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonicPoly {
    pub k: u32,
    /// `c_1, ..., c_{k-1}`
    pub lower: Vec<Rational>,
}

impl MonicPoly {
    pub fn new(k: u32, lower: Vec<Rational>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("degree {k} < 2")));
        }
        if lower.len() != k as usize - 1 {
            return Err(Error::InvalidParameter(format!(
                "degree {k} needs {} lower coefficients, got {}",
                k - 1,
                lower.len()
            )));
        }
        Ok(MonicPoly { k, lower })
    }

    pub fn monomial(k: u32) -> Result<Self> {
        MonicPoly::new(k, vec![Rational::ZERO; k.saturating_sub(1) as usize])
    }

    /// From the full coefficient list `c_1, ..., c_k`; `c_k` must be 1.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self> {
        match coeffs.split_last() {
            Some((lead, lower)) if *lead == Rational::ONE && !lower.is_empty() => {
                MonicPoly::new(coeffs.len() as u32, lower.to_vec())
            }
            Some(_) => Err(Error::Setting("polynomial must be monic of degree >= 2".into())),
            None => Err(Error::InvalidParameter("empty coefficient list".into())),
        }
    }

    pub fn eval(&self, q: i128) -> Result<Rational> {
        let mut acc = Rational::ONE;
        for c in self.lower.iter().rev() {
            acc = acc.checked_mul_int(q)?.checked_add(c)?;
        }
        acc.checked_mul_int(q)
    }

    /// `P(q)` as a positive integer modulus.
    pub fn modulus(&self, q: i128) -> Result<i128> {
        let v = self.eval(q)?;
        if !v.is_integer() || v.numer() <= 0 {
            return Err(Error::Setting(format!("P({q}) = {v} is not a positive integer")));
        }
        Ok(v.numer())
    }
}

fn totient(mut n: i128) -> i128 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// `Sigma_P` with `v[i] = v_{M+1+i}`, `N = v.len()`. Residues `a n mod P(q)`
/// are formed in integers; the per-`q` partial sums are added in ascending
/// `q` order.
pub fn sigma_p(p: &MonicPoly, q_max: u64, v: &[Complex64], m: i64, budget: &Budget) -> Result<f64> {
    if q_max == 0 || v.is_empty() {
        return Err(Error::InvalidParameter("need Q >= 1 and N >= 1".into()));
    }
    let moduli = (1..=2 * q_max as i128)
        .map(|q| p.modulus(q))
        .collect::<Result<Vec<_>>>()?;
    let n = v.len() as i128;
    let work = moduli[..q_max as usize]
        .iter()
        .try_fold(0u128, |acc, &pq| acc.checked_add((totient(pq) * n) as u128))
        .ok_or(Error::Overflow("sigma_p work estimate"))?;
    budget.check(work)?;
    let per_q: Vec<f64> = moduli[..q_max as usize]
        .par_iter()
        .map(|&pq| {
            let table: Vec<Complex64> = (0..pq)
                .map(|r| unit(if 2 * r > pq { r - pq } else { r } as f64 / pq as f64))
                .collect();
            let n0 = (m as i128 + 1).rem_euclid(pq);
            let terms = (1..=pq).filter(|a| a.gcd(&pq) == 1).map(|a| {
                let mut acc = ComplexNeumaier::new();
                let mut r = (a * n0) % pq;
                for vn in v {
                    acc.add(vn * table[r as usize]);
                    r = (r + a) % pq;
                }
                acc.value().norm_sqr()
            });
            neumaier_sum(terms)
        })
        .collect();
    Ok(neumaier_sum(per_q))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SieveBoundValue {
    /// The `N`- and `Q`-dependent part next to `Q^(k+1)`.
    pub core: f64,
    /// The competing term inside a `min`, when the bound has one.
    pub second_term: Option<f64>,
    /// `Q^eps ‖v‖^2 (Q^(k+1) + core)`.
    pub full: f64,
}

/// `A_k(Q, N) = N Q^(1 - 1/(k(k-1))) + N^(1 - 1/(k(k-1))) Q^(1 + 1/(k-1))`.
pub fn a_k(q: f64, n: f64, k: u32) -> f64 {
    let kf = k as f64;
    let e = 1.0 / (kf * (kf - 1.0));
    n * q.powf(1.0 - e) + n.powf(1.0 - e) * q.powf(1.0 + 1.0 / (kf - 1.0))
}

/// Bound shapes keyed `a_k`, `newplsi`, `conj1`, `zhao`; `newplsi` and `conj1` need
/// `k >= 3` and are omitted below it.
pub fn sieve_bounds(q: f64, n: f64, k: u32, v_norm_sq: f64, epsilon: f64) -> Result<BTreeMap<String, SieveBoundValue>> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be >= 2".into()));
    }
    if !(q >= 1.0) || !(n >= 1.0) || !(v_norm_sq >= 0.0) || !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter("need Q, N >= 1 and ‖v‖^2, eps >= 0".into()));
    }
    let kf = k as f64;
    let head = q.powf(kf + 1.0);
    let scale = q.powf(epsilon) * v_norm_sq;
    let value = |core: f64, second_term: Option<f64>| SieveBoundValue {
        core,
        second_term,
        full: scale * (head + core),
    };
    let ak = a_k(q, n, k);
    let mut out = BTreeMap::new();
    out.insert("a_k".to_string(), value(ak, None));
    out.insert("zhao".to_string(), value(n, None));
    if k >= 3 {
        let omega = exponents(k)?.omega.to_f64();
        let new = n.powf(1.0 - omega) * q.powf(1.0 + (2.0 * kf - 1.0) * omega);
        out.insert("newplsi".to_string(), value(ak.min(new), Some(new)));
        let conj = n.powf(1.0 - omega) * q.powf(1.0 + kf * omega);
        out.insert("conj1".to_string(), value(ak.min(conj), Some(conj)));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeSetting {
    pub range_ok: bool,
    pub setting_ok: bool,
    pub details: String,
}

/// `Q^k <= N <= Q^(2k)`, and `P(q) >= Q^k / 2^k > 0` for integers `q` in
/// `[Q, 2Q]`. Monicity and `P(0) = 0` hold by construction.
pub fn range_and_setting_check(p: &MonicPoly, q: u64, n: u64) -> Result<RangeSetting> {
    if q == 0 {
        return Err(Error::InvalidParameter("Q must be positive".into()));
    }
    let qk = (q as u128).checked_pow(p.k);
    let q2k = (q as u128).checked_pow(2 * p.k);
    let n = n as u128;
    let range_ok = qk.is_some_and(|lo| lo <= n) && q2k.is_none_or(|hi| n <= hi);
    let floor = Rational::new(
        (q as i128).checked_pow(p.k).ok_or(Error::Overflow("Q^k"))?,
        1i128 << p.k,
    )?;
    let mut bad = Vec::new();
    for x in q as i128..=2 * q as i128 {
        let v = p.eval(x)?;
        if v.numer() <= 0 || v < floor {
            bad.push(format!("P({x}) = {v}"));
        }
    }
    let details = if bad.is_empty() {
        format!("P(q) >= Q^k/2^k on [{q}, {}]", 2 * q)
    } else {
        format!("below Q^k/2^k or nonpositive: {}", bad.join(", "))
    };
    Ok(RangeSetting {
        range_ok,
        setting_ok: bad.is_empty(),
        details,
    })
}

/// Named coefficient sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VSequence {
    Ones,
    Alternating,
    Random,
}

impl std::str::FromStr for VSequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(VSequence::Ones),
            "alternating" => Ok(VSequence::Alternating),
            "random" => Ok(VSequence::Random),
            _ => Err(Error::Parse(format!("unknown sequence {s:?}"))),
        }
    }
}

/// `N` coefficients; `Random` draws real and imaginary parts uniformly from
/// `[-1, 1)` with ChaCha8 seeded by `seed`.
pub fn v_sequence(kind: VSequence, n: usize, seed: u64) -> Vec<Complex64> {
    match kind {
        VSequence::Ones => vec![Complex64::new(1.0, 0.0); n],
        VSequence::Alternating => (0..n)
            .map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect(),
        VSequence::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        }
    }
}

pub fn norm_sq(v: &[Complex64]) -> f64 {
    neumaier_sum(v.iter().map(|z| z.norm_sqr()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SieveReport {
    pub q: u64,
    pub n: u64,
    pub m: i64,
    pub sigma_p: f64,
    pub v_norm_sq: f64,
    pub bounds: BTreeMap<String, SieveBoundValue>,
    pub range_ok: bool,
    pub setting_ok: bool,
    pub details: String,
}

pub fn sieve_report(p: &MonicPoly, q: u64, v: &[Complex64], m: i64, epsilon: f64, budget: &Budget) -> Result<SieveReport> {
    let rs = range_and_setting_check(p, q, v.len() as u64)?;
    let sigma = sigma_p(p, q, v, m, budget)?;
    let v_norm_sq = norm_sq(v);
    Ok(SieveReport {
        q,
        n: v.len() as u64,
        m,
        sigma_p: sigma,
        v_norm_sq,
        bounds: sieve_bounds(q as f64, v.len() as f64, p.k, v_norm_sq, epsilon)?,
        range_ok: rs.range_ok,
        setting_ok: rs.setting_ok,
        details: rs.details,
    })
}
