//! Integer sequences for Weyl-sum experiments, and the Weyl averages
//! `N^{-1} sum_{n <= N} e^{2 pi i theta a_n}`.
//!
//! Sums run over fixed chunks of `n`; chunk partial sums are added in chunk
//! order, so the result does not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::cap_bits;
use crate::error::{LabError, Result};
use crate::floors::{floor_logpow, floor_pow, Decimal, ExactPolynomial};
use crate::frequency::Frequency;
use crate::rules::{call_form, split_top, SetRule};

pub const WEYL_CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum HartmanSequence {
    /// `floor(n^c)`, `c > 0` not an integer.
    Pow(Decimal),
    /// `floor(p(n))`, coefficients constant term first.
    Poly(Vec<Decimal>, ExactPolynomial),
    /// `floor(exp((ln n)^c))`.
    LogPow(Decimal),
    /// Positive members of a set, in increasing order.
    Custom(SetRule),
}

impl PartialEq for HartmanSequence {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl HartmanSequence {
    pub fn pow(c: &str) -> Result<Self> {
        let c: Decimal = c.parse()?;
        if !c.is_positive() || c.is_integer() {
            return Err(LabError::domain(format!("power exponent must be positive and not an integer, got {c}")));
        }
        Ok(HartmanSequence::Pow(c))
    }

    pub fn poly(coeffs: Vec<Decimal>) -> Result<Self> {
        let p = ExactPolynomial::new(&coeffs)?;
        Ok(HartmanSequence::Poly(coeffs, p))
    }

    pub fn identity() -> Self {
        HartmanSequence::poly(vec!["0".parse().unwrap(), "1".parse().unwrap()]).unwrap()
    }

    pub fn logpow(c: &str) -> Result<Self> {
        let c: Decimal = c.parse()?;
        if !c.is_positive() {
            return Err(LabError::domain(format!("log-power exponent must be positive, got {c}")));
        }
        Ok(HartmanSequence::LogPow(c))
    }

    /// `a_n` for `n >= 1`; not available for `Custom`.
    pub fn term(&self, n: u64) -> Result<i64> {
        match self {
            HartmanSequence::Pow(c) => floor_pow(n, c),
            HartmanSequence::Poly(_, p) => p.floor_at(n),
            HartmanSequence::LogPow(c) => floor_logpow(n, c),
            HartmanSequence::Custom(_) => Err(LabError::domain("custom sequences are generated, not indexed")),
        }
    }

    /// `a_from, ..., a_{from + count - 1}`.
    pub fn terms(&self, from: u64, count: u64) -> Result<Vec<i64>> {
        if let HartmanSequence::Custom(rule) = self {
            let all = custom_terms(rule, from + count - 1)?;
            return Ok(all[(from - 1) as usize..].to_vec());
        }
        (from..from + count).map(|n| self.term(n)).collect()
    }
}

/// The first `count` positive members of `rule`, scanning upward in blocks.
fn custom_terms(rule: &SetRule, count: u64) -> Result<Vec<i64>> {
    let cap = cap_bits() as i64;
    let block = cap.min(1 << 20);
    let mut out = Vec::with_capacity(count as usize);
    let mut lo = 1i64;
    while (out.len() as u64) < count {
        if lo > cap {
            return Err(LabError::capacity(
                format!("scan for {count} members of {rule}"),
                lo as u128,
                cap as u128,
            ));
        }
        let hi = lo + block - 1;
        let bits = rule.materialize(lo, hi)?;
        out.extend(bits.iter_ones().map(|i| lo + i as i64).take((count - out.len() as u64) as usize));
        lo = hi + 1;
    }
    Ok(out)
}

/// The first `count` terms, exact.
pub fn hartman_generate(seq: &HartmanSequence, count: u64) -> Result<Vec<i64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if let HartmanSequence::Custom(rule) = seq {
        return custom_terms(rule, count);
    }
    let chunks: Vec<Vec<i64>> = (0..count.div_ceil(WEYL_CHUNK))
        .into_par_iter()
        .map(|c| {
            let from = 1 + c * WEYL_CHUNK;
            seq.terms(from, WEYL_CHUNK.min(count + 1 - from))
        })
        .collect::<Result<_>>()?;
    Ok(chunks.concat())
}

/// First `n` (1-based) with `a_n <= a_{n-1}`.
pub fn first_non_increase(terms: &[i64]) -> Option<usize> {
    terms.windows(2).position(|w| w[1] <= w[0]).map(|i| i + 2)
}

/// `N^{-1} sum_{n=1}^{N} e^{2 pi i theta a_n}`; exactly `1` at `theta = 0`.
pub fn weyl_average(seq: &HartmanSequence, theta: &Frequency, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(LabError::domain("Weyl average needs N >= 1"));
    }
    if theta.is_trivial() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let partials: Vec<Complex64> = if let HartmanSequence::Custom(rule) = seq {
        let terms = custom_terms(rule, n)?;
        terms
            .par_chunks(WEYL_CHUNK as usize)
            .map(|c| c.iter().map(|&a| theta.character(a)).sum())
            .collect()
    } else {
        (0..n.div_ceil(WEYL_CHUNK))
            .into_par_iter()
            .map(|c| {
                let from = 1 + c * WEYL_CHUNK;
                let to = (from + WEYL_CHUNK - 1).min(n);
                let mut acc = Complex64::new(0.0, 0.0);
                for k in from..=to {
                    acc += theta.character(seq.term(k)?);
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?
    };
    let total: Complex64 = partials.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    Ok(total / n as f64)
}

impl FromStr for HartmanSequence {
    type Err = LabError;

    /// `pow(2.5)`, `poly(1,0,0.5)`, `logpow(1.2)`, `custom(<set rule>)`, `identity`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_form(s)?;
        let arg = || args.ok_or_else(|| LabError::parse(format!("{name} needs arguments")));
        match name {
            "pow" => HartmanSequence::pow(arg()?.trim()),
            "logpow" => HartmanSequence::logpow(arg()?.trim()),
            "poly" => HartmanSequence::poly(
                split_top(arg()?, ',')
                    .iter()
                    .map(|c| c.parse())
                    .collect::<Result<_>>()?,
            ),
            "custom" => Ok(HartmanSequence::Custom(arg()?.parse()?)),
            "identity" => Ok(HartmanSequence::identity()),
            other => Err(LabError::parse(format!("unknown sequence {other:?}"))),
        }
    }
}

impl fmt::Display for HartmanSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HartmanSequence::Pow(c) => write!(f, "pow({c})"),
            HartmanSequence::LogPow(c) => write!(f, "logpow({c})"),
            HartmanSequence::Poly(cs, _) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly({})", parts.join(","))
            }
            HartmanSequence::Custom(r) => write!(f, "custom({r})"),
        }
    }
}

impl TryFrom<String> for HartmanSequence {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<HartmanSequence> for String {
    fn from(s: HartmanSequence) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> HartmanSequence {
        s.parse().unwrap()
    }

    #[test]
    fn literals() {
        for lit in ["pow(2.5)", "poly(1,0,0.5)", "logpow(1.2)", "custom(mod(3,1))"] {
            assert_eq!(seq(lit).to_string(), lit);
        }
        assert!("pow(2)".parse::<HartmanSequence>().is_err());
        assert!("pow(-0.5)".parse::<HartmanSequence>().is_err());
        assert!("wobble(1)".parse::<HartmanSequence>().is_err());
        assert_eq!(seq("identity"), seq("poly(0,1)"));
    }

    #[test]
    fn generated_terms() {
        assert_eq!(hartman_generate(&seq("pow(2.5)"), 4).unwrap(), vec![1, 5, 15, 32]);
        assert_eq!(hartman_generate(&HartmanSequence::identity(), 5).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(hartman_generate(&seq("custom(mod(3,1))"), 4).unwrap(), vec![1, 4, 7, 10]);
        assert_eq!(hartman_generate(&seq("poly(1,0,0.5)"), 3).unwrap(), vec![1, 3, 5]);
        let long = hartman_generate(&seq("pow(1.5)"), 200_000).unwrap();
        assert_eq!(long.len(), 200_000);
        assert_eq!(long[199_999], floor_pow(200_000, &"1.5".parse().unwrap()).unwrap());
    }

    #[test]
    fn logpow_increase_starts_after_the_second_term() {
        let t = hartman_generate(&seq("logpow(1.2)"), 1000).unwrap();
        assert_eq!(first_non_increase(&t), Some(2));
        assert_eq!(first_non_increase(&t[1..]), None);
    }

    #[test]
    fn weyl_examples() {
        let id = HartmanSequence::identity();
        let t0 = Frequency::TRIVIAL;
        assert_eq!(weyl_average(&seq("pow(2.5)"), &t0, 1000).unwrap(), Complex64::new(1.0, 0.0));
        let half = Frequency::rational(1, 2).unwrap();
        for n in [1u64, 2, 3, 999, 1000, 100_001] {
            assert!(weyl_average(&id, &half, n).unwrap().norm() <= 1.0 / n as f64);
        }
        let v = weyl_average(&seq("pow(2.5)"), &"0.41421356".parse().unwrap(), 1000).unwrap();
        assert!(v.norm() <= 1.0);
        assert!(weyl_average(&id, &half, 0).is_err());
    }

    #[test]
    fn weyl_matches_direct_sum() {
        let s = seq("pow(1.5)");
        let th: Frequency = "0.3".parse().unwrap();
        let n = 150_000;
        let terms = hartman_generate(&s, n).unwrap();
        let direct: Complex64 = terms
            .iter()
            .map(|&a| {
                let p = (0.3f64 * a as f64).rem_euclid(1.0);
                Complex64::from_polar(1.0, std::f64::consts::TAU * p)
            })
            .sum::<Complex64>()
            / n as f64;
        assert!((weyl_average(&s, &th, n).unwrap() - direct).norm() < 1e-6);
    }
}
