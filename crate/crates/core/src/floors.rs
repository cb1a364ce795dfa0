//! Certified integer floors of real-valued sequences.
//!
//! `n^c` with decimal `c = p/q` is exact: `floor(n^(p/q))` is the integer
//! `q`-th root of `n^p`. Polynomials with decimal coefficients are exact over a
//! common denominator. `exp((ln n)^c)` is transcendental, so its floor is taken
//! from `f64` when the value sits far enough from an integer and from binary
//! fixed point at escalating precision otherwise.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

/// Precisions tried, in bits, after `f64` fails to separate a value from an integer.
pub const ESCALATION_BITS: [u32; 4] = [128, 256, 512, 1024];

/// An exact nonnegative decimal such as `2.5`, kept with its source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    text: String,
    value: Ratio<BigInt>,
}

impl Decimal {
    pub fn value(&self) -> &Ratio<BigInt> {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.numer().to_f64().unwrap_or(f64::NAN) / self.value.denom().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive()
    }
}

impl FromStr for Decimal {
    type Err = LabError;

    /// Accepts `[-]digits[.digits]` and `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || LabError::parse(format!("not an exact decimal: {s:?}"));
        let value = if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ratio::new(p, q)
        } else {
            let (neg, body) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t),
            };
            let (int, frac) = body.split_once('.').unwrap_or((body, ""));
            if int.is_empty() && frac.is_empty() {
                return Err(bad());
            }
            if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
            let v = Ratio::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
            if neg {
                -v
            } else {
                v
            }
        };
        Ok(Decimal {
            text: t.to_string(),
            value,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn capacity_at(what: &str, n: u64) -> LabError {
    LabError::capacity(format!("{what} at n = {n}"), u128::MAX, i64::MAX as u128)
}

/// Largest `x` with `x^k <= v`.
fn iroot_u128(v: u128, k: u32) -> u128 {
    if v < 2 || k == 1 {
        return v;
    }
    let mut x = (v as f64).powf(1.0 / k as f64) as u128;
    let le = |x: u128| x.checked_pow(k).is_some_and(|p| p <= v);
    while x > 0 && !le(x) {
        x -= 1;
    }
    while le(x + 1) {
        x += 1;
    }
    x
}

/// `floor(n^c)` for a positive decimal exponent, exact.
pub fn floor_pow(n: u64, c: &Decimal) -> Result<i64> {
    if !c.is_positive() {
        return Err(LabError::domain(format!("exponent must be positive, got {c}")));
    }
    let (p, q) = (c.value.numer(), c.value.denom());
    let (Some(p), Some(q)) = (p.to_u32(), q.to_u32()) else {
        return Err(LabError::domain(format!("exponent {c} has too many digits")));
    };
    let root = match (n as u128).checked_pow(p) {
        Some(v) => iroot_u128(v, q),
        None => BigUint::from(n)
            .pow(p)
            .nth_root(q)
            .to_u128()
            .ok_or_else(|| capacity_at("floor power", n))?,
    };
    i64::try_from(root).map_err(|_| capacity_at("floor power", n))
}

/// `floor(p(n))` for a polynomial with exact decimal coefficients, constant term first.
#[derive(Clone, Debug)]
pub struct ExactPolynomial {
    // coefficients scaled to integers over a shared positive denominator
    scaled: Vec<BigInt>,
    denom: BigInt,
    small: Option<(Vec<i128>, i128)>,
}

impl ExactPolynomial {
    pub fn new(coeffs: &[Decimal]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(LabError::domain("polynomial needs at least one coefficient"));
        }
        let denom = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.value.denom()));
        let scaled: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.value.numer() * (&denom / c.value.denom()))
            .collect();
        let small = scaled
            .iter()
            .map(|v| v.to_i128())
            .collect::<Option<Vec<_>>>()
            .zip(denom.to_i128());
        Ok(ExactPolynomial { scaled, denom, small })
    }

    pub fn floor_at(&self, n: u64) -> Result<i64> {
        if let Some((cs, d)) = &self.small {
            // Horner in i128, falling back on overflow
            let x = n as i128;
            let mut acc: Option<i128> = Some(0);
            for c in cs.iter().rev() {
                acc = acc.and_then(|a| a.checked_mul(x)).and_then(|a| a.checked_add(*c));
            }
            if let Some(v) = acc {
                return i64::try_from(v.div_euclid(*d)).map_err(|_| capacity_at("polynomial", n));
            }
        }
        let x = BigInt::from(n);
        let v = self.scaled.iter().rev().fold(BigInt::zero(), |a, c| a * &x + c);
        v.div_floor(&self.denom)
            .to_i64()
            .ok_or_else(|| capacity_at("polynomial", n))
    }
}

// --- binary fixed point ---------------------------------------------------------

/// Reals as `BigInt / 2^bits`.
struct Fixed {
    bits: u32,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    fn ln2(&self) -> BigInt {
        // ln 2 = sum_{k>=1} 1 / (k 2^k)
        let mut sum = BigInt::zero();
        let mut k = 1u32;
        loop {
            let term = self.one() / (BigInt::from(k) << k);
            if term.is_zero() {
                return sum;
            }
            sum += term;
            k += 1;
        }
    }

    /// `ln x` for `x > 0`.
    fn ln(&self, x: &BigInt) -> BigInt {
        // x = m 2^k with m in [1, 2); ln m = 2 atanh((m - 1)/(m + 1))
        let k = x.bits() as i64 - 1 - self.bits as i64;
        let m = if k >= 0 { x >> k as usize } else { x << (-k) as usize };
        let one = self.one();
        let z = self.div(&(&m - &one), &(&m + &one));
        let z2 = self.mul(&z, &z);
        let mut power = z.clone();
        let mut sum = BigInt::zero();
        let mut j = 1u32;
        while !power.is_zero() {
            sum += &power / BigInt::from(j);
            power = self.mul(&power, &z2);
            j += 2;
        }
        (sum << 1) + self.ln2() * BigInt::from(k)
    }

    /// `e^y`.
    fn exp(&self, y: &BigInt) -> BigInt {
        let ln2 = self.ln2();
        // y = k ln 2 + r, |r| <= ln 2 / 2, then r / 2^S by Taylor and S squarings
        const S: u32 = 16;
        let k = (y + (&ln2 >> 1u32)).div_floor(&ln2);
        let r = y - &k * &ln2;
        let r = r >> S;
        let one = self.one();
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut i = 1u32;
        loop {
            term = self.mul(&term, &r) / BigInt::from(i);
            if term.is_zero() {
                break;
            }
            sum += &term;
            i += 1;
        }
        for _ in 0..S {
            sum = self.mul(&sum, &sum);
        }
        let k = k.to_i64().expect("exponent range");
        if k >= 0 {
            sum << k as usize
        } else {
            sum >> (-k) as usize
        }
    }
}

/// Attempts `floor(exp((ln n)^c))` in fixed point with `bits` fractional bits.
/// Returns `None` when the error bound straddles an integer.
fn logpow_fixed(n: u64, c: &Decimal, bits: u32) -> Option<BigInt> {
    const GUARD: u32 = 64;
    let fx = Fixed { bits: bits + GUARD };
    let ln_n = fx.ln(&(BigInt::from(n) << fx.bits));
    let ln_ln = fx.ln(&ln_n);
    let y = ln_ln * c.value.numer() / c.value.denom();
    let exponent = fx.exp(&y);
    let v = fx.exp(&exponent);
    let int = &v >> fx.bits;
    let frac = &v - (&int << fx.bits);
    // error budget: relative 2^-(bits) scaled by the size of the value and exponent
    let e_bound = (&exponent >> fx.bits) + 2u32;
    let err = ((&int + 1u32) * e_bound) << GUARD.saturating_sub(8);
    let one = fx.one();
    (frac > err && &one - &frac > err).then_some(int)
}

/// `floor(exp((ln n)^c))`, certified. `n = 1` gives `1`.
pub fn floor_logpow(n: u64, c: &Decimal) -> Result<i64> {
    if n == 0 {
        return Err(LabError::domain("log-power sequence starts at n = 1"));
    }
    if n == 1 {
        return Ok(1);
    }
    let cf = c.to_f64();
    let y = (n as f64).ln().powf(cf);
    let v = y.exp();
    if !v.is_finite() || v >= 9.0e18 {
        return Err(capacity_at("log power", n));
    }
    // a few ulps in ln, powf and exp, amplified by y in the final exponential
    let err = v * (y + 2.0) * 1e-14 + 1e-300;
    let fl = v.floor();
    if v < 4.0e15 && v - fl > err && fl + 1.0 - v > err {
        return Ok(fl as i64);
    }
    for &bits in &ESCALATION_BITS {
        if let Some(int) = logpow_fixed(n, c, bits) {
            return int.to_i64().ok_or_else(|| capacity_at("log power", n));
        }
    }
    Err(LabError::Precision {
        n,
        bits: *ESCALATION_BITS.last().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(d("2.5").value(), &Ratio::new(BigInt::from(5), BigInt::from(2)));
        assert_eq!(d("0.1").value(), &Ratio::new(BigInt::from(1), BigInt::from(10)));
        assert_eq!(d("3/6").value(), &Ratio::new(BigInt::from(1), BigInt::from(2)));
        assert!(d("2").is_integer());
        assert!("1e3".parse::<Decimal>().is_err());
        assert!(".".parse::<Decimal>().is_err());
        assert_eq!(d("-0.5").to_f64(), -0.5);
    }

    #[test]
    fn five_halves_power() {
        let c = d("2.5");
        let v: Vec<i64> = (1..=4).map(|n| floor_pow(n, &c).unwrap()).collect();
        assert_eq!(v, vec![1, 5, 15, 32]);
        // past u128 for n^p: 10^6 ^ 25 needs the big path
        assert_eq!(floor_pow(1_000_000, &d("2.5")).unwrap(), 1_000_000_000_000_000);
        assert_eq!(floor_pow(1_000_000, &d("1.5")).unwrap(), 1_000_000_000);
        assert_eq!(floor_pow(10, &d("0.35")).unwrap(), 2);
    }

    #[test]
    fn big_exponent_path_matches_small() {
        // 7/3 with n^7 in u128 vs 2.3333333 approximated: use p/q literals
        let c = d("7/3");
        for n in [2u64, 3, 1000, 123_456] {
            let direct = BigUint::from(n).pow(7).nth_root(3).to_u128().unwrap();
            assert_eq!(floor_pow(n, &c).unwrap() as u128, direct);
        }
        let c = d("41/40");
        let n = 5_000_000u64;
        let direct = BigUint::from(n).pow(41).nth_root(40);
        assert_eq!(BigUint::from(floor_pow(n, &c).unwrap() as u64), direct);
    }

    #[test]
    fn polynomial_floors() {
        let p = ExactPolynomial::new(&[d("1"), d("0"), d("0.5")]).unwrap();
        let v: Vec<i64> = (0..5).map(|n| p.floor_at(n).unwrap()).collect();
        assert_eq!(v, vec![1, 1, 3, 5, 9]);
        let id = ExactPolynomial::new(&[d("0"), d("1")]).unwrap();
        assert_eq!(id.floor_at(17).unwrap(), 17);
        let neg = ExactPolynomial::new(&[d("-0.5")]).unwrap();
        assert_eq!(neg.floor_at(3).unwrap(), -1);
    }

    #[test]
    fn fixed_point_constants() {
        let fx = Fixed { bits: 200 };
        let ln2 = fx.ln2();
        let approx = ln2.to_f64().unwrap() / 2f64.powi(200);
        assert!((approx - std::f64::consts::LN_2).abs() < 1e-15);
        let e = fx.exp(&fx.one());
        assert!((e.to_f64().unwrap() / 2f64.powi(200) - std::f64::consts::E).abs() < 1e-15);
        let ln10 = fx.ln(&(BigInt::from(10) << 200u32));
        assert!((ln10.to_f64().unwrap() / 2f64.powi(200) - 10f64.ln()).abs() < 1e-15);
        let small = fx.ln(&(BigInt::from(3) << 198u32));
        assert!((small.to_f64().unwrap() / 2f64.powi(200) - 0.75f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn logpow_start() {
        let c = d("1.2");
        let v: Vec<i64> = (1..=6).map(|n| floor_logpow(n, &c).unwrap()).collect();
        assert_eq!(v, vec![1, 1, 3, 4, 5, 7]);
        assert_eq!(floor_logpow(123_456, &c).unwrap(), 213_931_117);
        assert_eq!(floor_logpow(1_000_000, &c).unwrap(), 13_943_110_079);
    }

    #[test]
    fn logpow_fixed_agrees_with_f64_off_boundary() {
        let c = d("1.2");
        for n in [2u64, 10, 999, 123_456, 1_000_000] {
            let f = floor_logpow(n, &c).unwrap();
            let hp = logpow_fixed(n, &c, 256).unwrap();
            assert_eq!(BigInt::from(f), hp, "n = {n}");
        }
    }

    proptest! {
        #[test]
        fn integer_roots(v in any::<u64>(), k in 1u32..7) {
            let v = v as u128 * 977;
            let r = iroot_u128(v, k);
            prop_assert!(r.pow(k) <= v);
            prop_assert!((r + 1).checked_pow(k).is_none_or(|p| p > v));
        }
    }
}
