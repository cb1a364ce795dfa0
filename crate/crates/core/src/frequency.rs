//! Characters of `Z`: `x -> e^{2 pi i theta x}` with `theta` in `[0, 1)`.
//!
//! Phases `theta * x mod 1` are reduced exactly. Rational `j/q` reduces in
//! integers; a float `theta` is split as `m 2^e` and the product is reduced
//! in `i128`, so large `x` never loses the fractional part.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Frequency {
    /// A float `theta` in `[0, 1)`.
    Real(f64),
    /// `num/den` in lowest terms with `0 <= num < den`.
    Rational { num: u64, den: u64 },
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `e^{2 pi i p}` for `p` in `[0, 1)`, exact at quarter turns.
pub fn unit(p: f64) -> Complex64 {
    if p == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if p == 0.25 {
        Complex64::new(0.0, 1.0)
    } else if p == 0.5 {
        Complex64::new(-1.0, 0.0)
    } else if p == 0.75 {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = (std::f64::consts::TAU * p).sin_cos();
        Complex64::new(c, s)
    }
}

impl Frequency {
    pub const TRIVIAL: Frequency = Frequency::Rational { num: 0, den: 1 };

    pub fn real(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(LabError::domain(format!("frequency must be finite, got {theta}")));
        }
        let t = theta.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        Ok(Frequency::Real(if t >= 1.0 { 0.0 } else { t }))
    }

    pub fn rational(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(LabError::domain("frequency denominator must be positive"));
        }
        let r = num.rem_euclid(den as i64) as u64;
        let g = gcd(r, den);
        Ok(Frequency::Rational {
            num: r / g,
            den: den / g,
        })
    }

    pub fn theta(&self) -> f64 {
        match *self {
            Frequency::Real(t) => t,
            Frequency::Rational { num, den } => num as f64 / den as f64,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.theta() == 0.0
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Frequency::Rational { .. })
    }

    /// Denominator of a rational frequency.
    pub fn period(&self) -> Option<u64> {
        match *self {
            Frequency::Rational { den, .. } => Some(den),
            Frequency::Real(_) => None,
        }
    }

    /// `-theta mod 1`.
    pub fn negated(&self) -> Frequency {
        match *self {
            Frequency::Real(t) => Frequency::Real(if t == 0.0 { 0.0 } else { 1.0 - t }),
            Frequency::Rational { num, den } => Frequency::Rational {
                num: (den - num) % den,
                den,
            },
        }
    }

    /// `theta * x mod 1`, in `[0, 1)`.
    pub fn phase(&self, x: i64) -> f64 {
        match *self {
            Frequency::Rational { num, den } => {
                let r = (num as i128 * x as i128).rem_euclid(den as i128);
                r as f64 / den as f64
            }
            Frequency::Real(t) => real_phase(t, x),
        }
    }

    /// `e^{2 pi i theta x}`.
    pub fn character(&self, x: i64) -> Complex64 {
        unit(self.phase(x))
    }

    /// Distance from `theta * x` to the nearest integer.
    pub fn circle_norm(&self, x: i64) -> f64 {
        let p = self.phase(x);
        p.min(1.0 - p)
    }
}

fn real_phase(t: f64, x: i64) -> f64 {
    if t == 0.0 || x == 0 {
        return 0.0;
    }
    let bits = t.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    // t = m 2^e exactly
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | 1 << 52, exp - 1075)
    };
    let shift = -e;
    if shift >= 116 {
        // m |x| < 2^116 <= 2^shift: the product is already below 1 in magnitude
        let v = t * x as f64;
        return v.rem_euclid(1.0);
    }
    let modulus = 1i128 << shift;
    let r = (m as i128 * x as i128).rem_euclid(modulus);
    let p = r as f64 / modulus as f64;
    if p >= 1.0 {
        0.0
    } else {
        p
    }
}

impl FromStr for Frequency {
    type Err = LabError;

    /// `"0.41421356"` (float), `"j/q"` or an integer (exact).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(j) = t.parse::<i64>() {
            return Frequency::rational(j, 1);
        }
        if let Some((j, q)) = t.split_once('/') {
            let j: i64 = j.trim().parse().map_err(|_| LabError::parse(format!("bad frequency {s:?}")))?;
            let q: u64 = q.trim().parse().map_err(|_| LabError::parse(format!("bad frequency {s:?}")))?;
            return Frequency::rational(j, q);
        }
        let v: f64 = t.parse().map_err(|_| LabError::parse(format!("bad frequency {s:?}")))?;
        Frequency::real(v)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Frequency::Real(t) => write!(f, "{t}"),
            Frequency::Rational { num, den: 1 } => write!(f, "{num}"),
            Frequency::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl TryFrom<String> for Frequency {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Frequency> for String {
    fn from(f: Frequency) -> String {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literals() {
        assert_eq!("1/2".parse::<Frequency>().unwrap(), Frequency::Rational { num: 1, den: 2 });
        assert_eq!("-1/3".parse::<Frequency>().unwrap(), Frequency::Rational { num: 2, den: 3 });
        assert_eq!("4/4".parse::<Frequency>().unwrap(), Frequency::TRIVIAL);
        assert_eq!("1.25".parse::<Frequency>().unwrap(), Frequency::Real(0.25));
        assert!("x".parse::<Frequency>().is_err());
        assert!("1/0".parse::<Frequency>().is_err());
        for lit in ["3/7", "0.41421356", "0"] {
            let f: Frequency = lit.parse().unwrap();
            assert_eq!(f.to_string().parse::<Frequency>().unwrap(), f);
        }
    }

    #[test]
    fn quarter_turns_are_exact() {
        let half = Frequency::rational(1, 2).unwrap();
        assert_eq!(half.character(3), Complex64::new(-1.0, 0.0));
        assert_eq!(Frequency::Real(0.5).character(7), Complex64::new(-1.0, 0.0));
        assert_eq!(Frequency::Real(0.25).character(5), Complex64::new(0.0, 1.0));
        assert_eq!(Frequency::TRIVIAL.character(123), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn float_phase_survives_large_arguments() {
        let t = std::f64::consts::SQRT_2 - 1.0;
        let x = 1_000_000_000_000_000i64;
        // exact rational value of the float times x, reduced by big integers
        let bits = t.to_bits();
        let m = (bits & ((1u64 << 52) - 1)) | 1 << 52;
        let e = ((bits >> 52) & 0x7ff) as i32 - 1075;
        let prod = num_bigint::BigInt::from(m) * x;
        let modulus = num_bigint::BigInt::from(1) << (-e) as u32;
        let r = ((prod % &modulus) + &modulus) % &modulus;
        let expect = num_traits::ToPrimitive::to_f64(&r).unwrap() / 2f64.powi(-e);
        assert_eq!(Frequency::Real(t).phase(x), expect);
        // the naive product has no fractional digits left
        assert_ne!((t * x as f64).fract(), expect);
    }

    #[test]
    fn circle_norm_examples() {
        let q = Frequency::rational(1, 4).unwrap();
        assert_eq!(q.circle_norm(4), 0.0);
        assert_eq!(q.circle_norm(1), 0.25);
        assert_eq!(q.circle_norm(3), 0.25);
    }

    proptest! {
        #[test]
        fn phase_is_additive(t in 0.0f64..1.0, x in -1_000_000i64..1_000_000, y in -1_000_000i64..1_000_000) {
            let f = Frequency::Real(t);
            let lhs = f.phase(x + y);
            let rhs = (f.phase(x) + f.phase(y)).rem_euclid(1.0);
            let d = (lhs - rhs).abs();
            prop_assert!(d.min(1.0 - d) < 1e-12);
        }

        #[test]
        fn negation_conjugates(num in 0i64..100, den in 1u64..100, x in -1000i64..1000) {
            let f = Frequency::rational(num, den).unwrap();
            let a = f.character(x);
            let b = f.negated().character(x);
            prop_assert!((a.conj() - b).norm() < 1e-12);
        }
    }
}
