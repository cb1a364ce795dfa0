//! A small language of integer sets, used by the command line and configs.
//!
//! ```text
//! all | empty | even | odd | mod(q,r1,r2,...) | floor_pow(n,c) | dyadic_runs
//! union_intervals(a:b,c:d,...) | complement(R) | symmetric(R) | translate(R,t)
//! bitmask(path) | bohr(d=1; theta=...; eps=...; center=...)
//! ```
//!
//! `floor_pow(n,c)` is `{floor(n^c) : n >= 1}`; `dyadic_runs` is the union of
//! `[2^k, 2^k + k]` over `k >= 0`; `symmetric(R)` is `R cup -R`. A bitmask
//! file holds a `lo=<int>` line followed by `0`/`1` characters, one per integer
//! from `lo` upward.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bitset;
use crate::bohr::BohrSpec;
use crate::error::{LabError, Result};
use crate::floors::{floor_pow, Decimal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SetRule {
    All,
    Empty,
    Even,
    Odd,
    /// Integers congruent mod `q` to one of the sorted, distinct residues.
    Mod { q: u64, residues: Vec<u64> },
    FloorPow(Decimal),
    /// Inclusive intervals, as written.
    UnionIntervals(Vec<(i64, i64)>),
    DyadicRuns,
    Complement(Box<SetRule>),
    Symmetric(Box<SetRule>),
    Translate(Box<SetRule>, i64),
    Bitmask { path: String, lo: i64, bits: Bitset },
    Bohr(BohrSpec),
}

/// Splits `s` at top-level occurrences of `sep`.
pub(crate) fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// `name(args)` or bare `name`.
pub(crate) fn call_form(s: &str) -> Result<(&str, Option<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, None)),
        Some(i) => {
            let inner = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| LabError::parse(format!("unbalanced parentheses in {s:?}")))?;
            Ok((s[..i].trim(), Some(inner)))
        }
    }
}

fn int<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| LabError::parse(format!("bad {what}: {s:?}")))
}

impl SetRule {
    pub fn parse(s: &str) -> Result<SetRule> {
        s.parse()
    }

    pub fn residues(q: u64, residues: &[i64]) -> Result<SetRule> {
        if q == 0 {
            return Err(LabError::domain("modulus must be positive"));
        }
        let mut rs: Vec<u64> = residues.iter().map(|r| r.rem_euclid(q as i64) as u64).collect();
        rs.sort_unstable();
        rs.dedup();
        Ok(SetRule::Mod { q, residues: rs })
    }

    pub fn load_bitmask(path: &str) -> Result<SetRule> {
        let text = std::fs::read_to_string(Path::new(path))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.trim().strip_prefix("lo="))
            .ok_or_else(|| LabError::parse(format!("{path}: first line must be lo=<int>")))?;
        let lo: i64 = int(header, "bitmask offset")?;
        let body: Vec<bool> = lines
            .flat_map(|l| l.chars())
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(LabError::parse(format!("{path}: unexpected {other:?} in bitmask"))),
            })
            .collect::<Result<_>>()?;
        let bits = Bitset::from_indices(body.len(), body.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i));
        Ok(SetRule::Bitmask {
            path: path.to_string(),
            lo,
            bits,
        })
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            SetRule::All => true,
            SetRule::Empty => false,
            SetRule::Even => x.rem_euclid(2) == 0,
            SetRule::Odd => x.rem_euclid(2) == 1,
            SetRule::Mod { q, residues } => residues.binary_search(&(x.rem_euclid(*q as i64) as u64)).is_ok(),
            SetRule::FloorPow(c) => floor_pow_contains(c, x),
            SetRule::UnionIntervals(iv) => iv.iter().any(|&(a, b)| a <= x && x <= b),
            SetRule::DyadicRuns => {
                if x < 1 {
                    return false;
                }
                let k = 63 - x.leading_zeros() as i64;
                x - (1i64 << k) <= k
            }
            SetRule::Complement(r) => !r.contains(x),
            SetRule::Symmetric(r) => r.contains(x) || x.checked_neg().is_some_and(|y| r.contains(y)),
            SetRule::Translate(r, t) => x.checked_sub(*t).is_some_and(|y| r.contains(y)),
            SetRule::Bitmask { lo, bits, .. } => {
                x >= *lo && ((x - lo) as u64) < bits.len() as u64 && bits.contains((x - lo) as usize)
            }
            SetRule::Bohr(spec) => spec.contains(x),
        }
    }

    /// Least period, when the rule is visibly periodic.
    pub fn period(&self) -> Option<u64> {
        match self {
            SetRule::All | SetRule::Empty => Some(1),
            SetRule::Even | SetRule::Odd => Some(2),
            SetRule::Mod { q, residues } => Some(least_period(*q, residues)),
            SetRule::Complement(r) | SetRule::Translate(r, _) => r.period(),
            SetRule::Symmetric(r) => r.period(),
            SetRule::Bohr(spec) => spec.period(),
            _ => None,
        }
    }

    /// Membership over `[lo, hi]`; bit `i` is `lo + i`.
    pub fn materialize(&self, lo: i64, hi: i64) -> Result<Bitset> {
        if hi < lo {
            return Err(LabError::domain(format!("empty window [{lo}, {hi}]")));
        }
        let len = usize::try_from(hi as i128 - lo as i128 + 1)
            .map_err(|_| LabError::capacity("window", (hi as i128 - lo as i128 + 1) as u128, usize::MAX as u128))?;
        let out = match self {
            SetRule::All => Bitset::full(len),
            SetRule::Empty => Bitset::new(len),
            SetRule::Even => periodic_fill(lo, len, 2, &[0]),
            SetRule::Odd => periodic_fill(lo, len, 2, &[1]),
            SetRule::Mod { q, residues } => periodic_fill(lo, len, *q, residues),
            SetRule::FloorPow(c) => {
                let mut b = Bitset::new(len);
                if c.to_f64() <= 1.0 {
                    // increments of n^c never exceed 1, so every positive integer is hit
                    if hi >= 1 {
                        b.insert_range((1.max(lo) - lo) as usize, (hi - lo) as usize);
                    }
                } else if hi >= 1 {
                    let cf = c.to_f64();
                    let mut n = ((lo.max(1) as f64).powf(1.0 / cf) as u64).saturating_sub(2).max(1);
                    loop {
                        let v = floor_pow(n, c)?;
                        if v > hi {
                            break;
                        }
                        if v >= lo {
                            b.insert((v - lo) as usize);
                        }
                        n += 1;
                    }
                }
                b
            }
            SetRule::UnionIntervals(iv) => {
                let mut b = Bitset::new(len);
                for &(a, c) in iv {
                    let (a, c) = (a.max(lo), c.min(hi));
                    if a <= c {
                        b.insert_range((a - lo) as usize, (c - lo) as usize);
                    }
                }
                b
            }
            SetRule::DyadicRuns => {
                let mut b = Bitset::new(len);
                for k in 0..62i64 {
                    let (a, c) = (1i64 << k, (1i64 << k) + k);
                    if a > hi {
                        break;
                    }
                    let (a, c) = (a.max(lo), c.min(hi));
                    if a <= c {
                        b.insert_range((a - lo) as usize, (c - lo) as usize);
                    }
                }
                b
            }
            SetRule::Complement(r) => r.materialize(lo, hi)?.complement(),
            SetRule::Symmetric(r) => {
                let mut b = r.materialize(lo, hi)?;
                let neg = r.materialize(-hi, -lo)?.reversed();
                b.union_with(&neg);
                b
            }
            SetRule::Translate(r, t) => r.materialize(lo - t, hi - t)?,
            SetRule::Bitmask { lo: blo, bits, .. } => {
                let mut b = Bitset::new(len);
                for i in bits.iter_ones() {
                    let x = blo + i as i64;
                    if lo <= x && x <= hi {
                        b.insert((x - lo) as usize);
                    }
                }
                b
            }
            SetRule::Bohr(spec) => match spec.period() {
                Some(q) if q <= 1 << 20 => {
                    let residues: Vec<u64> = (0..q).filter(|&r| spec.contains(r as i64)).collect();
                    periodic_fill(lo, len, q, &residues)
                }
                _ => Bitset::from_predicate(len, |i| spec.contains(lo + i as i64)),
            },
        };
        Ok(out)
    }
}

fn least_period(q: u64, residues: &[u64]) -> u64 {
    (1..=q)
        .filter(|d| q.is_multiple_of(*d))
        .find(|&d| residues.iter().all(|r| residues.binary_search(&((r + d) % q)).is_ok()))
        .unwrap_or(q)
}

fn floor_pow_contains(c: &Decimal, x: i64) -> bool {
    if x < 1 {
        return false;
    }
    let cf = c.to_f64();
    if cf <= 1.0 {
        return true;
    }
    let guess = (x as f64).powf(1.0 / cf).round() as u64;
    (guess.saturating_sub(2).max(1)..=guess + 2).any(|n| floor_pow(n, c).is_ok_and(|v| v == x))
}

/// Bits for `{x in [lo, lo + len) : x mod q in residues}`.
fn periodic_fill(lo: i64, len: usize, q: u64, residues: &[u64]) -> Bitset {
    if q > 1 << 20 {
        let mut b = Bitset::new(len);
        for &r in residues {
            let first = (r as i64 - lo).rem_euclid(q as i64) as usize;
            if len > 0 {
                b.insert_progression(first, len - 1, q as usize);
            }
        }
        return b;
    }
    let q = q as usize;
    // the period, repeated far enough to read any 64-bit window from it
    let reps = (q + 128).div_ceil(q);
    let mut pattern = Bitset::new(q * reps);
    for rep in 0..reps {
        for &r in residues {
            pattern.insert(rep * q + r as usize);
        }
    }
    let pw = pattern.words();
    let read = |off: usize| -> u64 {
        let (w, b) = (off / 64, off % 64);
        if b == 0 {
            pw[w]
        } else {
            pw[w] >> b | pw[w + 1] << (64 - b)
        }
    };
    let nwords = len.div_ceil(64);
    let mut words = Vec::with_capacity(nwords);
    let mut off = lo.rem_euclid(q as i64) as usize;
    let step = 64 % q;
    for _ in 0..nwords {
        words.push(read(off));
        off += step;
        if off >= q {
            off -= q;
        }
    }
    Bitset::from_words(words, len)
}

impl FromStr for SetRule {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_form(s)?;
        let need = || args.ok_or_else(|| LabError::parse(format!("{name} needs arguments")));
        let rule = match name {
            "all" | "Z" => SetRule::All,
            "empty" => SetRule::Empty,
            "even" => SetRule::Even,
            "odd" => SetRule::Odd,
            "dyadic_runs" => SetRule::DyadicRuns,
            "mod" => {
                let parts = split_top(need()?, ',');
                if parts.len() < 2 {
                    return Err(LabError::parse("mod(q,r,...) needs a modulus and a residue"));
                }
                let q: u64 = int(parts[0], "modulus")?;
                let rs = parts[1..].iter().map(|p| int(p, "residue")).collect::<Result<Vec<i64>>>()?;
                SetRule::residues(q, &rs)?
            }
            "floor_pow" => {
                let parts = split_top(need()?, ',');
                let c = match parts.as_slice() {
                    [c] => c,
                    [n, c] if n.trim() == "n" => c,
                    _ => return Err(LabError::parse("floor_pow takes (n,c)")),
                };
                let c: Decimal = c.parse()?;
                if !c.is_positive() {
                    return Err(LabError::domain("floor_pow exponent must be positive"));
                }
                SetRule::FloorPow(c)
            }
            "union_intervals" => {
                let iv = split_top(need()?, ',')
                    .iter()
                    .map(|p| {
                        let (a, b) = p
                            .split_once(':')
                            .ok_or_else(|| LabError::parse(format!("interval {p:?} is not a:b")))?;
                        let (a, b): (i64, i64) = (int(a, "interval end")?, int(b, "interval end")?);
                        if a > b {
                            return Err(LabError::domain(format!("interval {a}:{b} is reversed")));
                        }
                        Ok((a, b))
                    })
                    .collect::<Result<_>>()?;
                SetRule::UnionIntervals(iv)
            }
            "complement" => SetRule::Complement(Box::new(need()?.parse()?)),
            "symmetric" => SetRule::Symmetric(Box::new(need()?.parse()?)),
            "translate" => {
                let parts = split_top(need()?, ',');
                let [r, t] = parts.as_slice() else {
                    return Err(LabError::parse("translate takes (rule,t)"));
                };
                SetRule::Translate(Box::new(r.parse()?), int(t, "translate amount")?)
            }
            "bitmask" => SetRule::load_bitmask(need()?.trim())?,
            "bohr" => SetRule::Bohr(s.trim().parse()?),
            other => return Err(LabError::parse(format!("unknown set rule {other:?}"))),
        };
        Ok(rule)
    }
}

impl fmt::Display for SetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetRule::All => f.write_str("all"),
            SetRule::Empty => f.write_str("empty"),
            SetRule::Even => f.write_str("even"),
            SetRule::Odd => f.write_str("odd"),
            SetRule::DyadicRuns => f.write_str("dyadic_runs"),
            SetRule::Mod { q, residues } => {
                write!(f, "mod({q}")?;
                for r in residues {
                    write!(f, ",{r}")?;
                }
                f.write_str(")")
            }
            SetRule::FloorPow(c) => write!(f, "floor_pow(n,{c})"),
            SetRule::UnionIntervals(iv) => {
                let parts: Vec<String> = iv.iter().map(|(a, b)| format!("{a}:{b}")).collect();
                write!(f, "union_intervals({})", parts.join(","))
            }
            SetRule::Complement(r) => write!(f, "complement({r})"),
            SetRule::Symmetric(r) => write!(f, "symmetric({r})"),
            SetRule::Translate(r, t) => write!(f, "translate({r},{t})"),
            SetRule::Bitmask { path, .. } => write!(f, "bitmask({path})"),
            SetRule::Bohr(spec) => write!(f, "{spec}"),
        }
    }
}

impl TryFrom<String> for SetRule {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SetRule> for String {
    fn from(r: SetRule) -> String {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> SetRule {
        s.parse().unwrap()
    }

    fn members(rule: &SetRule, lo: i64, hi: i64) -> Vec<i64> {
        let b = rule.materialize(lo, hi).unwrap();
        b.iter_ones().map(|i| lo + i as i64).collect()
    }

    #[test]
    fn literals_round_trip() {
        for lit in [
            "all",
            "empty",
            "even",
            "odd",
            "mod(5,1,3)",
            "floor_pow(n,2.5)",
            "union_intervals(-3:4,10:12)",
            "dyadic_runs",
            "complement(dyadic_runs)",
            "symmetric(floor_pow(n,2))",
            "translate(mod(3,0),1)",
            "complement(union_intervals(0:5))",
        ] {
            let rule = r(lit);
            assert_eq!(rule.to_string(), lit);
            assert_eq!(r(&rule.to_string()), rule);
        }
        assert_eq!(r("floor_pow(1.5)"), r("floor_pow(n,1.5)"));
        assert_eq!(r("mod(4, 6, 2)").to_string(), "mod(4,2)");
        assert!("mod(0,1)".parse::<SetRule>().is_err());
        assert!("nope".parse::<SetRule>().is_err());
        assert!("union_intervals(3:1)".parse::<SetRule>().is_err());
    }

    #[test]
    fn small_windows() {
        assert_eq!(members(&r("even"), -3, 3), vec![-2, 0, 2]);
        assert_eq!(members(&r("mod(3,1)"), -5, 5), vec![-5, -2, 1, 4]);
        assert_eq!(members(&r("floor_pow(n,2.5)"), 0, 40), vec![1, 5, 15, 32]);
        assert_eq!(members(&r("dyadic_runs"), 0, 20), vec![1, 2, 3, 4, 5, 6, 8, 9, 10, 11, 16, 17, 18, 19, 20]);
        assert_eq!(members(&r("symmetric(floor_pow(n,2))"), -10, 10), vec![-9, -4, -1, 1, 4, 9]);
        assert_eq!(members(&r("translate(mod(3,0),1)"), 0, 7), vec![1, 4, 7]);
        assert_eq!(members(&r("floor_pow(n,0.5)"), -2, 3), vec![1, 2, 3]);
    }

    #[test]
    fn periods() {
        assert_eq!(r("mod(6,1,4)").period(), Some(3));
        assert_eq!(r("mod(6,1)").period(), Some(6));
        assert_eq!(r("complement(even)").period(), Some(2));
        assert_eq!(r("dyadic_runs").period(), None);
    }

    #[test]
    fn bitmask_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        std::fs::write(&path, "lo=-2\n1011\n01\n").unwrap();
        let p = path.to_str().unwrap();
        let rule = SetRule::parse(&format!("bitmask({p})")).unwrap();
        assert_eq!(members(&rule, -10, 10), vec![-2, 0, 1, 3]);
        assert!(rule.contains(3) && !rule.contains(4));
        std::fs::write(&path, "1011\n").unwrap();
        assert!(SetRule::load_bitmask(p).is_err());
    }

    fn arb_rule() -> impl Strategy<Value = SetRule> {
        let leaf = prop_oneof![
            Just(SetRule::All),
            Just(SetRule::Even),
            Just(SetRule::Odd),
            Just(SetRule::DyadicRuns),
            (1u64..40, proptest::collection::vec(-50i64..50, 1..4)).prop_map(|(q, rs)| SetRule::residues(q, &rs).unwrap()),
            (1u32..40).prop_map(|k| SetRule::FloorPow(format!("{}.{}", 1 + k / 10, k % 10).parse().unwrap())),
            proptest::collection::vec((-300i64..300, 0i64..40), 1..4)
                .prop_map(|v| SetRule::UnionIntervals(v.into_iter().map(|(a, l)| (a, a + l)).collect())),
        ];
        leaf.prop_recursive(2, 6, 1, |inner| {
            prop_oneof![
                inner.clone().prop_map(|r| SetRule::Complement(Box::new(r))),
                inner.clone().prop_map(|r| SetRule::Symmetric(Box::new(r))),
                (inner, -100i64..100).prop_map(|(r, t)| SetRule::Translate(Box::new(r), t)),
            ]
        })
    }

    proptest! {
        #[test]
        fn materialize_agrees_with_membership(rule in arb_rule(), lo in -400i64..400, len in 1i64..600) {
            let hi = lo + len - 1;
            let b = rule.materialize(lo, hi).unwrap();
            for x in lo..=hi {
                prop_assert_eq!(b.contains((x - lo) as usize), rule.contains(x), "{} at {}", rule, x);
            }
            prop_assert_eq!(r(&rule.to_string()), rule);
        }
    }
}
