//! The block construction of two sets `A, B` of positive density along the
//! intervals `F_n = [a_n, b_n]` whose sumset carries no Bohr structure for the
//! window mean along `F_n`, with finite-scale checks of its claims.
//!
//! `I_n = [a_n, a_n + q_n]`, `J_n = [a_n + q_n + 1, b_n]` with
//! `q_n = floor((b_n - a_n) / 2)`; `A_n` is the evens of `I_n` with the odds of
//! `J_n`, and `B_n` is the evens of `F_n`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitset;
use crate::density::{cap_bits, WindowSet};
use crate::error::{LabError, Result};
use crate::means::{chunked_sum, ser_complex, BoundedFunction, TrigPolynomial};

pub const COND_DOUBLE_A: &str = "2a_n > b_n";
pub const COND_NONEMPTY: &str = "a_n < b_n";
pub const COND_GAP: &str = "a_{n+1} > 2b_n";
pub const COND_RATIO: &str = "(b_{n+1}-a_{n+1})/b_n strictly increasing";

/// `b_n = floor(r a_n)` and `a_{n+1} = k b_n` or `k n b_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GrowthPolicy {
    pub b_ratio: Ratio<u64>,
    pub a_factor: u64,
    pub a_linear: bool,
}

impl Default for GrowthPolicy {
    fn default() -> Self {
        GrowthPolicy {
            b_ratio: Ratio::new(19, 10),
            a_factor: 3,
            a_linear: true,
        }
    }
}

impl FromStr for GrowthPolicy {
    type Err = LabError;

    /// `b:19/10,a:3n`; `b:3` and `a:1` are also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || LabError::parse(format!("bad growth policy {s:?}, expected like b:19/10,a:3n"));
        let (mut ratio, mut factor) = (None, None);
        for part in s.split(',') {
            let (k, v) = part.trim().split_once(':').ok_or_else(bad)?;
            match k.trim() {
                "b" => {
                    let v = v.trim();
                    ratio = Some(match v.split_once('/') {
                        Some((p, q)) => {
                            let q: u64 = q.parse().map_err(|_| bad())?;
                            if q == 0 {
                                return Err(bad());
                            }
                            Ratio::new(p.parse().map_err(|_| bad())?, q)
                        }
                        None => Ratio::from_integer(v.parse().map_err(|_| bad())?),
                    })
                }
                "a" => {
                    let v = v.trim();
                    let (num, linear) = match v.strip_suffix('n') {
                        Some(num) => (num, true),
                        None => (v, false),
                    };
                    factor = Some((num.parse::<u64>().map_err(|_| bad())?, linear));
                }
                _ => return Err(bad()),
            }
        }
        let (a_factor, a_linear) = factor.ok_or_else(bad)?;
        Ok(GrowthPolicy {
            b_ratio: ratio.ok_or_else(bad)?,
            a_factor,
            a_linear,
        })
    }
}

impl fmt::Display for GrowthPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b:{},a:{}{}", self.b_ratio, self.a_factor, if self.a_linear { "n" } else { "" })
    }
}

impl TryFrom<String> for GrowthPolicy {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GrowthPolicy> for String {
    fn from(p: GrowthPolicy) -> String {
        p.to_string()
    }
}

/// Validated block endpoints; `a[n - 1] = a_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExampleParameters {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

fn overflow(n: usize) -> LabError {
    LabError::capacity(format!("block {n} endpoint"), u64::MAX as u128 + 1, u64::MAX as u128)
}

impl ExampleParameters {
    /// The first `depth` blocks under `policy`, starting from `a_1`.
    pub fn build(a1: u64, policy: GrowthPolicy, depth: usize) -> Result<Self> {
        if a1 < 2 {
            return Err(LabError::domain(format!("a_1 must be at least 2, got {a1}")));
        }
        if depth == 0 {
            return Err(LabError::domain("depth must be at least 1"));
        }
        let (p, q) = (*policy.b_ratio.numer() as u128, *policy.b_ratio.denom() as u128);
        let (mut a, mut b) = (vec![a1], Vec::new());
        for n in 1..=depth {
            let bn = (p * a[n - 1] as u128 / q).try_into().map_err(|_| overflow(n))?;
            b.push(bn);
            if n < depth {
                let k = policy.a_factor * if policy.a_linear { n as u64 } else { 1 };
                a.push(k.checked_mul(bn).ok_or_else(|| overflow(n + 1))?);
            }
        }
        Self::from_sequences(a, b)
    }

    /// Checks, for each `n` in turn, `2a_n > b_n`, `a_n < b_n`,
    /// `a_{n+1} > 2b_n`, then the ratio increase at `n`.
    pub fn from_sequences(a: Vec<u64>, b: Vec<u64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(LabError::structural(format!(
                "need equally many a_n and b_n, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let fail = |condition, n| Err(LabError::Construction { condition, n });
        let d = a.len();
        let ratio = |n: usize| ((b[n] - a[n]) as u128, b[n - 1] as u128);
        for i in 0..d {
            let n = i + 1;
            if 2 * a[i] as u128 <= b[i] as u128 {
                return fail(COND_DOUBLE_A, n);
            }
            if a[i] >= b[i] {
                return fail(COND_NONEMPTY, n);
            }
            if i + 1 < d && a[i + 1] as u128 <= 2 * b[i] as u128 {
                return fail(COND_GAP, n);
            }
            if i >= 1 && i + 1 < d {
                let (num1, den1) = ratio(i + 1);
                let (num0, den0) = ratio(i);
                if num1 * den0 <= num0 * den1 {
                    return fail(COND_RATIO, n);
                }
            }
        }
        Ok(ExampleParameters { a, b })
    }

    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// `(b_{n+1} - a_{n+1}) / b_n` for `n < depth`.
    pub fn ratios(&self) -> Vec<f64> {
        (1..self.depth())
            .map(|i| (self.b[i] - self.a[i]) as f64 / self.b[i - 1] as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub n: usize,
    pub q: u64,
    pub i: (i64, i64),
    pub j: (i64, i64),
    pub f: (i64, i64),
}

impl Block {
    fn new(n: usize, a: u64, b: u64) -> Block {
        let q = (b - a) / 2;
        let (a, b, q) = (a as i64, b as i64, q as i64);
        Block {
            n,
            q: q as u64,
            i: (a, a + q),
            j: (a + q + 1, b),
            f: (a, b),
        }
    }

    pub fn f_len(&self) -> u64 {
        (self.f.1 - self.f.0 + 1) as u64
    }

    pub fn i_len(&self) -> u64 {
        (self.i.1 - self.i.0 + 1) as u64
    }

    pub fn j_len(&self) -> u64 {
        (self.j.1 - self.j.0 + 1) as u64
    }
}

/// `{first, first + 2, ..., last}`, tagged with its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Progression {
    block: usize,
    first: i64,
    last: i64,
}

impl Progression {
    /// The members of `[lo, hi]` with the parity of `parity`, if any.
    fn of_parity(block: usize, lo: i64, hi: i64, parity: i64) -> Option<Progression> {
        let first = if lo.rem_euclid(2) == parity { lo } else { lo + 1 };
        let last = if hi.rem_euclid(2) == parity { hi } else { hi - 1 };
        (first <= last).then_some(Progression { block, first, last })
    }
}

#[derive(Clone, Debug)]
pub struct ExampleSets {
    pub params: ExampleParameters,
    pub blocks: Vec<Block>,
    /// `A` and `B` over `[a_1, b_depth]`.
    pub a: WindowSet,
    pub b: WindowSet,
    a_pieces: Vec<Progression>,
    b_pieces: Vec<Progression>,
}

fn fill(lo: i64, len: usize, pieces: &[Progression]) -> Bitset {
    let mut bits = Bitset::new(len);
    for p in pieces {
        bits.insert_progression((p.first - lo) as usize, (p.last - lo) as usize, 2);
    }
    bits
}

impl ExampleSets {
    pub fn build(params: &ExampleParameters) -> Result<Self> {
        let blocks: Vec<Block> = (0..params.depth())
            .map(|i| Block::new(i + 1, params.a[i], params.b[i]))
            .collect();
        let (lo, hi) = (blocks[0].f.0, blocks.last().unwrap().f.1);
        let len = (hi - lo + 1) as u64;
        if len > cap_bits() {
            return Err(LabError::capacity("example window", len as u128, cap_bits() as u128));
        }
        let mut a_pieces = Vec::new();
        let mut b_pieces = Vec::new();
        for bl in &blocks {
            a_pieces.extend(Progression::of_parity(bl.n, bl.i.0, bl.i.1, 0));
            a_pieces.extend(Progression::of_parity(bl.n, bl.j.0, bl.j.1, 1));
            b_pieces.extend(Progression::of_parity(bl.n, bl.f.0, bl.f.1, 0));
        }
        let a = WindowSet::from_bitset(lo, fill(lo, len as usize, &a_pieces))?;
        let b = WindowSet::from_bitset(lo, fill(lo, len as usize, &b_pieces))?;
        Ok(ExampleSets {
            params: params.clone(),
            blocks,
            a,
            b,
            a_pieces,
            b_pieces,
        })
    }

    pub fn block(&self, n: usize) -> Result<&Block> {
        if n == 0 || n > self.blocks.len() {
            return Err(LabError::domain(format!("block {n} outside 1..={}", self.blocks.len())));
        }
        Ok(&self.blocks[n - 1])
    }

    /// `A_n` on `F_n`.
    pub fn a_block(&self, n: usize) -> Result<WindowSet> {
        let bl = self.block(n)?;
        self.a.restrict(bl.f.0, bl.f.1)
    }

    /// `(A + B) cap F_n`, exactly.
    pub fn sumset_on_block(&self, n: usize) -> Result<(WindowSet, SumsetBound)> {
        let f = self.block(n)?.f;
        let len = (f.1 - f.0 + 1) as usize;
        let mut bits = Bitset::new(len);
        let mut bound = SumsetBound::default();
        for pa in &self.a_pieces {
            for pb in &self.b_pieces {
                bound.pairs += 1;
                // two step-2 progressions sum to the step-2 progression between the extreme sums
                let (lo, hi) = (pa.first + pb.first, pa.last + pb.last);
                if hi < f.0 || lo > f.1 {
                    bound.skipped += 1;
                    continue;
                }
                bound.latest_block = bound.latest_block.max(pa.block.max(pb.block));
                let start = if lo >= f.0 { lo } else { lo + (f.0 - lo + 1) / 2 * 2 };
                if start <= f.1 {
                    bits.insert_progression((start - f.0) as usize, (hi.min(f.1) - f.0) as usize, 2);
                }
            }
        }
        Ok((WindowSet::from_bitset(f.0, bits)?, bound))
    }
}

/// Which summand pieces could reach `F_n`, from interval bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SumsetBound {
    pub pairs: u64,
    pub skipped: u64,
    /// Largest block index contributing to `F_n`; never beyond `n`.
    pub latest_block: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub n: usize,
    pub f_len: u64,
    pub sumset_count: u64,
    pub a_block_count: u64,
    pub symmetric_difference: u64,
    /// `|((A+B) cap F_n) sym-diff (A_n cap F_n)| / |F_n|`.
    pub defect: f64,
    pub bound: SumsetBound,
}

pub fn verify_sumset_localization(sets: &ExampleSets, n: usize) -> Result<LocalizationReport> {
    let (s, bound) = sets.sumset_on_block(n)?;
    let an = sets.a_block(n)?;
    let mut diff = s.bits().clone();
    diff.symmetric_difference_with(an.bits());
    let sd = diff.count_ones() as u64;
    Ok(LocalizationReport {
        n,
        f_len: s.len(),
        sumset_count: s.count_ones(),
        a_block_count: an.count_ones(),
        symmetric_difference: sd,
        defect: sd as f64 / s.len() as f64,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfObstructionReport {
    pub n: usize,
    pub phi: String,
    /// `|F_n|^{-1} sum_{x in F_n} phi(x) 1_{A+B}(x)`.
    #[serde(serialize_with = "ser_complex")]
    pub lhs: Complex64,
    /// Half the exact mean of `phi`.
    #[serde(serialize_with = "ser_complex")]
    pub rhs: Complex64,
    pub gap: f64,
}

/// `phi` must have rational frequencies only, so its mean is exact.
pub fn verify_half_obstruction(sets: &ExampleSets, phi: &TrigPolynomial, n: usize) -> Result<HalfObstructionReport> {
    if let Some((t, _)) = phi.terms().iter().find(|(t, _)| !t.is_rational()) {
        return Err(LabError::domain(format!("frequency {t} is not rational: the mean of phi is not exact")));
    }
    let (s, _) = sets.sumset_on_block(n)?;
    let members: Vec<i64> = s.members().collect();
    let vals: Vec<Complex64> = members.par_iter().map(|&x| phi.eval(x)).collect();
    let lhs = chunked_sum(&vals) / s.len() as f64;
    let rhs = phi.mean() / 2.0;
    Ok(HalfObstructionReport {
        n,
        phi: phi.to_string(),
        lhs,
        rhs,
        gap: (lhs - rhs).norm(),
    })
}

/// Per-block summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    pub block: Block,
    pub localization: LocalizationReport,
    /// `d_{F_n}(A + B)`.
    pub sumset_density: f64,
    /// `|(A+B) cap I_n cap 2Z| / |I_n|`, and likewise below.
    pub even_on_i: f64,
    pub odd_on_i: f64,
    pub even_on_j: f64,
    pub odd_on_j: f64,
    pub obstruction: HalfObstructionReport,
}

pub fn block_report(sets: &ExampleSets, phi: &TrigPolynomial, n: usize) -> Result<BlockReport> {
    let bl = *sets.block(n)?;
    let (s, _) = sets.sumset_on_block(n)?;
    let parity_fraction = |(lo, hi): (i64, i64), parity: i64| {
        let count = s.members().filter(|&x| lo <= x && x <= hi && x.rem_euclid(2) == parity).count();
        count as f64 / (hi - lo + 1) as f64
    };
    Ok(BlockReport {
        block: bl,
        localization: verify_sumset_localization(sets, n)?,
        sumset_density: s.density(),
        even_on_i: parity_fraction(bl.i, 0),
        odd_on_i: parity_fraction(bl.i, 1),
        even_on_j: parity_fraction(bl.j, 0),
        odd_on_j: parity_fraction(bl.j, 1),
        obstruction: verify_half_obstruction(sets, phi, n)?,
    })
}

/// `max - min` of `d_{F_m}(A + B)` over the dyadic tail `ceil(N/2) <= m <= N`.
pub fn tail_oscillation(reports: &[BlockReport]) -> f64 {
    let n = reports.len();
    let tail = &reports[n / 2..];
    let (lo, hi) = tail
        .iter()
        .map(|r| r.sumset_density)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), d| (a.min(d), b.max(d)));
    if tail.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn default_params(depth: usize) -> ExampleParameters {
        ExampleParameters::build(10, GrowthPolicy::default(), depth).unwrap()
    }

    #[test]
    fn default_policy_values() {
        let p = default_params(6);
        assert_eq!(p.a, vec![10, 57, 648, 11079, 252600, 7199100]);
        assert_eq!(p.b, vec![19, 108, 1231, 21050, 479940, 13678290]);
        let r = p.ratios();
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn policy_literals() {
        let p: GrowthPolicy = "b:19/10,a:3n".parse().unwrap();
        assert_eq!(p, GrowthPolicy::default());
        assert_eq!(p.to_string(), "b:19/10,a:3n");
        assert_eq!("b:3,a:1".parse::<GrowthPolicy>().unwrap().to_string(), "b:3,a:1");
        assert!("b:1/0,a:2".parse::<GrowthPolicy>().is_err());
        assert!("b:2".parse::<GrowthPolicy>().is_err());
    }

    #[test]
    fn violations_name_condition_and_index() {
        let err = ExampleParameters::build(10, "b:3,a:3n".parse().unwrap(), 3).unwrap_err();
        assert!(matches!(err, LabError::Construction { condition: COND_DOUBLE_A, n: 1 }));
        let err = ExampleParameters::build(10, "b:19/10,a:1".parse().unwrap(), 3).unwrap_err();
        assert!(matches!(err, LabError::Construction { condition: COND_GAP, n: 1 }));
        let err = ExampleParameters::from_sequences(vec![10, 40, 200], vec![19, 70, 300]).unwrap_err();
        assert!(matches!(err, LabError::Construction { condition: COND_RATIO, n: 2 }));
        assert!(ExampleParameters::build(1, GrowthPolicy::default(), 3).is_err());
    }

    #[test]
    fn blocks_partition_and_halve() {
        let sets = ExampleSets::build(&default_params(5)).unwrap();
        for bl in &sets.blocks {
            assert_eq!(bl.i.1 + 1, bl.j.0);
            assert_eq!(bl.i_len() + bl.j_len(), bl.f_len());
            assert!(bl.i_len().abs_diff(bl.j_len()) <= 1);
            let an = sets.a_block(bl.n).unwrap();
            assert!((an.density() - 0.5).abs() <= 1.0 / bl.f_len() as f64);
            let bn = sets.b.restrict(bl.f.0, bl.f.1).unwrap();
            assert!((bn.density() - 0.5).abs() <= 1.0 / bl.f_len() as f64);
        }
    }

    #[test]
    fn sumset_matches_brute_force() {
        let sets = ExampleSets::build(&default_params(3)).unwrap();
        let a: Vec<i64> = sets.a.members().collect();
        let b: Vec<i64> = sets.b.members().collect();
        let sums: BTreeSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        for n in 1..=3 {
            let bl = sets.blocks[n - 1];
            let (s, bound) = sets.sumset_on_block(n).unwrap();
            let expect: Vec<i64> = sums.range(bl.f.0..=bl.f.1).copied().collect();
            assert_eq!(s.members().collect::<Vec<_>>(), expect, "block {n}");
            assert!(bound.latest_block <= n);
        }
    }

    #[test]
    fn half_obstruction_inputs() {
        let sets = ExampleSets::build(&default_params(3)).unwrap();
        let one: TrigPolynomial = "1@0".parse().unwrap();
        let r = verify_half_obstruction(&sets, &one, 3).unwrap();
        let (s, _) = sets.sumset_on_block(3).unwrap();
        assert_eq!(r.lhs, Complex64::new(s.density(), 0.0));
        assert_eq!(r.rhs, Complex64::new(0.5, 0.0));
        let irr: TrigPolynomial = "1@0.3".parse().unwrap();
        assert!(matches!(verify_half_obstruction(&sets, &irr, 3), Err(LabError::Domain(_))));
    }

    #[test]
    fn depth_one_is_computed() {
        let sets = ExampleSets::build(&default_params(1)).unwrap();
        let r = verify_sumset_localization(&sets, 1).unwrap();
        assert!(r.defect.is_finite());
        assert!(sets.sumset_on_block(2).is_err());
    }
}
