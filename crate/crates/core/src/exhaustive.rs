//! Exhaustive pair scans over all subsets of small groups (`|G| <= 24`),
//! with subsets packed into `u32` masks.
//!
//! Scans that only depend on pairs up to translation enumerate `A` and `B`
//! containing `0`; every pair `(A, B)` is a translate of such a pair and
//! translation moves `A + B` without changing sizes or periods. Scans that are
//! symmetric in `A` and `B` also keep only `mask(A) <= mask(B)`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::FiniteAbelianGroup;
use crate::bits::Bitset;
use crate::error::{LabError, Result};
use crate::spectral::{dft, GroupFunction};

pub const MAX_MASK_GROUP: usize = 24;

/// A small group with byte-sliced translation tables.
pub struct MaskGroup {
    group: FiniteAbelianGroup,
    n: usize,
    // shift[t][chunk][byte] = image of the byte's elements under x -> x + t
    shift: Vec<[[u32; 256]; 3]>,
}

impl MaskGroup {
    pub fn new(group: &FiniteAbelianGroup) -> Result<Self> {
        let n = group.size();
        if n > MAX_MASK_GROUP {
            return Err(LabError::capacity(format!("mask scan over {group}"), n as u128, MAX_MASK_GROUP as u128));
        }
        let mut shift = vec![[[0u32; 256]; 3]; n];
        for (t, table) in shift.iter_mut().enumerate() {
            for (chunk, row) in table.iter_mut().enumerate() {
                for (byte, slot) in row.iter_mut().enumerate() {
                    let mut m = 0u32;
                    for bit in 0..8 {
                        let x = chunk * 8 + bit;
                        if byte >> bit & 1 == 1 && x < n {
                            m |= 1 << group.add_index(x, t);
                        }
                    }
                    *slot = m;
                }
            }
        }
        Ok(MaskGroup {
            group: group.clone(),
            n,
            shift,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> u32 {
        if self.n == 32 {
            !0
        } else {
            (1u32 << self.n) - 1
        }
    }

    #[inline]
    pub fn translate(&self, m: u32, t: usize) -> u32 {
        let tab = &self.shift[t];
        tab[0][(m & 0xff) as usize] | tab[1][(m >> 8 & 0xff) as usize] | tab[2][(m >> 16 & 0xff) as usize]
    }

    pub fn sumset(&self, a: u32, b: u32) -> u32 {
        let mut s = 0;
        let mut rest = a;
        while rest != 0 {
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            s |= self.translate(b, t);
        }
        s
    }

    /// Period group of `s` by testing every candidate difference.
    pub fn stabilizer(&self, s: u32) -> u32 {
        if s == 0 {
            return 0;
        }
        let s0 = s.trailing_zeros() as usize;
        let mut h = 0u32;
        let mut rest = s;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = self.group.sub_index(e, s0);
            if self.translate(s, d) == s {
                h |= 1 << d;
            }
        }
        h
    }

    fn to_bitset(&self, m: u32) -> Bitset {
        Bitset::from_indices(self.n, (0..self.n).filter(|i| m >> i & 1 == 1))
    }
}

/// Receives the pairs of a DFS over `B`.
trait PairVisitor {
    /// One `B` with running sumset `s` and `|B| = size`.
    fn pair(&mut self, b: u32, s: u32, size: u32);
    /// A block of `B`s whose sumset is already all of `G`: `hist[k]` of them
    /// have `size + k` elements.
    fn saturated(&mut self, size: u32, hist: &[u64]);
}

const BINOM: [[u64; 33]; 33] = {
    let mut t = [[0u64; 33]; 33];
    let mut n = 0;
    while n < 33 {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
            k += 1;
        }
        n += 1;
    }
    t
};

/// `hist[k] = #{v in [lo, 2^m) : popcount(v) = k}`.
fn popcount_histogram(m: usize, lo: u64, hist: &mut [u64]) {
    hist[..=m].copy_from_slice(&BINOM[m][..=m]);
    let mut ones = 0;
    for j in (0..m).rev() {
        if lo >> j & 1 == 1 {
            // v shares lo's bits above j and has a 0 at j
            for k in ones..=ones + j {
                hist[k] -= BINOM[j][k - ones];
            }
            ones += 1;
        }
    }
}

/// Walks every `B` containing `0` with `mask(B) >= floor`, carrying the running
/// sumset `A + B` built from precomputed translates of `A`. Subtrees whose
/// sumset is already full are reported in bulk.
fn dfs_supersets(trans: &[u32], full: u32, floor: u32, visitor: &mut impl PairVisitor) {
    let n = trans.len();
    let mut hist = [0u64; 33];
    // elements are added from the top bit down, so the descendants of a node
    // are `b + 2v` for `v < 2^(below - 1)`
    #[allow(clippy::too_many_arguments)]
    fn rec(
        trans: &[u32],
        below: usize,
        b: u32,
        s: u32,
        size: u32,
        full: u32,
        floor: u32,
        hist: &mut [u64; 33],
        visitor: &mut impl PairVisitor,
    ) {
        if s == full {
            let m = below - 1;
            let lo = if b >= floor { 0 } else { (floor - b).div_ceil(2) as u64 };
            popcount_histogram(m, lo, hist);
            visitor.saturated(size, &hist[..=m]);
            return;
        }
        if b >= floor {
            visitor.pair(b, s, size);
        }
        for e in (1..below).rev() {
            let nb = b | 1 << e;
            if nb | ((1u32 << e) - 1) < floor {
                continue;
            }
            rec(trans, e, nb, s | trans[e], size + 1, full, floor, hist, visitor);
        }
    }
    rec(trans, n, 1, trans[0], 1, full, floor, &mut hist, visitor);
}

fn translates(mg: &MaskGroup, a: u32) -> Vec<u32> {
    (0..mg.n).map(|t| mg.translate(a, t)).collect()
}

// --- Kneser -----------------------------------------------------------------------

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KneserScan {
    pub group: String,
    /// Unordered pairs `{A, B}` with `0 in A cap B`, each standing for its translates.
    pub pairs: u64,
    /// Pairs with `|A + B| < |A| + |B|`.
    pub small_sumset_pairs: u64,
    /// Small-sumset pairs whose sumset has only the trivial period.
    pub small_with_trivial_stabilizer: u64,
    /// Pairs with `|A + B| <= |A| + |B| - 2` and trivial period (impossible by Kneser).
    pub critical_violations: u64,
    /// Pairs with `|A + B| < |A + H| + |B + H| - |H|`.
    pub inequality_violations: u64,
    /// Sumsets `S` (over all masks) with `S + H != S`.
    pub fixed_point_violations: u64,
    /// Lexicographically first small-sumset pair with trivial period, as index lists.
    pub first_trivial_example: Option<(Vec<usize>, Vec<usize>, Vec<usize>)>,
}

impl KneserScan {
    fn merge(mut self, o: KneserScan) -> KneserScan {
        self.pairs += o.pairs;
        self.small_sumset_pairs += o.small_sumset_pairs;
        self.small_with_trivial_stabilizer += o.small_with_trivial_stabilizer;
        self.critical_violations += o.critical_violations;
        self.inequality_violations += o.inequality_violations;
        self.fixed_point_violations += o.fixed_point_violations;
        self.first_trivial_example = match (self.first_trivial_example, o.first_trivial_example) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        self
    }
}

/// Period tables for every mask: the stabilizer id and `|X + H|` per subgroup.
struct PeriodTables {
    subgroup_orders: Vec<u32>,
    stab_id: Vec<u8>,
    saturation: Vec<Vec<u8>>,
    trivial_id: u8,
    full_id: u8,
}

impl PeriodTables {
    fn build(mg: &MaskGroup) -> Result<(Self, u64)> {
        let n = mg.n;
        let subs = mg.group.enumerate_subgroups()?;
        let mut id_of: HashMap<u32, u8> = HashMap::new();
        let mut orders = Vec::new();
        let mut saturation = Vec::new();
        for (k, h) in subs.iter().enumerate() {
            let hm: u32 = h.elements().iter().map(|&e| 1u32 << e).sum();
            id_of.insert(hm, k as u8);
            orders.push(h.order() as u32);
            // X + H via lowest-bit recursion over coset masks
            let coset: Vec<u32> = (0..n).map(|x| mg.translate(hm, x)).collect();
            let mut plus = vec![0u32; 1 << n];
            let mut sat = vec![0u8; 1 << n];
            for m in 1usize..(1 << n) {
                let low = m.trailing_zeros() as usize;
                plus[m] = plus[m & (m - 1)] | coset[low];
                sat[m] = plus[m].count_ones() as u8;
            }
            saturation.push(sat);
        }
        let mut stab_id = vec![0u8; 1 << n];
        let mut fixed_point_violations = 0;
        for s in 1u32..=mg.full() {
            let h = mg.stabilizer(s);
            let id = *id_of
                .get(&h)
                .ok_or_else(|| LabError::structural(format!("stabilizer {h:#x} is not a subgroup")))?;
            stab_id[s as usize] = id;
            if saturation[id as usize][s as usize] as u32 != s.count_ones() {
                fixed_point_violations += 1;
            }
        }
        let trivial_id = id_of[&1];
        let full_id = id_of[&mg.full()];
        Ok((
            PeriodTables {
                subgroup_orders: orders,
                stab_id,
                saturation,
                trivial_id,
                full_id,
            },
            fixed_point_violations,
        ))
    }
}

/// Every pair: stabilizer fixed point, Kneser's inequality, and the
/// small-sumset/period relationship.
pub fn kneser_scan(group: &FiniteAbelianGroup) -> Result<KneserScan> {
    let mg = MaskGroup::new(group)?;
    let (tables, fixed_point_violations) = PeriodTables::build(&mg)?;
    let n = mg.n;
    let a_masks: Vec<u32> = (0u32..1 << (n - 1)).map(|m| m << 1 | 1).collect();
    let full = mg.full();
    let stats = a_masks
        .par_iter()
        .map(|&a| {
            let mut v = KneserVisitor {
                tables: &tables,
                n,
                a,
                ca: a.count_ones(),
                st: KneserScan::default(),
            };
            dfs_supersets(&translates(&mg, a), full, a, &mut v);
            v.st
        })
        .reduce(KneserScan::default, KneserScan::merge);
    Ok(KneserScan {
        group: group.to_string(),
        fixed_point_violations,
        ..stats
    })
}

struct KneserVisitor<'a> {
    tables: &'a PeriodTables,
    n: usize,
    a: u32,
    ca: u32,
    st: KneserScan,
}

impl PairVisitor for KneserVisitor<'_> {
    fn pair(&mut self, b: u32, s: u32, cb: u32) {
        let (st, tables, ca) = (&mut self.st, self.tables, self.ca);
        st.pairs += 1;
        let cs = s.count_ones();
        let id = tables.stab_id[s as usize];
        if id == tables.trivial_id {
            if cs + 1 < ca + cb {
                st.inequality_violations += 1;
                st.critical_violations += 1;
            }
            if cs < ca + cb {
                st.small_sumset_pairs += 1;
                st.small_with_trivial_stabilizer += 1;
                if st.first_trivial_example.is_none() {
                    let n = self.n;
                    st.first_trivial_example = Some((mask_list(self.a, n), mask_list(b, n), mask_list(s, n)));
                }
            }
            return;
        }
        if cs < ca + cb {
            st.small_sumset_pairs += 1;
        }
        if id != tables.full_id {
            let sat = &tables.saturation[id as usize];
            let bound = sat[self.a as usize] as u32 + sat[b as usize] as u32 - tables.subgroup_orders[id as usize];
            if cs < bound {
                st.inequality_violations += 1;
            }
        }
    }

    fn saturated(&mut self, size: u32, hist: &[u64]) {
        // period G: no inequality to check, small iff |A| + |B| > |G|
        for (k, &count) in hist.iter().enumerate() {
            self.st.pairs += count;
            if self.ca + size + k as u32 > self.n as u32 {
                self.st.small_sumset_pairs += count;
            }
        }
    }
}

fn mask_list(m: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| m >> i & 1 == 1).collect()
}

// --- pigeonhole -----------------------------------------------------------------

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PigeonholeScan {
    pub group: String,
    pub pairs: u64,
    pub forced_pairs: u64,
    pub violations: u64,
}

/// Pairs with `|A| + |B| > |G|` whose sumset misses something.
pub fn pigeonhole_scan(group: &FiniteAbelianGroup) -> Result<PigeonholeScan> {
    let mg = MaskGroup::new(group)?;
    let n = mg.n;
    let full = mg.full();
    let a_masks: Vec<u32> = (0u32..1 << (n - 1)).map(|m| m << 1 | 1).collect();
    let (pairs, forced, violations) = a_masks
        .par_iter()
        .map(|&a| {
            let mut v = PigeonholeVisitor {
                n: n as u32,
                full,
                ca: a.count_ones(),
                counts: (0, 0, 0),
            };
            dfs_supersets(&translates(&mg, a), full, a, &mut v);
            v.counts
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    Ok(PigeonholeScan {
        group: group.to_string(),
        pairs,
        forced_pairs: forced,
        violations,
    })
}

struct PigeonholeVisitor {
    n: u32,
    full: u32,
    ca: u32,
    // (pairs, forced, violations)
    counts: (u64, u64, u64),
}

impl PairVisitor for PigeonholeVisitor {
    fn pair(&mut self, _: u32, s: u32, cb: u32) {
        self.counts.0 += 1;
        if self.ca + cb > self.n {
            self.counts.1 += 1;
            if s != self.full {
                self.counts.2 += 1;
            }
        }
    }

    fn saturated(&mut self, size: u32, hist: &[u64]) {
        for (k, &count) in hist.iter().enumerate() {
            self.counts.0 += count;
            if self.ca + size + k as u32 > self.n {
                self.counts.1 += count;
            }
        }
    }
}

// --- Steinhaus level sets ---------------------------------------------------------

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SteinhausScan {
    pub group: String,
    pub pairs: u64,
    pub mismatches: u64,
    pub empty_level_sets: u64,
}

/// All ordered pairs of nonempty subsets: the level set `{1_A * 1_B > 1/(2|G|)}`
/// rebuilt from cached spectra against the translate-union sumset.
pub fn steinhaus_scan(group: &FiniteAbelianGroup) -> Result<SteinhausScan> {
    let mg = MaskGroup::new(group)?;
    let n = mg.n;
    let masks = 1usize << n;
    let spectra: Vec<Vec<Complex64>> = (0..masks)
        .map(|m| {
            let f = GroupFunction::indicator(group, &mg.to_bitset(m as u32)).expect("size matches");
            dft(&f).coefficients().to_vec()
        })
        .collect();
    // character table split into real and imaginary parts, row per x
    let (cos, sin): (Vec<f64>, Vec<f64>) = (0..n)
        .flat_map(|x| (0..n).map(move |chi| (x, chi)))
        .map(|(x, chi)| {
            let v = group.char_eval_index(chi, x);
            (v.re, v.im)
        })
        .unzip();
    let tau = 0.5 / n as f64;
    let (pairs, mismatches, empty) = (1..masks)
        .into_par_iter()
        .map(|a| {
            let (mut p, mut mm, mut e) = (0u64, 0u64, 0u64);
            let sa = &spectra[a];
            let mut prod = vec![Complex64::new(0.0, 0.0); n];
            for b in 1..masks {
                let sb = &spectra[b];
                for chi in 0..n {
                    prod[chi] = sa[chi] * sb[chi];
                }
                let mut level = 0u32;
                for x in 0..n {
                    let row = x * n;
                    let mut v = 0.0;
                    for chi in 0..n {
                        v += prod[chi].re * cos[row + chi] - prod[chi].im * sin[row + chi];
                    }
                    if v > tau {
                        level |= 1 << x;
                    }
                }
                p += 1;
                if level == 0 {
                    e += 1;
                }
                if level != mg.sumset(a as u32, b as u32) {
                    mm += 1;
                }
            }
            (p, mm, e)
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    Ok(SteinhausScan {
        group: group.to_string(),
        pairs,
        mismatches,
        empty_level_sets: empty,
    })
}

// --- groups ---------------------------------------------------------------------

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every abelian group of order `n`, once each, in invariant-factor form
/// `Z_{d_1} x ... x Z_{d_k}` with `d_1 | d_2 | ... | d_k`.
pub fn abelian_groups_of_order(n: usize) -> Vec<FiniteAbelianGroup> {
    if n == 1 {
        return vec![FiniteAbelianGroup::cyclic(1).unwrap()];
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
        p += 1;
    }
    let mut groups = vec![Vec::<usize>::new()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for factors in &groups {
            for part in partitions(e, e) {
                // part is descending: largest power joins the largest factor
                let len = factors.len().max(part.len());
                let mut combined = vec![1usize; len];
                for (i, f) in factors.iter().rev().enumerate() {
                    combined[len - 1 - i] *= f;
                }
                for (i, k) in part.iter().enumerate() {
                    combined[len - 1 - i] *= p.pow(*k);
                }
                next.push(combined);
            }
        }
        groups = next;
    }
    let mut out: Vec<FiniteAbelianGroup> = groups
        .into_iter()
        .map(|orders| FiniteAbelianGroup::new(orders).unwrap())
        .collect();
    out.sort_by_key(|g| (g.rank(), g.orders().to_vec()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumset::{kneser_certificate, sumset, GroupSubset};

    fn z(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn group_catalogue() {
        let names = |n| abelian_groups_of_order(n).iter().map(|g| g.to_string()).collect::<Vec<_>>();
        assert_eq!(names(12), vec!["Z12", "Z2xZ6"]);
        assert_eq!(names(16), vec!["Z16", "Z2xZ8", "Z4xZ4", "Z2xZ2xZ4", "Z2xZ2xZ2xZ2"]);
        assert_eq!(names(18), vec!["Z18", "Z3xZ6"]);
        assert_eq!(names(7), vec!["Z7"]);
        let counts: Vec<usize> = (1..=18).map(|n| abelian_groups_of_order(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5, 1, 2]);
    }

    #[test]
    fn mask_sumset_and_stabilizer_match_bitsets() {
        for lit in ["Z9", "Z2xZ4", "Z2xZ3"] {
            let g = z(lit);
            let mg = MaskGroup::new(&g).unwrap();
            let n = g.size();
            for a in 1u32..(1 << n) {
                let b = a.rotate_left(3) & mg.full() | 1;
                let (sa, sb) = (
                    GroupSubset::new(&g, mg.to_bitset(a)).unwrap(),
                    GroupSubset::new(&g, mg.to_bitset(b)).unwrap(),
                );
                let s = sumset(&sa, &sb).unwrap();
                assert_eq!(mg.to_bitset(mg.sumset(a, b)), *s.members());
                let cert = kneser_certificate(&sa, &sb).unwrap();
                assert_eq!(mg.to_bitset(mg.stabilizer(mg.sumset(a, b))), *cert.stabilizer.members());
            }
        }
    }

    /// Unreduced brute force over every ordered pair, no translation or symmetry reduction.
    fn brute_kneser(g: &FiniteAbelianGroup) -> (u64, u64, u64) {
        let mg = MaskGroup::new(g).unwrap();
        let (mut small, mut trivial_small, mut bad) = (0, 0, 0);
        for a in 1u32..=mg.full() {
            for b in 1u32..=mg.full() {
                let ga = GroupSubset::new(g, mg.to_bitset(a)).unwrap();
                let gb = GroupSubset::new(g, mg.to_bitset(b)).unwrap();
                let cert = kneser_certificate(&ga, &gb).unwrap();
                if cert.small_sumset {
                    small += 1;
                    if cert.stabilizer.is_trivial() {
                        trivial_small += 1;
                    }
                }
                if !cert.satisfied_inequality {
                    bad += 1;
                }
            }
        }
        (small, trivial_small, bad)
    }

    #[test]
    fn reduced_scan_agrees_with_brute_force_on_violation_status() {
        for lit in ["Z5", "Z6", "Z2xZ2", "Z2xZ3", "Z8"] {
            let g = z(lit);
            let scan = kneser_scan(&g).unwrap();
            let (small, trivial_small, bad) = brute_kneser(&g);
            assert_eq!(scan.inequality_violations, 0);
            assert_eq!(bad, 0);
            assert_eq!(scan.fixed_point_violations, 0);
            assert_eq!(scan.small_sumset_pairs > 0, small > 0, "{lit}");
            assert_eq!(scan.small_with_trivial_stabilizer > 0, trivial_small > 0, "{lit}");
            assert_eq!(scan.critical_violations, 0);
        }
    }

    #[test]
    fn scan_pair_count_is_unordered_classes() {
        let g = z("Z6");
        let scan = kneser_scan(&g).unwrap();
        // 32 masks containing 0, unordered with repetition
        assert_eq!(scan.pairs, 32 * 33 / 2);
        let p = pigeonhole_scan(&g).unwrap();
        assert_eq!(p.pairs, 32 * 33 / 2);
        assert_eq!(p.violations, 0);
    }

    #[test]
    fn small_cyclic_sumsets_can_have_trivial_period() {
        let scan = kneser_scan(&z("Z7")).unwrap();
        let (a, b, s) = scan.first_trivial_example.unwrap();
        assert!(s.len() < a.len() + b.len());
        assert_eq!(s.len(), a.len() + b.len() - 1);
    }

    #[test]
    fn steinhaus_small() {
        for n in 1..=6 {
            let g = FiniteAbelianGroup::cyclic(n).unwrap();
            let s = steinhaus_scan(&g).unwrap();
            assert_eq!(s.pairs, ((1u64 << n) - 1).pow(2));
            assert_eq!(s.mismatches, 0);
            assert_eq!(s.empty_level_sets, 0);
        }
        let s = steinhaus_scan(&z("Z2xZ3")).unwrap();
        assert_eq!(s.mismatches, 0);
    }

    #[test]
    fn popcount_histogram_matches_enumeration() {
        let mut hist = [0u64; 33];
        for m in 0..9 {
            for lo in 0..(1u64 << m) {
                popcount_histogram(m, lo, &mut hist);
                for k in 0..=m {
                    let direct = (lo..1 << m).filter(|v| v.count_ones() as usize == k).count() as u64;
                    assert_eq!(hist[k], direct, "m={m} lo={lo} k={k}");
                }
            }
        }
    }

    #[test]
    fn pigeonhole_counts_match_plain_enumeration() {
        for lit in ["Z7", "Z2xZ4", "Z9"] {
            let g = z(lit);
            let mg = MaskGroup::new(&g).unwrap();
            let (mut pairs, mut forced) = (0u64, 0u64);
            for a in (1u32..=mg.full()).filter(|a| a & 1 == 1) {
                for b in (a..=mg.full()).filter(|b| b & 1 == 1) {
                    pairs += 1;
                    if (a.count_ones() + b.count_ones()) as usize > g.size() {
                        forced += 1;
                    }
                }
            }
            let scan = pigeonhole_scan(&g).unwrap();
            assert_eq!((scan.pairs, scan.forced_pairs, scan.violations), (pairs, forced, 0));
            let k = kneser_scan(&g).unwrap();
            assert_eq!(k.pairs, pairs);
        }
    }
}
