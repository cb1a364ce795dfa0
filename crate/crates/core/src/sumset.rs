//! Sumsets on finite abelian groups: level sets of convolutions, density-point
//! refinement, the pigeonhole fill lemma, stabilizer (Kneser) certificates, and
//! the coset structure of quotient maps.

use std::fmt;

use serde::Serialize;

use crate::abelian::{FiniteAbelianGroup, Subgroup};
use crate::bits::Bitset;
use crate::error::{LabError, Result};
use crate::spectral::{convolve, GroupFunction};

/// Default density-point threshold.
pub const DENSITY_POINT_THRESHOLD: f64 = 0.6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSubset {
    group: FiniteAbelianGroup,
    members: Bitset,
    count: usize,
}

impl GroupSubset {
    pub fn new(group: &FiniteAbelianGroup, members: Bitset) -> Result<Self> {
        if members.len() != group.size() {
            return Err(LabError::structural(format!(
                "bitset of length {} used with group {group} of size {}",
                members.len(),
                group.size()
            )));
        }
        let count = members.count_ones();
        Ok(GroupSubset {
            group: group.clone(),
            members,
            count,
        })
    }

    pub fn from_indices(group: &FiniteAbelianGroup, indices: &[usize]) -> Result<Self> {
        if let Some(i) = indices.iter().find(|&&i| i >= group.size()) {
            return Err(LabError::structural(format!("index {i} outside {group}")));
        }
        Self::new(group, Bitset::from_indices(group.size(), indices.iter().copied()))
    }

    pub fn empty(group: &FiniteAbelianGroup) -> Self {
        Self::new(group, Bitset::new(group.size())).unwrap()
    }

    pub fn full(group: &FiniteAbelianGroup) -> Self {
        Self::new(group, Bitset::full(group.size())).unwrap()
    }

    pub fn from_subgroup(group: &FiniteAbelianGroup, h: &Subgroup) -> Self {
        Self::new(group, h.members().clone()).unwrap()
    }

    /// Parses `{0,2,4}` (linear indices), `{(0,1),(1,2)}` (coordinates), or a
    /// hex bitmask `0x15` where bit `i` marks index `i`.
    pub fn parse(group: &FiniteAbelianGroup, literal: &str) -> Result<Self> {
        let s = literal.trim();
        if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            let mut members = Bitset::new(group.size());
            for (pos, ch) in hex.chars().rev().enumerate() {
                let nibble = ch
                    .to_digit(16)
                    .ok_or_else(|| LabError::parse(format!("bad hex digit `{ch}` in `{s}`")))?;
                for bit in 0..4 {
                    if nibble >> bit & 1 == 1 {
                        let i = pos * 4 + bit;
                        if i >= group.size() {
                            return Err(LabError::structural(format!("bit {i} outside {group}")));
                        }
                        members.insert(i);
                    }
                }
            }
            return Self::new(group, members);
        }
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| LabError::parse(format!("subset literal `{s}` must look like {{0,2,4}} or 0x15")))?;
        let mut members = Bitset::new(group.size());
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let (token, tail) = if rest.starts_with('(') {
                let close = rest
                    .find(')')
                    .ok_or_else(|| LabError::parse(format!("unbalanced tuple in `{s}`")))?;
                (&rest[..=close], &rest[close + 1..])
            } else {
                match rest.find(',') {
                    Some(c) => (&rest[..c], &rest[c..]),
                    None => (rest, ""),
                }
            };
            let index = if token.starts_with('(') {
                group.index_of(&group.parse_element(token)?)?
            } else {
                let i: usize = token
                    .trim()
                    .parse()
                    .map_err(|_| LabError::parse(format!("bad element `{token}` in `{s}`")))?;
                if i >= group.size() {
                    return Err(LabError::structural(format!("index {i} outside {group}")));
                }
                i
            };
            members.insert(index);
            rest = tail.trim_start().trim_start_matches(',').trim_start();
        }
        Self::new(group, members)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn members(&self) -> &Bitset {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_full(&self) -> bool {
        self.count == self.group.size()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.iter_ones().collect()
    }

    /// Normalized Haar measure `|A| / |G|`.
    pub fn density(&self) -> f64 {
        self.count as f64 / self.group.size() as f64
    }

    pub fn translate(&self, t: usize) -> GroupSubset {
        GroupSubset::new(&self.group, self.group.translate(&self.members, t)).unwrap()
    }

    pub fn negated(&self) -> GroupSubset {
        let members = Bitset::from_indices(self.group.size(), self.members.iter_ones().map(|x| self.group.neg_index(x)));
        GroupSubset::new(&self.group, members).unwrap()
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn indicator(&self) -> GroupFunction {
        GroupFunction::indicator(&self.group, &self.members).unwrap()
    }
}

impl fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members.iter_ones().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if self.group.is_cyclic_presentation() {
                write!(f, "{i}")?;
            } else {
                write!(f, "{}", self.group.element_at(i))?;
            }
        }
        write!(f, "}}")
    }
}

impl Serialize for GroupSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members.iter_ones())
    }
}

fn same_group(a: &GroupSubset, b: &GroupSubset) -> Result<()> {
    if a.group != b.group {
        return Err(LabError::structural(format!(
            "subsets of different groups {} and {}",
            a.group, b.group
        )));
    }
    Ok(())
}

/// `A + B = {a + b}` as an exact bitset.
pub fn sumset(a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    same_group(a, b)?;
    let group = &a.group;
    let n = group.size();
    let mut out = Bitset::new(n);
    if a.is_empty() || b.is_empty() {
        return GroupSubset::new(group, out);
    }
    let (small, large) = if a.count <= b.count { (a, b) } else { (b, a) };
    if group.is_cyclic_presentation() {
        // rotate-or: x + B wraps around once
        for x in small.members.iter_ones() {
            out.or_shifted(&large.members, x as isize);
            out.or_shifted(&large.members, x as isize - n as isize);
        }
    } else {
        for x in small.members.iter_ones() {
            for y in large.members.iter_ones() {
                out.insert(group.add_index(x, y));
            }
        }
    }
    GroupSubset::new(group, out)
}

/// `{x : 1_A * 1_B (x) > 1/(2|G|)}`, half the smallest positive value the
/// convolution of two indicators can take.
pub fn steinhaus_level_set(a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    same_group(a, b)?;
    let conv = convolve(&a.indicator(), &b.indicator())?;
    let tau = 0.5 / a.group.size() as f64;
    let members = Bitset::from_indices(
        a.group.size(),
        conv.values().iter().enumerate().filter(|(_, v)| v.re > tau).map(|(x, _)| x),
    );
    GroupSubset::new(&a.group, members)
}

/// Outcome of the pigeonhole fill lemma for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PigeonholeOutcome {
    /// `|A| + |B| > |G|`.
    pub forced: bool,
    /// `A + B = G`.
    pub full: bool,
}

impl PigeonholeOutcome {
    pub fn is_violation(&self) -> bool {
        self.forced && !self.full
    }
}

pub fn pigeonhole_fill_check(a: &GroupSubset, b: &GroupSubset) -> Result<PigeonholeOutcome> {
    let s = sumset(a, b)?;
    Ok(PigeonholeOutcome {
        forced: a.count + b.count > a.group.size(),
        full: s.is_full(),
    })
}

/// Stabilizer certificate for a sumset.
#[derive(Clone, Debug, Serialize)]
pub struct KneserCertificate {
    pub group: FiniteAbelianGroup,
    pub sumset: GroupSubset,
    #[serde(serialize_with = "serialize_subgroup")]
    pub stabilizer: Subgroup,
    pub sumset_size: usize,
    pub a_size: usize,
    pub b_size: usize,
    pub a_plus_h_size: usize,
    pub b_plus_h_size: usize,
    /// `|A + H| + |B + H| - |H|`.
    pub kneser_bound: usize,
    /// `|A + B| < |A| + |B|`.
    pub small_sumset: bool,
    /// `|A + B| >= |A + H| + |B + H| - |H|`.
    pub satisfied_inequality: bool,
    /// `A + B + H == A + B`.
    pub union_of_cosets: bool,
}

fn serialize_subgroup<S: serde::Serializer>(h: &Subgroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(h.elements())
}

impl KneserCertificate {
    /// Kneser's theorem with a trivial period forces `|A+B| >= |A|+|B|-1`,
    /// so a sumset at least two short of `|A|+|B|` must have a nontrivial period.
    pub fn forces_nontrivial_period(&self) -> bool {
        self.sumset_size + 2 <= self.a_size + self.b_size
    }
}

pub fn kneser_certificate(a: &GroupSubset, b: &GroupSubset) -> Result<KneserCertificate> {
    same_group(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(LabError::domain("Kneser certificate needs nonempty summands"));
    }
    let group = &a.group;
    let s = sumset(a, b)?;
    let h = group.stabilizer(&s.members)?;
    let hs = GroupSubset::from_subgroup(group, &h);
    let a_h = sumset(a, &hs)?;
    let b_h = sumset(b, &hs)?;
    let s_h = sumset(&s, &hs)?;
    let bound = a_h.count + b_h.count - h.order();
    Ok(KneserCertificate {
        group: group.clone(),
        sumset_size: s.count,
        a_size: a.count,
        b_size: b.count,
        a_plus_h_size: a_h.count,
        b_plus_h_size: b_h.count,
        kneser_bound: bound,
        small_sumset: s.count < a.count + b.count,
        satisfied_inequality: s.count >= bound,
        union_of_cosets: s_h == s,
        sumset: s,
        stabilizer: h,
    })
}

/// Keeps the points of `A` where some neighborhood is filled above the threshold:
/// `{x in A : exists n, |A cap (U_n + x)| > threshold |U_n|}`.
pub fn density_point_refine(a: &GroupSubset, neighborhoods: &[GroupSubset]) -> Result<GroupSubset> {
    density_point_refine_with(a, neighborhoods, DENSITY_POINT_THRESHOLD)
}

pub fn density_point_refine_with(a: &GroupSubset, neighborhoods: &[GroupSubset], threshold: f64) -> Result<GroupSubset> {
    if !(threshold > 0.5 && threshold <= 1.0) {
        return Err(LabError::domain(format!("density-point threshold {threshold} outside (0.5, 1]")));
    }
    for (k, u) in neighborhoods.iter().enumerate() {
        same_group(a, u)?;
        if !u.contains(0) {
            return Err(LabError::domain(format!("neighborhood {k} does not contain 0")));
        }
        if u.negated() != *u {
            return Err(LabError::domain(format!("neighborhood {k} is not symmetric")));
        }
        if k > 0 && !u.is_subset(&neighborhoods[k - 1]) {
            return Err(LabError::domain(format!("neighborhood {k} is not contained in neighborhood {}", k - 1)));
        }
    }
    let keep = a.members.iter_ones().filter(|&x| {
        neighborhoods.iter().any(|u| {
            let shifted = u.translate(x);
            a.members.intersection_count(&shifted.members) as f64 > threshold * u.count as f64
        })
    });
    GroupSubset::new(&a.group, Bitset::from_indices(a.group.size(), keep))
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSetReport {
    pub support_f: GroupSubset,
    pub support_g: GroupSubset,
    pub level_set: GroupSubset,
    /// `supp f + supp g` is contained in `{f*g > 0}`.
    pub contained: bool,
    pub equal: bool,
    pub measure_support_f: f64,
    pub measure_support_g: f64,
    pub measure_level_set: f64,
}

/// For `[0,1]`-valued `f, g`: supports `{f>0}`, `{g>0}`, and the positivity set
/// of `f*g`, with the containment of the sumset of supports checked exactly.
pub fn level_set_sumset_check(f: &GroupFunction, g: &GroupFunction) -> Result<LevelSetReport> {
    if f.group() != g.group() {
        return Err(LabError::structural("functions on different groups"));
    }
    let group = f.group();
    let n = group.size();
    let support = |h: &GroupFunction| -> Result<GroupSubset> {
        let mut bits = Bitset::new(n);
        for (x, v) in h.values().iter().enumerate() {
            if v.im != 0.0 || !(0.0..=1.0).contains(&v.re) {
                return Err(LabError::domain(format!("value {v} at index {x} is outside [0,1]")));
            }
            if v.re > 0.0 {
                bits.insert(x);
            }
        }
        GroupSubset::new(group, bits)
    };
    let (sf, sg) = (support(f)?, support(g)?);
    let min_pos = |h: &GroupFunction| h.values().iter().map(|v| v.re).filter(|&v| v > 0.0).fold(1.0, f64::min);
    // the smallest positive value f*g can take at a point of supp f + supp g
    let tau = 0.5 * min_pos(f) * min_pos(g) / n as f64;
    let conv = convolve(f, g)?;
    let level = GroupSubset::new(
        group,
        Bitset::from_indices(n, conv.values().iter().enumerate().filter(|(_, v)| v.re > tau).map(|(x, _)| x)),
    )?;
    let ab = sumset(&sf, &sg)?;
    Ok(LevelSetReport {
        contained: ab.is_subset(&level),
        equal: ab == level,
        measure_support_f: sf.density(),
        measure_support_g: sg.density(),
        measure_level_set: level.density(),
        support_f: sf,
        support_g: sg,
        level_set: level,
    })
}

/// The quotient map `G -> G/H`, with cosets labelled by first appearance.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    group: FiniteAbelianGroup,
    coset_of: Vec<usize>,
    cosets: Vec<Bitset>,
}

impl QuotientMap {
    pub fn new(group: &FiniteAbelianGroup, h: &Subgroup) -> Self {
        let mut coset_of = vec![usize::MAX; group.size()];
        let mut cosets = Vec::new();
        for x in 0..group.size() {
            if coset_of[x] == usize::MAX {
                let c = h.coset(group, x);
                for y in c.iter_ones() {
                    coset_of[y] = cosets.len();
                }
                cosets.push(c);
            }
        }
        QuotientMap {
            group: group.clone(),
            coset_of,
            cosets,
        }
    }

    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    /// `rho(C)` as a set of coset labels.
    pub fn image(&self, c: &GroupSubset) -> Vec<usize> {
        let mut labels: Vec<usize> = c.members.iter_ones().map(|x| self.coset_of[x]).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// `rho^{-1}` of a set of coset labels.
    pub fn preimage(&self, labels: &[usize]) -> GroupSubset {
        let mut bits = Bitset::new(self.group.size());
        for &l in labels {
            bits.union_with(&self.cosets[l]);
        }
        GroupSubset::new(&self.group, bits).unwrap()
    }

    /// Whether `s` is a union of `H`-cosets.
    pub fn is_saturated(&self, s: &GroupSubset) -> bool {
        self.preimage(&self.image(s)) == *s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sumset_direct;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn z(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    fn set(g: &FiniteAbelianGroup, lit: &str) -> GroupSubset {
        GroupSubset::parse(g, lit).unwrap()
    }

    #[test]
    fn literals() {
        let g = z("Z2xZ3");
        let a = set(&g, "{(1,0),(0,2)}");
        assert_eq!(a.indices(), vec![1, 4]);
        assert_eq!(a.to_string(), "{(1,0),(0,2)}");
        assert_eq!(set(&g, "0x12"), a);
        let c = z("Z6");
        assert_eq!(set(&c, "{0, 2,4}").to_string(), "{0,2,4}");
        assert!(GroupSubset::parse(&c, "{7}").is_err());
        assert!(GroupSubset::parse(&c, "0,2").is_err());
        assert!(set(&c, "{}").is_empty());
    }

    #[test]
    fn sumset_examples() {
        let g = z("Z8");
        assert_eq!(sumset(&set(&g, "{0,1}"), &set(&g, "{0,2}")).unwrap(), set(&g, "{0,1,2,3}"));
        let a = set(&g, "{1,5,6}");
        assert_eq!(sumset(&a, &set(&g, "{0}")).unwrap(), a);
        let g6 = z("Z6");
        let h = set(&g6, "{0,2,4}");
        assert_eq!(sumset(&h, &h).unwrap(), h);
        assert!(sumset(&h, &GroupSubset::empty(&g6)).unwrap().is_empty());
        assert!(matches!(sumset(&h, &set(&g, "{0}")), Err(LabError::Structural(_))));
    }

    #[test]
    fn steinhaus_examples() {
        let g = z("Z4");
        let zero = set(&g, "{0}");
        assert_eq!(steinhaus_level_set(&zero, &zero).unwrap(), zero);
        let g = z("Z6");
        for ma in 1u32..64 {
            for mb in 1u32..64 {
                let a = GroupSubset::new(&g, Bitset::from_indices(6, (0..6).filter(|i| ma >> i & 1 == 1))).unwrap();
                let b = GroupSubset::new(&g, Bitset::from_indices(6, (0..6).filter(|i| mb >> i & 1 == 1))).unwrap();
                let level = steinhaus_level_set(&a, &b).unwrap();
                assert!(!level.is_empty());
                assert_eq!(level, sumset(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn pigeonhole_examples() {
        let g = z("Z5");
        let a = set(&g, "{0,1,2}");
        let out = pigeonhole_fill_check(&a, &a).unwrap();
        assert!(out.forced && out.full);
        let g = z("Z4");
        let a = set(&g, "{0,1}");
        let out = pigeonhole_fill_check(&a, &a).unwrap();
        assert!(!out.forced && !out.full);
        assert_eq!(sumset(&a, &a).unwrap(), set(&g, "{0,1,2}"));
        let out = pigeonhole_fill_check(&GroupSubset::full(&g), &set(&g, "{0}")).unwrap();
        assert!(out.full && !out.is_violation());
    }

    #[test]
    fn kneser_examples() {
        let g = z("Z6");
        let a = set(&g, "{0,2,4}");
        let cert = kneser_certificate(&a, &a).unwrap();
        assert_eq!(cert.stabilizer.elements(), &[0, 2, 4]);
        assert_eq!(cert.sumset_size, 3);
        assert!(cert.small_sumset && cert.satisfied_inequality && cert.union_of_cosets);

        // cosets of H sum to a single coset whose period contains H
        let g = z("Z12");
        let h = set(&g, "{0,4,8}");
        let c1 = h.translate(1);
        let c2 = h.translate(6);
        let cert = kneser_certificate(&c1, &c2).unwrap();
        assert_eq!(cert.sumset, h.translate(7));
        assert!(h.members().is_subset(cert.stabilizer.members()));

        assert!(matches!(kneser_certificate(&GroupSubset::empty(&g), &h), Err(LabError::Domain(_))));
    }

    #[test]
    fn cauchy_davenport_in_z7() {
        let g = z("Z7");
        for ma in 1u32..128 {
            for mb in 1u32..128 {
                let a = GroupSubset::new(&g, Bitset::from_indices(7, (0..7).filter(|i| ma >> i & 1 == 1))).unwrap();
                let b = GroupSubset::new(&g, Bitset::from_indices(7, (0..7).filter(|i| mb >> i & 1 == 1))).unwrap();
                let cert = kneser_certificate(&a, &b).unwrap();
                assert!(cert.satisfied_inequality);
                assert!(cert.sumset_size >= 7.min(a.len() + b.len() - 1));
                if cert.forces_nontrivial_period() {
                    assert!(!cert.stabilizer.is_trivial());
                }
            }
        }
    }

    #[test]
    fn density_point_examples() {
        let g = z("Z12");
        let a = set(&g, "{0,1,2,3,4,5}");
        let u = set(&g, "{11,0,1}");
        let refined = density_point_refine(&a, std::slice::from_ref(&u)).unwrap();
        // interior points see 3 of 3; the endpoints 0 and 5 see 2 of 3 > 1.8
        assert!(set(&g, "{1,2,3,4}").is_subset(&refined));
        assert_eq!(refined, a);
        let strict = density_point_refine_with(&a, std::slice::from_ref(&u), 0.7).unwrap();
        assert_eq!(strict, set(&g, "{1,2,3,4}"));

        let nested = [set(&g, "{10,11,0,1,2}"), u.clone(), set(&g, "{0}")];
        let b = set(&g, "{0,3,7,8}");
        assert_eq!(density_point_refine(&b, &nested).unwrap(), b);
        assert!(density_point_refine(&GroupSubset::empty(&g), &nested).unwrap().is_empty());

        assert!(matches!(density_point_refine(&a, &[set(&g, "{0,1}")]), Err(LabError::Domain(_))));
        assert!(density_point_refine(&a, &[set(&g, "{0}"), u]).is_err());
        assert!(density_point_refine_with(&a, &nested, 0.5).is_err());
    }

    #[test]
    fn level_set_examples() {
        let g = z("Z10");
        let a = set(&g, "{0,3,4}");
        let b = set(&g, "{1,2,9}");
        let rep = level_set_sumset_check(&a.indicator(), &b.indicator()).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.level_set, steinhaus_level_set(&a, &b).unwrap());

        let zero = GroupFunction::constant(&g, Complex64::new(0.0, 0.0));
        let rep = level_set_sumset_check(&zero, &zero).unwrap();
        assert!(rep.support_f.is_empty() && rep.level_set.is_empty());

        let bad = GroupFunction::constant(&g, Complex64::new(1.5, 0.0));
        assert!(matches!(level_set_sumset_check(&bad, &zero), Err(LabError::Domain(_))));
    }

    #[test]
    fn quotient_saturation() {
        let g = z("Z2xZ6");
        for h in g.enumerate_subgroups().unwrap() {
            let q = QuotientMap::new(&g, &h);
            assert_eq!(q.index(), h.index());
            let hs = GroupSubset::from_subgroup(&g, &h);
            for mask in [0b1u32, 0b100101, 0b110000000011, 0b10101010101] {
                let c = GroupSubset::new(&g, Bitset::from_indices(12, (0..12).filter(|i| mask >> i & 1 == 1))).unwrap();
                let ch = sumset(&c, &hs).unwrap();
                assert!(q.is_saturated(&ch));
                assert_eq!(q.preimage(&q.image(&c)), ch);
            }
        }
    }

    proptest! {
        #[test]
        fn sumset_matches_direct_and_is_monotone(
            lit in prop::sample::select(vec!["Z16", "Z2xZ8", "Z3xZ5", "Z2xZ2xZ3"]),
            ma in any::<u16>(), mb in any::<u16>(), extra_a in any::<u16>(), extra_b in any::<u16>()
        ) {
            let g = z(lit);
            let n = g.size();
            let mk = |m: u16| GroupSubset::new(&g, Bitset::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1))).unwrap();
            let (a, b) = (mk(ma), mk(mb));
            let s = sumset(&a, &b).unwrap();
            prop_assert_eq!(s.members(), &sumset_direct(&g, a.members(), b.members()));
            let (a2, b2) = (mk(ma | extra_a), mk(mb | extra_b));
            prop_assert!(s.is_subset(&sumset(&a2, &b2).unwrap()));
            if !a.is_empty() && !b.is_empty() {
                prop_assert_eq!(steinhaus_level_set(&a, &b).unwrap(), s.clone());
                let cert = kneser_certificate(&a, &b).unwrap();
                prop_assert!(cert.union_of_cosets && cert.satisfied_inequality);
            }
        }
    }
}
